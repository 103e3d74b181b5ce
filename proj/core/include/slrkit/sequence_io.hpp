#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slrkit/sequence.hpp"

namespace slrkit {

/// Text sequence format, one frame per record:
///
///   KPSEQ 1
///   layout mediapipe
///   T 3
///   K 67
///   D 3
///   confidence 0
///   label WG-1            (optional)
///   signer s042           (optional)
///   frame 0: <K cells>    cell = "_" (absent) | D coords [+ confidence]
///
/// Doubles are written with shortest round-trip formatting, so
/// write -> read is exact.
KeypointSequence read_sequence(const std::filesystem::path& path);
void write_sequence(const KeypointSequence& seq, const std::filesystem::path& path);

/// Estimator-specific ingest conventions, applied to raw estimator dumps:
/// openpose keypoints at exactly (0,0) with confidence 0 become absent;
/// mmpose keypoints are always treated as present.
void apply_ingest_rules(KeypointSequence& seq, const SkeletonLayout& layout);

/// Corpus manifest: one record per line, "file<TAB>label<TAB>signer".
std::vector<AnnotationRecord> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<AnnotationRecord>& records,
                    const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace slrkit
