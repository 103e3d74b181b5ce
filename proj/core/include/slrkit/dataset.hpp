#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slrkit/postproc.hpp"
#include "slrkit/sequence.hpp"

namespace slrkit {

/// Signer-disjoint train/validation/test partition with a label vocabulary.
/// After drop_absent_classes, every class occurs in all three subsets and
/// class ids are the contiguous indices into `classes` (lexicographic order).
struct DatasetSplit {
  std::vector<AnnotationRecord> train, validation, test;
  std::vector<std::string> classes;

  std::optional<size_t> class_id(const std::string& label) const;
  const std::vector<AnnotationRecord>& subset(size_t i) const;
  static constexpr std::array<const char*, 3> kSubsetNames = {"train", "validation", "test"};
};

/// Errors (as findings) when subsets share signers, a class is missing from a
/// subset, or a record's label is outside the vocabulary.
ValidationReport validate_split(const DatasetSplit& split);

/// Keeps only records whose label occurs at least min_count times. min_count
/// must be >= 1.
std::vector<AnnotationRecord> filter_min_occurrences(const std::vector<AnnotationRecord>& records,
                                                     size_t min_count);

/// Chi-square distance between per-subset label histograms and the
/// ratio-scaled global histogram: sum over subsets and classes of
/// (count - ratio*global)^2 / (ratio*global). Lower is better balanced.
double split_objective(const std::array<std::map<std::string, size_t>, 3>& subset_hists,
                       const std::map<std::string, size_t>& global_hist,
                       const std::array<double, 3>& ratios);

/// Signer-grouped, label-stratified split. Signers are shuffled by seed,
/// stably sorted by descending example count, then greedily assigned to the
/// subset that minimizes split_objective; every subset ends up non-empty.
/// Requires >= 3 distinct signers and positive ratios summing to 1.
DatasetSplit stratified_group_split(const std::vector<AnnotationRecord>& records,
                                    const std::array<double, 3>& ratios, uint64_t seed);

/// Removes classes that are missing from any subset, everywhere, and
/// re-indexes the vocabulary contiguously. Signer assignment is untouched.
DatasetSplit drop_absent_classes(const DatasetSplit& split);

void save_split(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// materialized examples (sequences loaded and post-processed, labels as ids)
// ---------------------------------------------------------------------------

struct Example {
  KeypointSequence seq;
  size_t label = 0;
};

struct ExampleSet {
  std::vector<Example> train, validation, test;
  size_t class_count = 0;
};

/// Looks up each record's sequence in an in-memory corpus (file -> index),
/// applies the post-processing pipeline, and attaches class ids.
ExampleSet assemble_examples(const DatasetSplit& split,
                             const std::vector<AnnotationRecord>& corpus_records,
                             const std::vector<KeypointSequence>& corpus_sequences,
                             const SkeletonLayout& layout, const PipelineConfig& pipeline);

/// Same, reading KPSEQ files from a corpus directory.
ExampleSet load_examples(const DatasetSplit& split, const std::filesystem::path& corpus_root,
                         const SkeletonLayout& layout, const PipelineConfig& pipeline);

}  // namespace slrkit
