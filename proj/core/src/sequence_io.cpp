#include "slrkit/sequence_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "slrkit/errors.hpp"

namespace slrkit {

namespace {

constexpr const char* kMagic = "KPSEQ 1";

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& path, size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(path, line, "bad number '" + tok + "'");
  }
  return v;
}

size_t parse_size(const std::string& tok, const std::string& path, size_t line) {
  size_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(path, line, "bad integer '" + tok + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

KeypointSequence read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string pstr = path.string();
  if (!in) throw IoError("cannot open '" + pstr + "'");

  std::string line;
  size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line() || line != kMagic) throw ParseError(pstr, lineno, "missing KPSEQ 1 header");

  KeypointSequence seq;
  bool have_layout = false, have_t = false, have_k = false, have_d = false;
  bool with_confidence = false;
  const SkeletonLayout* layout = nullptr;

  // header section; terminated by the first "frame" line
  while (true) {
    if (!next_line()) throw ParseError(pstr, lineno, "truncated file: no frame records");
    if (line.rfind("frame ", 0) == 0) break;
    const auto sep = line.find(' ');
    if (sep == std::string::npos) throw ParseError(pstr, lineno, "bad header line '" + line + "'");
    const std::string key = line.substr(0, sep);
    const std::string value = line.substr(sep + 1);
    if (key == "layout") {
      layout = find_layout(value);
      if (!layout) throw UnknownLayoutError(pstr, lineno, value);
      seq.layout_id = value;
      have_layout = true;
    } else if (key == "T") {
      seq.frames = parse_size(value, pstr, lineno);
      have_t = true;
    } else if (key == "K") {
      seq.keypoints = parse_size(value, pstr, lineno);
      have_k = true;
    } else if (key == "D") {
      seq.dims = parse_size(value, pstr, lineno);
      have_d = true;
    } else if (key == "confidence") {
      with_confidence = parse_size(value, pstr, lineno) != 0;
    } else if (key == "label") {
      seq.label = value;
    } else if (key == "signer") {
      seq.signer_id = value;
    } else {
      throw ParseError(pstr, lineno, "unknown header key '" + key + "'");
    }
  }
  if (!have_layout || !have_t || !have_k || !have_d) {
    throw ParseError(pstr, lineno, "incomplete header (layout/T/K/D required)");
  }
  if (seq.frames == 0) throw ParseError(pstr, lineno, "T must be >= 1");
  if (seq.dims == 0) throw ParseError(pstr, lineno, "D must be >= 1");

  seq.coords.assign(seq.frames * seq.keypoints * seq.dims, 0.0);
  seq.present.assign(seq.frames * seq.keypoints, 0);
  if (with_confidence) seq.confidence.assign(seq.frames * seq.keypoints, 0.0);

  for (size_t t = 0; t < seq.frames; ++t) {
    if (t > 0 && !next_line()) {
      throw ParseError(pstr, lineno, "truncated file: expected frame " + std::to_string(t));
    }
    const auto tokens = split_ws(line);
    if (tokens.size() < 2 || tokens[0] != "frame" ||
        tokens[1] != std::to_string(t) + ":") {
      throw ParseError(pstr, lineno, "expected 'frame " + std::to_string(t) + ":'");
    }
    size_t pos = 2;
    for (size_t k = 0; k < seq.keypoints; ++k) {
      if (pos >= tokens.size()) throw ParseError(pstr, lineno, "frame record too short");
      if (tokens[pos] == "_") {
        ++pos;
        continue;
      }
      const size_t cell = seq.dims + (with_confidence ? 1 : 0);
      if (pos + cell > tokens.size()) throw ParseError(pstr, lineno, "frame record too short");
      for (size_t d = 0; d < seq.dims; ++d) {
        seq.at(t, k, d) = parse_double(tokens[pos + d], pstr, lineno);
      }
      if (with_confidence) {
        seq.confidence[t * seq.keypoints + k] = parse_double(tokens[pos + seq.dims], pstr, lineno);
      }
      seq.set_present(t, k, true);
      pos += cell;
    }
    if (pos != tokens.size()) throw ParseError(pstr, lineno, "trailing tokens in frame record");
  }
  return seq;
}

void write_sequence(const KeypointSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << kMagic << "\n";
  out << "layout " << seq.layout_id << "\n";
  out << "T " << seq.frames << "\n";
  out << "K " << seq.keypoints << "\n";
  out << "D " << seq.dims << "\n";
  out << "confidence " << (seq.has_confidence() ? 1 : 0) << "\n";
  if (seq.label) out << "label " << *seq.label << "\n";
  if (seq.signer_id) out << "signer " << *seq.signer_id << "\n";
  for (size_t t = 0; t < seq.frames; ++t) {
    out << "frame " << t << ":";
    for (size_t k = 0; k < seq.keypoints; ++k) {
      if (!seq.is_present(t, k)) {
        out << " _";
        continue;
      }
      for (size_t d = 0; d < seq.dims; ++d) out << ' ' << format_double(seq.at(t, k, d));
      if (seq.has_confidence()) out << ' ' << format_double(seq.confidence[t * seq.keypoints + k]);
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void apply_ingest_rules(KeypointSequence& seq, const SkeletonLayout& layout) {
  if (layout.family == EstimatorFamily::openpose) {
    for (size_t t = 0; t < seq.frames; ++t) {
      for (size_t k = 0; k < seq.keypoints; ++k) {
        if (!seq.is_present(t, k)) continue;
        bool all_zero = true;
        for (size_t d = 0; d < seq.dims; ++d) all_zero = all_zero && seq.at(t, k, d) == 0.0;
        const double conf = seq.has_confidence() ? seq.confidence[t * seq.keypoints + k] : 1.0;
        if (all_zero && conf == 0.0) {
          seq.set_present(t, k, false);
          for (size_t d = 0; d < seq.dims; ++d) seq.at(t, k, d) = 0.0;
        }
      }
    }
  } else if (layout.family == EstimatorFamily::mmpose) {
    // mmpose reports every keypoint with a confidence; there is no absence
    for (size_t i = 0; i < seq.present.size(); ++i) seq.present[i] = 1;
  }
}

std::vector<AnnotationRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string pstr = path.string();
  if (!in) throw IoError("cannot open '" + pstr + "'");
  std::vector<AnnotationRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw ParseError(pstr, lineno, "expected 'file<TAB>label<TAB>signer'");
    }
    AnnotationRecord r;
    r.file = line.substr(0, tab1);
    r.gloss_label = line.substr(tab1 + 1, tab2 - tab1 - 1);
    r.signer_id = line.substr(tab2 + 1);
    if (r.file.empty()) throw ParseError(pstr, lineno, "empty file field");
    if (r.gloss_label.empty()) throw ParseError(pstr, lineno, "empty gloss label");
    if (r.signer_id.empty()) throw ParseError(pstr, lineno, "empty signer id");
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::vector<AnnotationRecord>& records,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& r : records) {
    out << r.file << '\t' << r.gloss_label << '\t' << r.signer_id << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace slrkit
