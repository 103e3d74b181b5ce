#include "slrkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

#include "slrkit/errors.hpp"
#include "slrkit/rng.hpp"
#include "slrkit/sequence_io.hpp"

namespace slrkit {

std::optional<size_t> DatasetSplit::class_id(const std::string& label) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return std::nullopt;
  return static_cast<size_t>(it - classes.begin());
}

const std::vector<AnnotationRecord>& DatasetSplit::subset(size_t i) const {
  switch (i) {
    case 0: return train;
    case 1: return validation;
    default: return test;
  }
}

ValidationReport validate_split(const DatasetSplit& split) {
  ValidationReport report;
  std::array<std::set<std::string>, 3> signers;
  std::array<std::set<std::string>, 3> labels;
  for (size_t s = 0; s < 3; ++s) {
    for (const auto& r : split.subset(s)) {
      signers[s].insert(r.signer_id);
      labels[s].insert(r.gloss_label);
      if (!split.class_id(r.gloss_label))
        report.findings.push_back({Severity::error, std::string(DatasetSplit::kSubsetNames[s]) +
                                                        " record '" + r.file + "' has label '" +
                                                        r.gloss_label +
                                                        "' outside the vocabulary"});
    }
    if (split.subset(s).empty())
      report.findings.push_back(
          {Severity::error, std::string(DatasetSplit::kSubsetNames[s]) + " subset is empty"});
  }
  for (size_t a = 0; a < 3; ++a) {
    for (size_t b = a + 1; b < 3; ++b) {
      for (const auto& sg : signers[a]) {
        if (signers[b].count(sg))
          report.findings.push_back({Severity::error,
                                     "signer '" + sg + "' appears in both " +
                                         DatasetSplit::kSubsetNames[a] + " and " +
                                         DatasetSplit::kSubsetNames[b]});
      }
    }
  }
  for (const auto& cls : split.classes) {
    for (size_t s = 0; s < 3; ++s) {
      if (!labels[s].count(cls))
        report.findings.push_back({Severity::error, "class '" + cls + "' missing from " +
                                                        DatasetSplit::kSubsetNames[s]});
    }
  }
  if (!std::is_sorted(split.classes.begin(), split.classes.end()))
    report.findings.push_back({Severity::error, "class vocabulary is not sorted"});
  return report;
}

std::vector<AnnotationRecord> filter_min_occurrences(const std::vector<AnnotationRecord>& records,
                                                     size_t min_count) {
  if (min_count < 1) throw ContractError("min_count must be >= 1");
  std::map<std::string, size_t> counts;
  for (const auto& r : records) ++counts[r.gloss_label];
  std::vector<AnnotationRecord> kept;
  for (const auto& r : records) {
    if (counts[r.gloss_label] >= min_count) kept.push_back(r);
  }
  return kept;
}

double split_objective(const std::array<std::map<std::string, size_t>, 3>& subset_hists,
                       const std::map<std::string, size_t>& global_hist,
                       const std::array<double, 3>& ratios) {
  double d = 0.0;
  for (size_t s = 0; s < 3; ++s) {
    for (const auto& [label, global_count] : global_hist) {
      const double expected = ratios[s] * static_cast<double>(global_count);
      const auto it = subset_hists[s].find(label);
      const double observed = it == subset_hists[s].end() ? 0.0 : static_cast<double>(it->second);
      const double diff = observed - expected;
      d += diff * diff / expected;
    }
  }
  return d;
}

DatasetSplit stratified_group_split(const std::vector<AnnotationRecord>& records,
                                    const std::array<double, 3>& ratios, uint64_t seed) {
  double ratio_sum = 0.0;
  for (double r : ratios) {
    if (r <= 0.0) throw ContractError("split ratios must be positive");
    ratio_sum += r;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) throw ContractError("split ratios must sum to 1");

  // per-signer label histograms
  std::map<std::string, std::map<std::string, size_t>> by_signer;
  std::map<std::string, size_t> global_hist;
  for (const auto& r : records) {
    ++by_signer[r.signer_id][r.gloss_label];
    ++global_hist[r.gloss_label];
  }
  if (by_signer.size() < 3)
    throw ContractError("need at least 3 distinct signers to split, got " +
                        std::to_string(by_signer.size()));

  std::vector<std::string> order;
  order.reserve(by_signer.size());
  for (const auto& [signer, _] : by_signer) order.push_back(signer);
  Rng rng(Rng::derive(seed, 0x73706c6974ULL));  // "split" stream
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    size_t ca = 0, cb = 0;
    for (const auto& [_, n] : by_signer[a]) ca += n;
    for (const auto& [_, n] : by_signer[b]) cb += n;
    return ca > cb;
  });

  std::array<std::map<std::string, size_t>, 3> hists;
  std::array<bool, 3> used{false, false, false};
  std::map<std::string, size_t> assignment;
  for (size_t i = 0; i < order.size(); ++i) {
    const auto& signer_hist = by_signer[order[i]];
    const size_t remaining = order.size() - i;
    const size_t empty_subsets =
        static_cast<size_t>(!used[0]) + static_cast<size_t>(!used[1]) + static_cast<size_t>(!used[2]);
    double best = 0.0;
    size_t best_subset = 3;
    for (size_t s = 0; s < 3; ++s) {
      // keep enough signers in reserve to leave no subset empty
      if (remaining == empty_subsets && used[s]) continue;
      auto trial = hists;
      for (const auto& [label, n] : signer_hist) trial[s][label] += n;
      const double d = split_objective(trial, global_hist, ratios);
      if (best_subset == 3 || d < best) {
        best = d;
        best_subset = s;
      }
    }
    assignment[order[i]] = best_subset;
    used[best_subset] = true;
    for (const auto& [label, n] : signer_hist) hists[best_subset][label] += n;
  }

  DatasetSplit split;
  for (const auto& r : records) {
    switch (assignment[r.signer_id]) {
      case 0: split.train.push_back(r); break;
      case 1: split.validation.push_back(r); break;
      default: split.test.push_back(r); break;
    }
  }
  std::set<std::string> labels;
  for (const auto& r : records) labels.insert(r.gloss_label);
  split.classes.assign(labels.begin(), labels.end());
  return split;
}

DatasetSplit drop_absent_classes(const DatasetSplit& split) {
  std::array<std::set<std::string>, 3> labels;
  for (size_t s = 0; s < 3; ++s) {
    for (const auto& r : split.subset(s)) labels[s].insert(r.gloss_label);
  }
  std::set<std::string> surviving;
  for (const auto& cls : labels[0]) {
    if (labels[1].count(cls) && labels[2].count(cls)) surviving.insert(cls);
  }
  DatasetSplit out;
  auto keep = [&](const std::vector<AnnotationRecord>& in) {
    std::vector<AnnotationRecord> kept;
    for (const auto& r : in) {
      if (surviving.count(r.gloss_label)) kept.push_back(r);
    }
    return kept;
  };
  out.train = keep(split.train);
  out.validation = keep(split.validation);
  out.test = keep(split.test);
  out.classes.assign(surviving.begin(), surviving.end());
  return out;
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
  nlohmann::json j;
  j["classes"] = split.classes;
  for (size_t s = 0; s < 3; ++s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : split.subset(s)) {
      arr.push_back({{"file", r.file}, {"label", r.gloss_label}, {"signer", r.signer_id}});
    }
    j[DatasetSplit::kSubsetNames[s]] = std::move(arr);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write split: " + path.string());
  out << j.dump(2) << '\n';
}

DatasetSplit load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  DatasetSplit split;
  try {
    split.classes = j.at("classes").get<std::vector<std::string>>();
    auto read_subset = [&](const char* name, std::vector<AnnotationRecord>& out_records) {
      for (const auto& r : j.at(name)) {
        out_records.push_back({r.at("file").get<std::string>(), r.at("label").get<std::string>(),
                               r.at("signer").get<std::string>()});
      }
    };
    read_subset("train", split.train);
    read_subset("validation", split.validation);
    read_subset("test", split.test);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return split;
}

// ---------------------------------------------------------------------------
// example assembly
// ---------------------------------------------------------------------------

namespace {

ExampleSet assemble_impl(const DatasetSplit& split, const SkeletonLayout& layout,
                         const PipelineConfig& pipeline,
                         const std::function<const KeypointSequence&(const AnnotationRecord&)>& fetch) {
  ExampleSet set;
  set.class_count = split.classes.size();
  auto build = [&](const std::vector<AnnotationRecord>& records, std::vector<Example>& out) {
    out.reserve(records.size());
    for (const auto& r : records) {
      const auto id = split.class_id(r.gloss_label);
      if (!id)
        throw ContractError("record '" + r.file + "' has label '" + r.gloss_label +
                            "' outside the split vocabulary");
      out.push_back({postprocess(fetch(r), layout, pipeline), *id});
    }
  };
  build(split.train, set.train);
  build(split.validation, set.validation);
  build(split.test, set.test);
  return set;
}

}  // namespace

ExampleSet assemble_examples(const DatasetSplit& split,
                             const std::vector<AnnotationRecord>& corpus_records,
                             const std::vector<KeypointSequence>& corpus_sequences,
                             const SkeletonLayout& layout, const PipelineConfig& pipeline) {
  if (corpus_records.size() != corpus_sequences.size())
    throw ContractError("corpus records/sequences size mismatch");
  std::map<std::string, size_t> by_file;
  for (size_t i = 0; i < corpus_records.size(); ++i) by_file[corpus_records[i].file] = i;
  return assemble_impl(split, layout, pipeline,
                       [&](const AnnotationRecord& r) -> const KeypointSequence& {
                         const auto it = by_file.find(r.file);
                         if (it == by_file.end())
                           throw ContractError("record '" + r.file + "' not found in the corpus");
                         return corpus_sequences[it->second];
                       });
}

ExampleSet load_examples(const DatasetSplit& split, const std::filesystem::path& corpus_root,
                         const SkeletonLayout& layout, const PipelineConfig& pipeline) {
  // cache: records may reference the same file more than once
  std::map<std::string, KeypointSequence> cache;
  return assemble_impl(split, layout, pipeline,
                       [&](const AnnotationRecord& r) -> const KeypointSequence& {
                         auto it = cache.find(r.file);
                         if (it == cache.end())
                           it = cache.emplace(r.file, read_sequence(corpus_root / r.file)).first;
                         return it->second;
                       });
}

}  // namespace slrkit
