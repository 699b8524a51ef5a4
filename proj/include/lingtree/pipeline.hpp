#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lingtree/cluster.hpp"
#include "lingtree/corpus.hpp"
#include "lingtree/embedding.hpp"
#include "lingtree/geometry.hpp"
#include "lingtree/vocab.hpp"

#include <nlohmann/json_fwd.hpp>

namespace lingtree {

struct RunConfig {
  std::filesystem::path manifest_path;
  int k = 100;
  TrainConfig train;  // dim defaults to 100: the headline K=100, D=100 pairing
  SelectionRule rule = SelectionRule::SumRank;
  Linkage linkage = Linkage::Complete;
  bool normalize_slices = false;
  std::filesystem::path output_dir = "out";
  std::set<std::string> formats = {"csv", "newick", "ascii", "json"};
  bool full_precision_csv = false;
  bool cache_embeddings = true;  // content-addressed; deterministic models only
  std::filesystem::path cache_dir;  // empty: <output_dir>/cache
  TokenizerConfig tokenizer;
};

struct RunArtifacts {
  SharedVocabulary vocab;
  DistanceMatrix matrix;
  Dendrogram tree;
  ConsistencyReport consistency;
  std::vector<std::vector<std::string>> two_groups;
  int combined_length = 0;
  std::map<std::string, std::filesystem::path> files;  // artifact kind -> path
};

// Full pipeline: ingest -> shared vocabulary -> per-corpus embeddings ->
// combined vectors -> distance matrix -> tree -> reports. Artifacts land
// in config.output_dir; a run-metadata record is always written.
RunArtifacts run_pipeline(const RunConfig& config);

// Every knob that affects the run, as a flat record.
nlohmann::json run_metadata(const RunConfig& config);

nlohmann::json consistency_to_json(const ConsistencyReport& report);

struct SweepRun {
  int value = 0;
  bool ok = false;
  std::string error;
  DistanceMatrix matrix;
  Dendrogram tree;
  std::vector<std::vector<std::string>> root_split;  // 2-cluster cut
};

struct SweepComparison {
  int value_a = 0;
  int value_b = 0;
  bool root_split_match = false;
  MatrixDelta delta;
};

struct SweepReport {
  std::string parameter;  // "dim" or "k"
  std::vector<SweepRun> runs;
  std::vector<SweepComparison> comparisons;  // successful pairs only
  std::filesystem::path report_path;
};

// Per-value pipeline runs with a shared seed; per-value failures are
// recorded and do not abort the remaining values.
SweepReport sweep_dims(const RunConfig& config, const std::vector<int>& dims);
SweepReport sweep_ks(const RunConfig& config, const std::vector<int>& ks);

struct FixtureResult {
  DistanceMatrix matrix;       // as published
  bool strictly_valid = false; // invariants at 1e-9
  std::string validation_note;
  Dendrogram tree;
  std::vector<std::vector<std::string>> two_groups;
  ConsistencyReport consistency;
};

// Clusters a bundled reference matrix. A published rounding asymmetry
// within 1e-3 is averaged away (and noted); anything larger is an error.
FixtureResult run_fixture(const std::string& table_id, Linkage linkage);
void write_fixture_artifacts(const FixtureResult& result, const std::string& table_id,
                             const std::filesystem::path& output_dir);

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

}  // namespace lingtree
