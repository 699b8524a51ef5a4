#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lingtree {

// Seeded synthetic corpora whose generating bigram model drifts linearly
// over a timeline, giving the pipeline a controllable ground truth.
struct DriftSpec {
  int vocab_size = 300;
  std::vector<int> timeline;     // strictly increasing years
  int tokens_per_corpus = 50000;
  double drift_rate = 1.0;       // in [0, 1]
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  std::string id;  // the year, as text
  int year = 0;
  std::string text;
};

// Letters-only pseudo-word for vocabulary slot `index`; injective.
std::string synth_word(int index);

// Row-stochastic transition matrix in effect at `year`: a linear
// interpolation between a start and an end matrix, with interpolation
// fraction drift_rate * (year - first) / (last - first). Rows are
// Zipf(1.0)-weighted with multiplicative noise, so the frequent-word head
// is shared across the whole timeline.
Eigen::MatrixXd transition_matrix(const DriftSpec& spec, int year);

// Fully determined by spec.seed. Throws usage_error on precondition
// violations (vocab_size >= 50, tokens_per_corpus >= 10 * vocab_size,
// strictly increasing timeline, drift_rate in [0, 1]).
std::vector<SyntheticCorpus> generate(const DriftSpec& spec);

// Writes one text file per corpus plus a manifest that exercises the
// production ingestion path. Returns the manifest path.
std::filesystem::path write_corpus_files(const DriftSpec& spec,
                                         const std::filesystem::path& dir);

}  // namespace lingtree
