#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lingtree/corpus.hpp"
#include "lingtree/errors.hpp"

namespace lingtree {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TrainConfig {
  int dim = 100;
  int window = 5;
  int epochs = 5;
  int negative_samples = 5;
  double initial_learning_rate = 0.025;
  std::uint64_t min_count = 5;
  double subsample_threshold = 1e-3;  // 0 disables frequent-word downsampling
  std::uint64_t seed = 1;
  bool deterministic = true;  // false allows lock-free parallel updates
};

// Word -> vector map over the min_count-filtered vocabulary of one corpus.
class EmbeddingModel {
 public:
  EmbeddingModel(std::string corpus_id, std::vector<std::string> words, RowMatrixXd vectors,
                 TrainConfig config);

  const std::string& corpus_id() const { return corpus_id_; }
  int dim() const { return static_cast<int>(vectors_.cols()); }
  std::size_t vocab_size() const { return words_.size(); }
  const TrainConfig& config() const { return config_; }
  const std::vector<std::string>& words() const { return words_; }
  const RowMatrixXd& vectors() const { return vectors_; }

  bool contains(std::string_view word) const;
  // Absence is a value: words below min_count simply have no vector.
  std::optional<Eigen::VectorXd> lookup(std::string_view word) const;

 private:
  std::string corpus_id_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  RowMatrixXd vectors_;
  TrainConfig config_;
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;
};

// Skip-gram with negative sampling over the min_count-filtered stream:
// dynamic windows, unigram^0.75 noise, logistic loss, linearly decayed
// learning rate with a floor at 1e-4 of the initial rate.
//
// Initial word vectors are derived from (config.seed, word), not from the
// corpus, so models trained with one seed start in a common frame and
// their distances are comparable across corpora. Sampling randomness is
// derived from (config.seed, corpus_id).
//
// With deterministic=true the result is bit-reproducible for identical
// (stream, config).
EmbeddingModel train_embedding(const TokenStream& stream, const TrainConfig& config,
                               TrainStats* stats = nullptr);

// Overflow-safe log(1 + e^x).
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

template <typename Scalar>
struct SgnsGradient {
  Eigen::Vector<Scalar, Eigen::Dynamic> grad_center;
  Eigen::Vector<Scalar, Eigen::Dynamic> grad_context;
  Scalar loss;
};

// Loss and exact analytic partials for one (center, context, label) pair:
//   label 1:  loss = -log sigmoid( center.context)
//   label 0:  loss = -log sigmoid(-center.context)
template <typename DerivedA, typename DerivedB>
SgnsGradient<typename DerivedA::Scalar> sgns_gradient(const Eigen::MatrixBase<DerivedA>& center,
                                                      const Eigen::MatrixBase<DerivedB>& context,
                                                      int label) {
  using Scalar = typename DerivedA::Scalar;
  if (center.size() != context.size())
    throw data_error("sgns_gradient: vector lengths differ");
  const Scalar x = center.dot(context);
  const Scalar p = static_cast<Scalar>(sigmoid(static_cast<double>(x)));
  const Scalar g = p - static_cast<Scalar>(label);
  SgnsGradient<Scalar> out;
  out.grad_center = g * context;
  out.grad_context = g * center;
  out.loss = static_cast<Scalar>(label != 0 ? softplus(-static_cast<double>(x))
                                            : softplus(static_cast<double>(x)));
  return out;
}

// Text model format; round-trips exactly (vectors printed with 17
// significant digits).
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_model(const std::filesystem::path& path);

}  // namespace lingtree
