#include "lingtree/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "lingtree/util.hpp"

namespace lingtree {

EmbeddingModel::EmbeddingModel(std::string corpus_id, std::vector<std::string> words,
                               RowMatrixXd vectors, TrainConfig config)
    : corpus_id_(std::move(corpus_id)),
      words_(std::move(words)),
      vectors_(std::move(vectors)),
      config_(config) {
  if (static_cast<Eigen::Index>(words_.size()) != vectors_.rows())
    throw data_error("embedding model: word list and vector rows disagree");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

bool EmbeddingModel::contains(std::string_view word) const {
  return index_.find(std::string(word)) != index_.end();
}

std::optional<Eigen::VectorXd> EmbeddingModel::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return Eigen::VectorXd(vectors_.row(it->second));
}

namespace {

struct Vocabulary {
  std::vector<std::string> words;  // count descending, ties lexicographic
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, int> index;
  std::uint64_t total = 0;  // total retained token occurrences
};

Vocabulary build_vocabulary(const TokenStream& stream, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& t : stream.tokens) ++counts[t];
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts)
    if (c >= min_count) kept.emplace_back(w, c);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  v.words.reserve(kept.size());
  v.counts.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    v.words.push_back(kept[i].first);
    v.counts.push_back(kept[i].second);
    v.index.emplace(kept[i].first, static_cast<int>(i));
    v.total += kept[i].second;
  }
  return v;
}

// Cumulative unigram^0.75 table for noise draws, sampled by binary search.
std::vector<double> noise_cdf(const Vocabulary& vocab) {
  std::vector<double> cdf(vocab.counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab.counts.size(); ++i) {
    acc += std::pow(static_cast<double>(vocab.counts[i]), 0.75);
    cdf[i] = acc;
  }
  return cdf;
}

int sample_noise(const std::vector<double>& cdf, std::mt19937_64& rng) {
  const double u = next_unit_double(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<int>(it - cdf.begin());
}

// word2vec-style keep probability for frequent-word downsampling.
double keep_probability(std::uint64_t count, std::uint64_t total, double threshold) {
  if (threshold <= 0.0) return 1.0;
  const double z = static_cast<double>(count) / static_cast<double>(total);
  const double p = (std::sqrt(z / threshold) + 1.0) * (threshold / z);
  return std::min(p, 1.0);
}

// The per-epoch training sequence: vocabulary indices of retained,
// possibly downsampled occurrences, in stream order.
std::vector<int> sample_sequence(const std::vector<int>& filtered, const Vocabulary& vocab,
                                 const TrainConfig& cfg, std::mt19937_64& rng) {
  std::vector<int> seq;
  seq.reserve(filtered.size());
  for (int w : filtered) {
    const double keep = keep_probability(vocab.counts[w], vocab.total, cfg.subsample_threshold);
    if (keep >= 1.0 || next_unit_double(rng) < keep) seq.push_back(w);
  }
  return seq;
}

struct Shard {
  std::size_t begin, end;
  std::uint64_t rng_seed;
};

}  // namespace

EmbeddingModel train_embedding(const TokenStream& stream, const TrainConfig& cfg,
                               TrainStats* stats) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.epochs < 1)
    throw usage_error("train config: dim, window and epochs must all be >= 1");

  Vocabulary vocab = build_vocabulary(stream, cfg.min_count);
  if (vocab.words.empty())
    throw data_error("corpus '" + stream.corpus_id + "': no words reach min_count=" +
                     std::to_string(cfg.min_count));

  std::vector<int> filtered;
  filtered.reserve(stream.tokens.size());
  for (const auto& t : stream.tokens) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) filtered.push_back(it->second);
  }
  const std::size_t min_len = 2 * static_cast<std::size_t>(cfg.window) + 1;
  if (filtered.size() < min_len)
    throw data_error("corpus '" + stream.corpus_id + "': only " +
                     std::to_string(filtered.size()) + " tokens survive min_count filtering; " +
                     "need at least " + std::to_string(min_len));

  const int dim = cfg.dim;
  const Eigen::Index v = static_cast<Eigen::Index>(vocab.words.size());
  RowMatrixXd input(v, dim);
  RowMatrixXd context = RowMatrixXd::Zero(v, dim);

  // Word vectors start at a position determined by (seed, word) alone, so
  // the same word begins identically in every corpus trained with this
  // seed. Cross-corpus cosine then measures how differently training
  // moved it, which is the signal the distance matrix is built from.
  const double half = 0.5 / dim;
  for (Eigen::Index i = 0; i < v; ++i) {
    std::mt19937_64 wrng(derive_seed(cfg.seed, "init:" + vocab.words[i]));
    for (int d = 0; d < dim; ++d) input(i, d) = (next_unit_double(wrng) * 2.0 - 1.0) * half;
  }

  const std::vector<double> cdf = noise_cdf(vocab);
  const double alpha0 = cfg.initial_learning_rate;
  const double alpha_floor = 1e-4 * alpha0;

  const unsigned hw = std::thread::hardware_concurrency();
  const int threads =
      cfg.deterministic ? 1 : static_cast<int>(std::clamp(hw, 1u, 8u));

  std::mt19937_64 seq_rng(derive_seed(cfg.seed, "sequence:" + stream.corpus_id));
  std::atomic<std::uint64_t> processed{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  if (stats) stats->epoch_mean_loss.clear();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<int> seq = sample_sequence(filtered, vocab, cfg, seq_rng);
    // Total positions drives the linear learning-rate decay; subsampled
    // sequences differ per epoch, so estimate from the filtered length.
    const std::uint64_t schedule_total =
        static_cast<std::uint64_t>(cfg.epochs) * std::max<std::size_t>(filtered.size(), 1);

    std::atomic<std::uint64_t> pair_count{0};
    std::atomic<double> loss_sum{0.0};

    auto work = [&](std::size_t begin, std::size_t end, std::uint64_t shard_seed) {
      std::mt19937_64 rng(shard_seed);
      Eigen::VectorXd accum(dim);
      double local_loss = 0.0;
      std::uint64_t local_pairs = 0;
      for (std::size_t pos = begin; pos < end && !failed.load(std::memory_order_relaxed); ++pos) {
        const std::uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
        const double alpha = std::max(
            alpha_floor, alpha0 * (1.0 - static_cast<double>(done) /
                                             (static_cast<double>(schedule_total) + 1.0)));
        const int center = seq[pos];
        const int b = next_int_in(rng, cfg.window);
        const std::size_t lo = pos >= static_cast<std::size_t>(b) ? pos - b : 0;
        const std::size_t hi = std::min(seq.size() - 1, pos + static_cast<std::size_t>(b));
        auto center_row = input.row(center);
        for (std::size_t q = lo; q <= hi; ++q) {
          if (q == pos) continue;
          const int pos_target = seq[q];
          accum.setZero();
          for (int d = 0; d <= cfg.negative_samples; ++d) {
            int target;
            int label;
            if (d == 0) {
              target = pos_target;
              label = 1;
            } else {
              target = sample_noise(cdf, rng);
              if (target == pos_target) continue;
              label = 0;
            }
            auto ctx_row = context.row(target);
            const double x = center_row.dot(ctx_row);
            if (!std::isfinite(x)) {
              std::lock_guard<std::mutex> lock(failure_mutex);
              failure = "non-finite activation at epoch " + std::to_string(epoch + 1) +
                        ", position " + std::to_string(pos);
              failed.store(true, std::memory_order_relaxed);
              return;
            }
            const double g = (static_cast<double>(label) - sigmoid(x)) * alpha;
            local_loss += label != 0 ? softplus(-x) : softplus(x);
            ++local_pairs;
            accum += g * ctx_row.transpose();
            ctx_row += g * center_row;
          }
          center_row += accum.transpose();
        }
      }
      loss_sum.fetch_add(local_loss, std::memory_order_relaxed);
      pair_count.fetch_add(local_pairs, std::memory_order_relaxed);
    };

    if (threads == 1) {
      work(0, seq.size(), derive_seed(cfg.seed, "train:" + stream.corpus_id + ":epoch:" +
                                                    std::to_string(epoch)));
    } else {
      std::vector<Shard> shards;
      const std::size_t chunk = (seq.size() + threads - 1) / threads;
      for (int t = 0; t < threads; ++t) {
        const std::size_t b = std::min(seq.size(), t * chunk);
        const std::size_t e = std::min(seq.size(), b + chunk);
        if (b < e)
          shards.push_back({b, e,
                            derive_seed(cfg.seed, "train:" + stream.corpus_id + ":epoch:" +
                                                      std::to_string(epoch) + ":shard:" +
                                                      std::to_string(t))});
      }
      std::vector<std::thread> pool;
      pool.reserve(shards.size());
      for (const auto& s : shards) pool.emplace_back(work, s.begin, s.end, s.rng_seed);
      for (auto& th : pool) th.join();
    }

    if (failed.load()) throw numeric_error("training failed: " + failure);
    if (stats) {
      const std::uint64_t pairs = pair_count.load();
      stats->epoch_mean_loss.push_back(pairs ? loss_sum.load() / static_cast<double>(pairs) : 0.0);
    }
  }

  if (!input.allFinite() || !context.allFinite())
    throw numeric_error("corpus '" + stream.corpus_id + "': non-finite vectors after training");

  return EmbeddingModel(stream.corpus_id, std::move(vocab.words), std::move(input), cfg);
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write model file: " + path.string());
  const TrainConfig& c = model.config();
  out << "lingtree embedding 1\n";
  out << "corpus " << model.corpus_id() << "\n";
  out << "dim " << model.dim() << "\n";
  out << "vocab " << model.vocab_size() << "\n";
  out << "config window=" << c.window << " epochs=" << c.epochs
      << " negative=" << c.negative_samples << " lr=" << format_exact(c.initial_learning_rate)
      << " min_count=" << c.min_count << " subsample=" << format_exact(c.subsample_threshold)
      << " seed=" << c.seed << " deterministic=" << (c.deterministic ? 1 : 0) << "\n";
  const auto& words = model.words();
  const auto& vecs = model.vectors();
  for (std::size_t i = 0; i < words.size(); ++i) {
    out << words[i];
    for (int d = 0; d < model.dim(); ++d) out << ' ' << format_exact(vecs(i, d));
    out << '\n';
  }
  if (!out) throw data_error("I/O failure writing: " + path.string());
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open model file: " + path.string());
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw data_error(path.string() + ": truncated model file (missing " + what + ")");
    return line;
  };

  if (next_line("header") != "lingtree embedding 1")
    throw data_error(path.string() + ": not a lingtree embedding file");

  auto field = [&](const char* key) {
    next_line(key);
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0)
      throw data_error(path.string() + ": expected '" + key + "' line");
    return line.substr(prefix.size());
  };

  TrainConfig cfg;
  const std::string corpus_id = field("corpus");
  const int dim = std::stoi(field("dim"));
  const long vocab_size = std::stol(field("vocab"));
  std::istringstream cs(field("config"));
  std::string kv;
  while (cs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw data_error(path.string() + ": malformed config entry");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "window")
      cfg.window = std::stoi(val);
    else if (key == "epochs")
      cfg.epochs = std::stoi(val);
    else if (key == "negative")
      cfg.negative_samples = std::stoi(val);
    else if (key == "lr")
      cfg.initial_learning_rate = std::strtod(val.c_str(), nullptr);
    else if (key == "min_count")
      cfg.min_count = std::stoull(val);
    else if (key == "subsample")
      cfg.subsample_threshold = std::strtod(val.c_str(), nullptr);
    else if (key == "seed")
      cfg.seed = std::stoull(val);
    else if (key == "deterministic")
      cfg.deterministic = val != "0";
    else
      throw data_error(path.string() + ": unknown config key '" + key + "'");
  }
  cfg.dim = dim;

  std::vector<std::string> words;
  words.reserve(vocab_size);
  RowMatrixXd vectors(vocab_size, dim);
  for (long i = 0; i < vocab_size; ++i) {
    next_line("vector record");
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) throw data_error(path.string() + ": empty vector record");
    for (int d = 0; d < dim; ++d) {
      std::string num;
      if (!(ls >> num))
        throw data_error(path.string() + ": vector record for '" + word + "' is too short");
      vectors(i, d) = std::strtod(num.c_str(), nullptr);
    }
    words.push_back(std::move(word));
  }
  return EmbeddingModel(corpus_id, std::move(words), std::move(vectors), cfg);
}

}  // namespace lingtree
