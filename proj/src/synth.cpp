#include "lingtree/synth.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "lingtree/errors.hpp"
#include "lingtree/util.hpp"

namespace lingtree {
namespace {

// Multiplicative noise scale on the Zipf row weights. Large enough that
// the start and end bigram models are clearly distinct corpora.
constexpr double kRowNoiseSigma = 1.25;

void check_spec(const DriftSpec& spec) {
  if (spec.vocab_size < 50) throw usage_error("synth: vocab_size must be >= 50");
  if (spec.tokens_per_corpus < 10 * spec.vocab_size)
    throw usage_error("synth: tokens_per_corpus must be >= 10 * vocab_size");
  if (spec.timeline.size() < 2) throw usage_error("synth: timeline needs at least 2 years");
  for (std::size_t i = 1; i < spec.timeline.size(); ++i)
    if (spec.timeline[i] <= spec.timeline[i - 1])
      throw usage_error("synth: timeline must be strictly increasing");
  if (spec.drift_rate < 0.0 || spec.drift_rate > 1.0)
    throw usage_error("synth: drift_rate must lie in [0, 1]");
}

// Box-Muller from the engine's own unit doubles, so draws are identical
// on every platform.
double next_normal(std::mt19937_64& rng) {
  double u1 = next_unit_double(rng);
  while (u1 <= 0.0) u1 = next_unit_double(rng);
  const double u2 = next_unit_double(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd zipf_weights(int n) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = 1.0 / static_cast<double>(i + 1);
  return w / w.sum();
}

// One endpoint of the drift: Zipf rows perturbed by seeded log-normal
// noise, normalized row-stochastic.
Eigen::MatrixXd endpoint_matrix(const DriftSpec& spec, const char* tag) {
  const int v = spec.vocab_size;
  const Eigen::VectorXd zipf = zipf_weights(v);
  std::mt19937_64 rng(derive_seed(spec.seed, std::string("synth:") + tag));
  Eigen::MatrixXd t(v, v);
  for (int i = 0; i < v; ++i) {
    for (int j = 0; j < v; ++j) t(i, j) = zipf(j) * std::exp(kRowNoiseSigma * next_normal(rng));
    t.row(i) /= t.row(i).sum();
  }
  return t;
}

double interpolation_fraction(const DriftSpec& spec, int year) {
  const double first = spec.timeline.front();
  const double last = spec.timeline.back();
  return spec.drift_rate * (static_cast<double>(year) - first) / (last - first);
}

int sample_row(const Eigen::VectorXd& cdf, std::mt19937_64& rng) {
  const double u = next_unit_double(rng) * cdf(cdf.size() - 1);
  int lo = 0, hi = static_cast<int>(cdf.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (cdf(mid) > u)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

Eigen::VectorXd cumulative(const Eigen::VectorXd& p) {
  Eigen::VectorXd cdf(p.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    cdf(i) = acc;
  }
  return cdf;
}

}  // namespace

std::string synth_word(int index) {
  static constexpr char kConsonants[] = "bcdfghjklmnpqrstvwz";  // 19
  static constexpr char kVowels[] = "aeiou";                    // 5
  constexpr int kSyllables = 19 * 5;
  std::string word;
  int rest = index;
  do {
    const int s = rest % kSyllables;
    word.insert(0, {kConsonants[s / 5], kVowels[s % 5]});
    rest = rest / kSyllables - 1;
  } while (rest >= 0);
  return word;
}

Eigen::MatrixXd transition_matrix(const DriftSpec& spec, int year) {
  check_spec(spec);
  const double a = interpolation_fraction(spec, year);
  // Linear interpolation of row-stochastic matrices stays row-stochastic.
  return (1.0 - a) * endpoint_matrix(spec, "start") + a * endpoint_matrix(spec, "end");
}

std::vector<SyntheticCorpus> generate(const DriftSpec& spec) {
  check_spec(spec);
  const int v = spec.vocab_size;
  const Eigen::MatrixXd start = endpoint_matrix(spec, "start");
  const Eigen::MatrixXd end = endpoint_matrix(spec, "end");
  const Eigen::VectorXd unigram_cdf = cumulative(zipf_weights(v));

  std::vector<std::string> words(v);
  for (int i = 0; i < v; ++i) words[i] = synth_word(i);

  std::vector<SyntheticCorpus> out;
  out.reserve(spec.timeline.size());
  for (int year : spec.timeline) {
    const double a = interpolation_fraction(spec, year);
    const Eigen::MatrixXd t = (1.0 - a) * start + a * end;
    std::vector<Eigen::VectorXd> row_cdfs;
    row_cdfs.reserve(v);
    for (int i = 0; i < v; ++i) row_cdfs.push_back(cumulative(t.row(i)));

    std::mt19937_64 rng(derive_seed(spec.seed, "synth:corpus:" + std::to_string(year)));
    SyntheticCorpus corpus;
    corpus.id = std::to_string(year);
    corpus.year = year;
    corpus.text.reserve(static_cast<std::size_t>(spec.tokens_per_corpus) * 7);

    int state = sample_row(unigram_cdf, rng);
    for (int tok = 0; tok < spec.tokens_per_corpus; ++tok) {
      corpus.text += words[state];
      corpus.text += (tok + 1) % 16 == 0 ? '\n' : ' ';
      state = sample_row(row_cdfs[state], rng);
    }
    if (!corpus.text.empty()) corpus.text.back() = '\n';
    out.push_back(std::move(corpus));
  }
  return out;
}

std::filesystem::path write_corpus_files(const DriftSpec& spec,
                                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::vector<SyntheticCorpus> corpora = generate(spec);

  for (const auto& c : corpora) {
    const std::filesystem::path p = dir / ("corpus_" + c.id + ".txt");
    std::ofstream out(p, std::ios::binary);
    if (!out) throw data_error("cannot write corpus file: " + p.string());
    out << c.text;
    if (!out) throw data_error("I/O failure writing: " + p.string());
  }

  const std::filesystem::path manifest_path = dir / "manifest.txt";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw data_error("cannot write manifest: " + manifest_path.string());
  manifest << "# synthetic drift corpora (seed " << spec.seed << ", drift "
           << format_double(spec.drift_rate) << ")\n";
  for (const auto& c : corpora) {
    manifest << "corpus " << c.id << "\n";
    manifest << "  year " << c.year << "\n";
    manifest << "  path corpus_" << c.id << ".txt\n";
  }
  if (!manifest) throw data_error("I/O failure writing: " + manifest_path.string());
  return manifest_path;
}

}  // namespace lingtree
