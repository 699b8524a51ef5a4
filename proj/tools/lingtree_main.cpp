#include <CLI11.hpp>

#include <iostream>

#include <nlohmann/json.hpp>

#include "lingtree/cluster.hpp"
#include "lingtree/corpus.hpp"
#include "lingtree/embedding.hpp"
#include "lingtree/errors.hpp"
#include "lingtree/fixtures.hpp"
#include "lingtree/geometry.hpp"
#include "lingtree/pipeline.hpp"
#include "lingtree/synth.hpp"
#include "lingtree/util.hpp"
#include "lingtree/vocab.hpp"

namespace {

using namespace lingtree;

struct CliOptions {
  RunConfig run;
  std::string linkage = "complete";
  std::string rule = "sum_rank";
  std::vector<std::string> formats;
  std::string stopwords_path;
  bool parallel = false;
  bool no_cache = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt, bool needs_manifest) {
  auto* manifest = cmd->add_option("--manifest", opt.run.manifest_path, "corpus manifest file");
  if (needs_manifest) manifest->required();
  cmd->add_option("--k", opt.run.k, "number of shared high-frequency words")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--dim", opt.run.train.dim, "word vector dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--window", opt.run.train.window, "context window size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epochs", opt.run.train.epochs, "training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--negative", opt.run.train.negative_samples, "negative samples per pair")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--min-count", opt.run.train.min_count, "minimum word count for the vocabulary")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lr", opt.run.train.initial_learning_rate, "initial learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--subsample", opt.run.train.subsample_threshold,
                  "frequent-word downsampling threshold (0 disables)");
  cmd->add_option("--seed", opt.run.train.seed, "top-level RNG seed");
  cmd->add_option("--linkage", opt.linkage, "single | complete | average");
  cmd->add_option("--rule", opt.rule, "shared-word ranking: sum_rank | min_rank");
  cmd->add_option("--out", opt.run.output_dir, "output directory")->envname("LINGTREE_OUT");
  cmd->add_option("--format", opt.formats, "artifact formats: csv newick ascii json")
      ->delimiter(',');
  cmd->add_option("--stopwords", opt.stopwords_path, "file with one stopword per line");
  cmd->add_flag("--split-apostrophes", [&opt](std::int64_t) {
    opt.run.tokenizer.keep_apostrophes = false;
  }, "treat apostrophes as separators");
  cmd->add_flag("--normalize", opt.run.normalize_slices,
                "L2-normalize each word slice before concatenation (off: plain concatenation)");
  cmd->add_flag("--full-precision", opt.run.full_precision_csv,
                "write matrix CSVs with 17 significant digits instead of 3 decimals");
  cmd->add_flag("--parallel", opt.parallel,
                "allow lock-free parallel training (not bit-reproducible)");
  cmd->add_flag("--no-cache", opt.no_cache, "disable the embedding cache");
}

void finalize(CliOptions& opt) {
  opt.run.linkage = linkage_from_string(opt.linkage);
  opt.run.rule = selection_rule_from_string(opt.rule);
  if (!opt.formats.empty()) opt.run.formats.assign(opt.formats.begin(), opt.formats.end());
  for (const auto& f : opt.run.formats)
    if (f != "csv" && f != "newick" && f != "ascii" && f != "json")
      throw usage_error("unknown format '" + f + "' (expected csv, newick, ascii or json)");
  if (!opt.stopwords_path.empty())
    opt.run.tokenizer.stopwords = load_stopwords(opt.stopwords_path);
  opt.run.train.deterministic = !opt.parallel;
  opt.run.cache_embeddings = !opt.no_cache;
}

void print_partition(std::ostream& out, const std::vector<std::vector<std::string>>& groups) {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out << "  group " << g + 1 << ":";
    for (const auto& label : groups[g]) out << ' ' << label;
    out << '\n';
  }
}

int cmd_run(CliOptions& opt) {
  finalize(opt);
  const RunArtifacts artifacts = run_pipeline(opt.run);
  std::cout << "corpora: " << artifacts.matrix.labels.size()
            << ", combined vector length: " << artifacts.combined_length << "\n";
  const Merge& first = artifacts.tree.merges.front();
  std::cout << "first merge: (" << artifacts.tree.labels[first.left] << ", "
            << artifacts.tree.labels[first.right] << ") at " << format_double(first.height)
            << "\n";
  if (artifacts.consistency.spearman_rho)
    std::cout << "temporal consistency (spearman rho): "
              << format_double(*artifacts.consistency.spearman_rho) << "\n";
  else
    std::cout << "temporal consistency: undefined (no variation)\n";
  std::cout << "two-group split:\n";
  print_partition(std::cout, artifacts.two_groups);
  for (const auto& [kind, path] : artifacts.files)
    std::cout << kind << ": " << path.string() << "\n";
  return 0;
}

int report_sweep(const SweepReport& report) {
  for (const auto& r : report.runs) {
    if (r.ok)
      std::cout << report.parameter << "=" << r.value << ": " << to_newick(r.tree) << "\n";
    else
      std::cout << report.parameter << "=" << r.value << ": error: " << r.error << "\n";
  }
  for (const auto& c : report.comparisons) {
    std::cout << report.parameter << " " << c.value_a << " vs " << c.value_b
              << ": root split " << (c.root_split_match ? "matches" : "differs")
              << ", delta max_abs=" << format_double(c.delta.max_abs)
              << " mean_abs=" << format_double(c.delta.mean_abs) << "\n";
  }
  std::cout << "report: " << report.report_path.string() << "\n";
  bool any_ok = false;
  for (const auto& r : report.runs) any_ok = any_ok || r.ok;
  return any_ok ? 0 : 2;
}

int cmd_fixture(CliOptions& opt, const std::string& table_id) {
  finalize(opt);
  const FixtureResult result = run_fixture(table_id, opt.run.linkage);
  std::cout << result.validation_note << "\n";
  const Merge& first = result.tree.merges.front();
  std::cout << "first merge: (" << result.tree.labels[first.left] << ", "
            << result.tree.labels[first.right] << ") at " << format_double(first.height) << "\n";
  std::cout << "two-group split (" << to_string(result.tree.linkage) << " linkage):\n";
  print_partition(std::cout, result.two_groups);
  if (result.consistency.spearman_rho)
    std::cout << "temporal consistency (spearman rho): "
              << format_double(*result.consistency.spearman_rho) << "\n";
  write_fixture_artifacts(result, table_id, opt.run.output_dir);
  std::cout << to_ascii(result.tree);
  return 0;
}

int cmd_synth(const DriftSpec& spec, const std::filesystem::path& out_dir) {
  const std::filesystem::path manifest = write_corpus_files(spec, out_dir);
  std::cout << "manifest: " << manifest.string() << "\n";
  return 0;
}

int cmd_freq(CliOptions& opt, int top) {
  finalize(opt);
  const CorpusManifest manifest = load_manifest(opt.run.manifest_path);
  for (const auto& entry : manifest.entries) {
    const FrequencyTable table =
        count_frequencies(load_corpus(entry, manifest.encoding, opt.run.tokenizer));
    std::vector<std::pair<std::string, std::uint64_t>> items(table.counts.begin(),
                                                             table.counts.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::cout << "corpus " << entry.id << " (" << table.total << " tokens, "
              << table.counts.size() << " distinct)\n";
    const std::size_t n = std::min<std::size_t>(top, items.size());
    for (std::size_t i = 0; i < n; ++i)
      std::cout << "  " << items[i].first << " " << items[i].second << "\n";
  }
  return 0;
}

int cmd_vocab(CliOptions& opt) {
  finalize(opt);
  const CorpusManifest manifest = load_manifest(opt.run.manifest_path);
  std::vector<FrequencyTable> tables;
  for (const auto& entry : manifest.entries)
    tables.push_back(count_frequencies(load_corpus(entry, manifest.encoding, opt.run.tokenizer)));
  const SharedVocabulary vocab =
      select_shared_vocab(tables, opt.run.k, opt.run.train.min_count, opt.run.rule);
  std::filesystem::create_directories(opt.run.output_dir);
  const auto path = opt.run.output_dir / "vocabulary.txt";
  save_vocabulary(vocab, path);
  for (const auto& w : vocab.words) std::cout << w << "\n";
  std::cerr << "written: " << path.string() << "\n";
  return 0;
}

int cmd_embed(CliOptions& opt) {
  finalize(opt);
  const CorpusManifest manifest = load_manifest(opt.run.manifest_path);
  std::filesystem::create_directories(opt.run.output_dir);
  for (const auto& entry : manifest.entries) {
    const TokenStream stream = load_corpus(entry, manifest.encoding, opt.run.tokenizer);
    const EmbeddingModel model = train_embedding(stream, opt.run.train);
    const auto path = opt.run.output_dir / (entry.id + ".emb");
    save_model(model, path);
    std::cout << entry.id << ": vocab " << model.vocab_size() << ", dim " << model.dim()
              << " -> " << path.string() << "\n";
  }
  return 0;
}

int cmd_tree(CliOptions& opt, const std::filesystem::path& matrix_path) {
  finalize(opt);
  DistanceMatrix m = read_matrix_csv(matrix_path);
  const Dendrogram tree = agglomerate(m, opt.run.linkage);
  std::filesystem::create_directories(opt.run.output_dir);
  const auto newick_path = opt.run.output_dir / "tree.newick";
  const auto ascii_path = opt.run.output_dir / "tree.txt";
  {
    std::ofstream out(newick_path);
    out << to_newick(tree) << "\n";
  }
  {
    std::ofstream out(ascii_path);
    out << to_ascii(tree);
  }
  std::cout << to_ascii(tree);
  const ConsistencyReport consistency = temporal_consistency(tree);
  if (consistency.spearman_rho)
    std::cout << "temporal consistency (spearman rho): "
              << format_double(*consistency.spearman_rho) << "\n";
  std::cout << "written: " << newick_path.string() << ", " << ascii_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lingtree: corpus evolution trees from word-embedding concatenation"};
  app.require_subcommand(1);

  CliOptions opt;

  auto* run = app.add_subcommand("run", "full pipeline: manifest -> distance matrix -> tree");
  add_common_flags(run, opt, true);

  auto* sweep_dim =
      app.add_subcommand("sweep-dim", "run the pipeline at several vector dimensions");
  std::vector<int> dims;
  add_common_flags(sweep_dim, opt, true);
  sweep_dim->add_option("--dims", dims, "dimensions to sweep")->delimiter(',')->required();

  auto* sweep_k = app.add_subcommand("sweep-k", "run the pipeline at several vocabulary sizes");
  std::vector<int> ks;
  add_common_flags(sweep_k, opt, true);
  sweep_k->add_option("--ks", ks, "shared-word counts to sweep")->delimiter(',')->required();

  auto* fixture = app.add_subcommand("fixture", "cluster a bundled reference matrix");
  std::string table_id;
  add_common_flags(fixture, opt, false);
  fixture->add_option("table_id", table_id, "reference matrix id (5-5 or 5-6)")->required();

  auto* synth = app.add_subcommand("synth", "generate seeded synthetic drift corpora");
  DriftSpec spec;
  std::filesystem::path synth_out = "synth";
  synth->add_option("--vocab-size", spec.vocab_size, "vocabulary size (>= 50)");
  synth->add_option("--tokens", spec.tokens_per_corpus, "tokens per corpus");
  synth->add_option("--drift", spec.drift_rate, "drift rate in [0, 1]");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--years", spec.timeline, "timeline years (strictly increasing)")
      ->delimiter(',')
      ->required();
  synth->add_option("--out", synth_out, "output directory")->envname("LINGTREE_OUT");

  auto* freq = app.add_subcommand("freq", "per-corpus word frequency tables");
  int top = 100;
  add_common_flags(freq, opt, true);
  freq->add_option("--top", top, "words to list per corpus")->check(CLI::PositiveNumber);

  auto* vocab = app.add_subcommand("vocab", "select and export the shared vocabulary");
  add_common_flags(vocab, opt, true);

  auto* embed = app.add_subcommand("embed", "train and save per-corpus embedding models");
  add_common_flags(embed, opt, true);

  auto* tree = app.add_subcommand("tree", "cluster an existing distance matrix CSV");
  std::filesystem::path matrix_path;
  add_common_flags(tree, opt, false);
  tree->add_option("--matrix", matrix_path, "distance matrix CSV")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(opt);
    if (sweep_dim->parsed()) {
      finalize(opt);
      return report_sweep(sweep_dims(opt.run, dims));
    }
    if (sweep_k->parsed()) {
      finalize(opt);
      return report_sweep(sweep_ks(opt.run, ks));
    }
    if (fixture->parsed()) return cmd_fixture(opt, table_id);
    if (synth->parsed()) return cmd_synth(spec, synth_out);
    if (freq->parsed()) return cmd_freq(opt, top);
    if (vocab->parsed()) return cmd_vocab(opt);
    if (embed->parsed()) return cmd_embed(opt);
    if (tree->parsed()) return cmd_tree(opt, matrix_path);
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const lingtree::usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const lingtree::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const lingtree::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
