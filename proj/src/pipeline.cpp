#include "lingtree/pipeline.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lingtree/fixtures.hpp"
#include "lingtree/util.hpp"

namespace lingtree {
namespace {

using nlohmann::json;

std::string train_config_string(const TrainConfig& c) {
  std::ostringstream out;
  out << "dim=" << c.dim << " window=" << c.window << " epochs=" << c.epochs
      << " negative=" << c.negative_samples << " lr=" << format_exact(c.initial_learning_rate)
      << " min_count=" << c.min_count << " subsample=" << format_exact(c.subsample_threshold)
      << " seed=" << c.seed << " deterministic=" << (c.deterministic ? 1 : 0);
  return out.str();
}

std::string tokenizer_config_string(const TokenizerConfig& c) {
  std::vector<std::string> stop(c.stopwords.begin(), c.stopwords.end());
  std::sort(stop.begin(), stop.end());
  std::string out = c.keep_apostrophes ? "apostrophes=keep" : "apostrophes=split";
  for (const auto& w : stop) {
    out += ' ';
    out += w;
  }
  return out;
}

// Streaming 128-bit content hash (two FNV-1a lanes with distinct bases);
// stable across runs, which is what makes stage outputs reusable.
struct ContentHash {
  std::uint64_t lo = 0xCBF29CE484222325ull;
  std::uint64_t hi = 0x6C62272E07BB0142ull;

  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      lo = (lo ^ c) * 0x100000001B3ull;
      hi = (hi ^ c) * 0x100000001B3ull;
      hi ^= hi >> 29;
    }
  }

  void update_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw data_error("cannot open text file: " + p.string());
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
      update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }

  std::string hex() const {
    char out[33];
    std::snprintf(out, sizeof(out), "%016llx%016llx", static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return out;
  }
};

std::string embedding_cache_key(const ManifestEntry& entry, TextEncoding encoding,
                                const TokenizerConfig& tokenizer, const TrainConfig& train) {
  ContentHash h;
  h.update("lingtree-embedding-cache-1\n");
  h.update(entry.id);
  h.update("\n");
  h.update(encoding == TextEncoding::Utf8 ? "utf-8" : "latin1");
  h.update("\n");
  h.update(tokenizer_config_string(tokenizer));
  h.update("\n");
  h.update(train_config_string(train));
  h.update("\n");
  for (const auto& p : entry.paths) {
    h.update_file(p);
    h.update("\x1f");
  }
  return h.hex();
}

EmbeddingModel train_or_load(const ManifestEntry& entry, const CorpusManifest& manifest,
                             const RunConfig& cfg) {
  const bool use_cache = cfg.cache_embeddings && cfg.train.deterministic;
  std::filesystem::path cache_file;
  if (use_cache) {
    const std::string key =
        embedding_cache_key(entry, manifest.encoding, cfg.tokenizer, cfg.train);
    const std::filesystem::path cache_dir =
        cfg.cache_dir.empty() ? cfg.output_dir / "cache" : cfg.cache_dir;
    cache_file = cache_dir / (key + ".emb");
    if (std::filesystem::is_regular_file(cache_file)) {
      EmbeddingModel cached = load_model(cache_file);
      if (cached.corpus_id() == entry.id && cached.dim() == cfg.train.dim) return cached;
    }
  }
  const TokenStream stream = load_corpus(entry, manifest.encoding, cfg.tokenizer);
  EmbeddingModel model = train_embedding(stream, cfg.train);
  if (use_cache) {
    std::filesystem::create_directories(cache_file.parent_path());
    save_model(model, cache_file);
  }
  return model;
}

json delta_to_json(const MatrixDelta& d) {
  return json{{"max_abs", d.max_abs}, {"mean_abs", d.mean_abs}};
}

json partition_to_json(const std::vector<std::vector<std::string>>& groups) {
  json out = json::array();
  for (const auto& g : groups) out.push_back(g);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write: " + path.string());
  out << text;
  if (!out) throw data_error("I/O failure writing: " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace

json consistency_to_json(const ConsistencyReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back(json{{"label_i", p.label_i},
                         {"label_j", p.label_j},
                         {"cophenetic_distance", p.cophenetic_distance},
                         {"year_gap", p.year_gap}});
  }
  json out;
  if (report.spearman_rho)
    out["spearman_rho"] = *report.spearman_rho;
  else
    out["spearman_rho"] = nullptr;
  out["pairs"] = std::move(pairs);
  return out;
}

json run_metadata(const RunConfig& cfg) {
  std::vector<std::string> stop(cfg.tokenizer.stopwords.begin(), cfg.tokenizer.stopwords.end());
  std::sort(stop.begin(), stop.end());
  return json{{"manifest", cfg.manifest_path.string()},
              {"k", cfg.k},
              {"dim", cfg.train.dim},
              {"window", cfg.train.window},
              {"epochs", cfg.train.epochs},
              {"negative_samples", cfg.train.negative_samples},
              {"initial_learning_rate", cfg.train.initial_learning_rate},
              {"min_count", cfg.train.min_count},
              {"subsample_threshold", cfg.train.subsample_threshold},
              {"seed", cfg.train.seed},
              {"deterministic", cfg.train.deterministic},
              {"selection_rule", to_string(cfg.rule)},
              {"linkage", to_string(cfg.linkage)},
              {"normalize_slices", cfg.normalize_slices},
              {"output_dir", cfg.output_dir.string()},
              {"formats", std::vector<std::string>(cfg.formats.begin(), cfg.formats.end())},
              {"full_precision_csv", cfg.full_precision_csv},
              {"cache_embeddings", cfg.cache_embeddings},
              {"cache_dir", cfg.cache_dir.string()},
              {"keep_apostrophes", cfg.tokenizer.keep_apostrophes},
              {"stopwords", stop}};
}

RunArtifacts run_pipeline(const RunConfig& cfg) {
  const CorpusManifest manifest = load_manifest(cfg.manifest_path);
  if (manifest.entries.size() < 2)
    throw data_error("pipeline needs at least 2 corpora, manifest lists " +
                     std::to_string(manifest.entries.size()));

  std::vector<FrequencyTable> tables;
  tables.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries)
    tables.push_back(
        count_frequencies(load_corpus(entry, manifest.encoding, cfg.tokenizer)));

  RunArtifacts artifacts;
  artifacts.vocab = select_shared_vocab(tables, cfg.k, cfg.train.min_count, cfg.rule);

  std::vector<CombinedVector> combined;
  std::vector<int> years;
  combined.reserve(manifest.entries.size());
  for (const auto& entry : manifest.entries) {
    const EmbeddingModel model = train_or_load(entry, manifest, cfg);
    combined.push_back(combine(model, artifacts.vocab, cfg.normalize_slices));
    years.push_back(entry.year);
  }
  artifacts.combined_length = static_cast<int>(combined.front().data.size());

  artifacts.matrix = distance_matrix(combined, years);
  artifacts.tree = agglomerate(artifacts.matrix, cfg.linkage);
  artifacts.consistency = temporal_consistency(artifacts.tree);
  artifacts.two_groups = cut(artifacts.tree, std::min(2, artifacts.tree.leaf_count()));

  std::filesystem::create_directories(cfg.output_dir);
  if (cfg.formats.count("csv")) {
    const auto p = cfg.output_dir / "distance.csv";
    write_matrix_csv(p, artifacts.matrix, cfg.full_precision_csv ? -1 : 3);
    artifacts.files["distance_csv"] = p;
  }
  if (cfg.formats.count("newick")) {
    const auto p = cfg.output_dir / "tree.newick";
    write_text(p, to_newick(artifacts.tree) + "\n");
    artifacts.files["newick"] = p;
  }
  if (cfg.formats.count("ascii")) {
    const auto p = cfg.output_dir / "tree.txt";
    write_text(p, to_ascii(artifacts.tree));
    artifacts.files["ascii"] = p;
  }
  if (cfg.formats.count("json")) {
    const auto p = cfg.output_dir / "consistency.json";
    write_json(p, consistency_to_json(artifacts.consistency));
    artifacts.files["consistency"] = p;
  }
  {
    const auto p = cfg.output_dir / "vocabulary.txt";
    save_vocabulary(artifacts.vocab, p);
    artifacts.files["vocabulary"] = p;
  }
  {
    json meta = run_metadata(cfg);
    meta["combined_vector_length"] = artifacts.combined_length;
    const auto p = cfg.output_dir / "run_meta.json";
    write_json(p, meta);
    artifacts.files["metadata"] = p;
  }
  return artifacts;
}

namespace {

SweepReport sweep_impl(const RunConfig& base, const std::string& parameter,
                       const std::vector<int>& values) {
  if (values.size() < 2)
    throw usage_error("sweep needs at least 2 " + parameter + " values, got " +
                      std::to_string(values.size()));

  SweepReport report;
  report.parameter = parameter;
  for (int value : values) {
    RunConfig cfg = base;
    if (parameter == "dim")
      cfg.train.dim = value;
    else
      cfg.k = value;
    cfg.output_dir = base.output_dir / (parameter + "_" + std::to_string(value));
    // One cache for the whole sweep, so runs that differ only in
    // downstream knobs (k, linkage) reuse trained embeddings.
    cfg.cache_dir = base.cache_dir.empty() ? base.output_dir / "cache" : base.cache_dir;
    SweepRun run;
    run.value = value;
    try {
      RunArtifacts a = run_pipeline(cfg);
      run.ok = true;
      run.matrix = std::move(a.matrix);
      run.tree = std::move(a.tree);
      run.root_split = std::move(a.two_groups);
    } catch (const std::exception& e) {
      run.ok = false;
      run.error = e.what();
    }
    report.runs.push_back(std::move(run));
  }

  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    for (std::size_t j = i + 1; j < report.runs.size(); ++j) {
      const SweepRun& a = report.runs[i];
      const SweepRun& b = report.runs[j];
      if (!a.ok || !b.ok) continue;
      SweepComparison cmp;
      cmp.value_a = a.value;
      cmp.value_b = b.value;
      cmp.root_split_match = a.root_split == b.root_split;
      cmp.delta = matrix_delta(a.matrix, b.matrix);
      report.comparisons.push_back(cmp);
    }
  }

  json j;
  j["parameter"] = parameter;
  j["runs"] = json::array();
  for (const auto& r : report.runs) {
    json run{{parameter, r.value}, {"ok", r.ok}};
    if (r.ok) {
      run["newick"] = to_newick(r.tree);
      run["root_split"] = partition_to_json(r.root_split);
    } else {
      run["error"] = r.error;
    }
    j["runs"].push_back(std::move(run));
  }
  j["comparisons"] = json::array();
  for (const auto& c : report.comparisons) {
    j["comparisons"].push_back(json{{parameter + "_a", c.value_a},
                                    {parameter + "_b", c.value_b},
                                    {"root_split_match", c.root_split_match},
                                    {"delta", delta_to_json(c.delta)}});
  }
  std::filesystem::create_directories(base.output_dir);
  report.report_path = base.output_dir / ("sweep_" + parameter + ".json");
  write_json(report.report_path, j);
  return report;
}

}  // namespace

SweepReport sweep_dims(const RunConfig& config, const std::vector<int>& dims) {
  return sweep_impl(config, "dim", dims);
}

SweepReport sweep_ks(const RunConfig& config, const std::vector<int>& ks) {
  return sweep_impl(config, "k", ks);
}

FixtureResult run_fixture(const std::string& table_id, Linkage linkage) {
  FixtureResult result;
  result.matrix = fixture_matrix(table_id);

  DistanceMatrix working = result.matrix;
  try {
    validate_distance_matrix(working, 1e-9);
    result.strictly_valid = true;
    result.validation_note = "matrix passes invariants (symmetry 1e-9, zero diagonal, [0, 2])";
  } catch (const data_error& e) {
    result.strictly_valid = false;
    // Published tables carry 3-decimal rounding; average away asymmetry
    // up to that precision, otherwise give up.
    symmetrize(working, 1e-3);
    validate_distance_matrix(working, 1e-9);
    result.validation_note =
        std::string("matrix required symmetrization within published precision: ") + e.what();
  }

  result.tree = agglomerate(working, linkage);
  result.two_groups = cut(result.tree, 2);
  result.consistency = temporal_consistency(result.tree);
  return result;
}

void write_fixture_artifacts(const FixtureResult& result, const std::string& table_id,
                             const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);
  const std::string stem = "fixture_" + table_id;
  write_matrix_csv(output_dir / (stem + ".csv"), result.matrix, 3);
  write_text(output_dir / (stem + ".newick"), to_newick(result.tree) + "\n");
  write_text(output_dir / (stem + ".txt"), to_ascii(result.tree));
  json j;
  j["table_id"] = table_id;
  j["validation"] = result.validation_note;
  j["linkage"] = to_string(result.tree.linkage);
  j["two_group_partition"] = partition_to_json(result.two_groups);
  j["consistency"] = consistency_to_json(result.consistency);
  write_json(output_dir / (stem + ".json"), j);
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open stopword list: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string word;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) word.push_back(c);
    if (!word.empty() && word[0] != '#') words.insert(word);
  }
  return words;
}

}  // namespace lingtree
