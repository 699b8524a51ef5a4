#include "lingtree/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "lingtree/errors.hpp"

namespace lingtree {

SelectionRule selection_rule_from_string(const std::string& name) {
  if (name == "sum_rank") return SelectionRule::SumRank;
  if (name == "min_rank") return SelectionRule::MinRank;
  throw usage_error("unknown selection rule '" + name + "' (expected sum_rank or min_rank)");
}

std::string to_string(SelectionRule rule) {
  return rule == SelectionRule::SumRank ? "sum_rank" : "min_rank";
}

namespace {

// 1-based frequency ranks of every word in one table: count descending,
// ties lexicographic, so ranks are reproducible across map orderings.
std::unordered_map<std::string, std::size_t> frequency_ranks(const FrequencyTable& table) {
  std::vector<std::pair<std::string, std::uint64_t>> items(table.counts.begin(),
                                                           table.counts.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::unordered_map<std::string, std::size_t> ranks;
  ranks.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) ranks.emplace(items[i].first, i + 1);
  return ranks;
}

}  // namespace

SharedVocabulary select_shared_vocab(const std::vector<FrequencyTable>& tables, int k,
                                     std::uint64_t min_count, SelectionRule rule) {
  if (tables.size() < 2) throw usage_error("shared vocabulary needs at least 2 corpora");
  if (k < 1) throw usage_error("k must be >= 1");

  // Words present in every table with count >= min_count in each.
  std::vector<std::string> shared;
  for (const auto& [word, count0] : tables.front().counts) {
    if (count0 < min_count) continue;
    bool everywhere = true;
    for (std::size_t t = 1; t < tables.size(); ++t) {
      auto it = tables[t].counts.find(word);
      if (it == tables[t].counts.end() || it->second < min_count) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) shared.push_back(word);
  }

  if (static_cast<std::size_t>(k) > shared.size())
    throw data_error("only " + std::to_string(shared.size()) + " shared words with count >= " +
                     std::to_string(min_count) + " in every corpus; cannot select k=" +
                     std::to_string(k));

  if (rule == SelectionRule::SumRank) {
    std::unordered_map<std::string, std::uint64_t> totals;
    totals.reserve(shared.size());
    for (const auto& w : shared) {
      std::uint64_t sum = 0;
      for (const auto& t : tables) sum += t.counts.at(w);
      totals.emplace(w, sum);
    }
    std::sort(shared.begin(), shared.end(), [&](const std::string& a, const std::string& b) {
      if (totals.at(a) != totals.at(b)) return totals.at(a) > totals.at(b);
      return a < b;
    });
  } else {
    std::unordered_map<std::string, std::size_t> worst;
    worst.reserve(shared.size());
    std::vector<std::unordered_map<std::string, std::size_t>> ranks;
    ranks.reserve(tables.size());
    for (const auto& t : tables) ranks.push_back(frequency_ranks(t));
    for (const auto& w : shared) {
      std::size_t r = 0;
      for (const auto& table_ranks : ranks) r = std::max(r, table_ranks.at(w));
      worst.emplace(w, r);
    }
    std::sort(shared.begin(), shared.end(), [&](const std::string& a, const std::string& b) {
      if (worst.at(a) != worst.at(b)) return worst.at(a) < worst.at(b);
      return a < b;
    });
  }

  shared.resize(static_cast<std::size_t>(k));
  return SharedVocabulary{std::move(shared), k, rule};
}

void save_vocabulary(const SharedVocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write vocabulary file: " + path.string());
  for (const auto& w : vocab.words) out << w << '\n';
  if (!out) throw data_error("I/O failure writing: " + path.string());
}

}  // namespace lingtree
