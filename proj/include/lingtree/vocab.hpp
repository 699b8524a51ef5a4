#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lingtree/corpus.hpp"

namespace lingtree {

enum class SelectionRule {
  SumRank,  // descending total count across all corpora
  MinRank,  // ascending worst per-corpus frequency rank
};

SelectionRule selection_rule_from_string(const std::string& name);
std::string to_string(SelectionRule rule);

// The single canonical word order every corpus's combined vector follows.
struct SharedVocabulary {
  std::vector<std::string> words;  // exactly k distinct words, ranking order
  int k = 0;
  SelectionRule rule = SelectionRule::SumRank;
};

// Top-k words present in every table with count >= min_count in each,
// ranked by `rule`; ties broken lexicographically ascending. Throws
// data_error naming the achievable maximum when fewer than k words
// qualify.
SharedVocabulary select_shared_vocab(const std::vector<FrequencyTable>& tables, int k,
                                     std::uint64_t min_count,
                                     SelectionRule rule = SelectionRule::SumRank);

// One word per line, ranking order, for audit.
void save_vocabulary(const SharedVocabulary& vocab, const std::filesystem::path& path);

}  // namespace lingtree
