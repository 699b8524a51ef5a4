#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lingtree/geometry.hpp"

namespace lingtree {

enum class Linkage { Single, Complete, Average };

Linkage linkage_from_string(const std::string& name);
std::string to_string(Linkage linkage);

// Node ids: 0..n-1 are leaves in label order; merge m creates node n+m.
struct Merge {
  int left = 0;   // left < right, both node ids
  int right = 0;
  double height = 0.0;
};

struct Dendrogram {
  std::vector<std::string> labels;
  std::vector<int> years;
  std::vector<Merge> merges;  // exactly n-1, heights non-decreasing
  Linkage linkage = Linkage::Complete;

  int leaf_count() const { return static_cast<int>(labels.size()); }
};

// Bottom-up agglomeration with Lance-Williams distance updates. At each
// step the active pair at minimum linkage distance merges; ties break to
// the smallest (i, j) pair with clusters kept in ascending creation-id
// order (leaves first, then merge nodes).
Dendrogram agglomerate(const DistanceMatrix& m, Linkage linkage);

// The partition left after undoing the last (clusters - 1) merges.
// Groups are ordered by their smallest leaf index, members in leaf order.
std::vector<std::vector<std::string>> cut(const Dendrogram& tree, int clusters);

// Entry (i, j) = height of the lowest merge joining leaves i and j.
DistanceMatrix cophenetic(const Dendrogram& tree);

struct ConsistencyPair {
  std::string label_i;
  std::string label_j;
  double cophenetic_distance = 0.0;
  int year_gap = 0;
};

// Spearman rank correlation (average-rank ties) between cophenetic
// distance and |year_i - year_j| over all leaf pairs. rho is absent when
// either variable has no variation (e.g. all years identical).
struct ConsistencyReport {
  std::optional<double> spearman_rho;
  std::vector<ConsistencyPair> pairs;
};

ConsistencyReport temporal_consistency(const Dendrogram& tree);

// Branch length = parent merge height - child merge height (leaves sit at
// height 0). Terminated by ";".
std::string to_newick(const Dendrogram& tree);

// Deterministic monospace rendering; leaves ordered with the
// lower-height subtree first, ties by smallest leaf label.
std::string to_ascii(const Dendrogram& tree);

// Spearman rank correlation with average-rank tie handling; absent when
// either input is constant. Exposed for reuse in reports and tests.
std::optional<double> spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace lingtree
