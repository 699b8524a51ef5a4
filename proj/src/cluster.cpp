#include "lingtree/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lingtree/util.hpp"

namespace lingtree {

Linkage linkage_from_string(const std::string& name) {
  if (name == "single") return Linkage::Single;
  if (name == "complete") return Linkage::Complete;
  if (name == "average") return Linkage::Average;
  throw usage_error("unknown linkage '" + name + "' (expected single, complete or average)");
}

std::string to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "complete";
}

Dendrogram agglomerate(const DistanceMatrix& m, Linkage linkage) {
  validate_distance_matrix(m);
  const int n = static_cast<int>(m.size());
  if (n < 2) throw data_error("agglomeration needs at least 2 corpora");

  Dendrogram tree;
  tree.labels = m.labels;
  tree.years = m.years;
  tree.linkage = linkage;
  tree.merges.reserve(n - 1);

  // Pairwise distances between all 2n-1 possible nodes; Lance-Williams
  // fills rows for merge nodes as they appear. N is tiny, so the dense
  // buffer is the simplest correct structure.
  const int total = 2 * n - 1;
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(total, total);
  dist.topLeftCorner(n, n) = m.d;
  std::vector<int> sizes(total, 1);
  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);

  for (int step = 0; step < n - 1; ++step) {
    // Strict < plus ascending-id scan order implements the tie rule:
    // the lexicographically smallest (i, j) pair wins.
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t a = 0; a + 1 < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double d = dist(active[a], active[b]);
        if (d < best) {
          best = d;
          bi = a;
          bj = b;
        }
      }
    }

    const int left = active[bi];
    const int right = active[bj];
    const int merged = n + step;
    tree.merges.push_back(Merge{left, right, best});
    // Single/complete/average cannot invert; anything beyond roundoff
    // slack means the update logic is broken.
    if (step > 0 && best < tree.merges[step - 1].height - 1e-12 * std::max(1.0, best))
      throw numeric_error("merge heights decreased at step " + std::to_string(step) +
                          "; linkage update is inconsistent");

    const double size_l = sizes[left];
    const double size_r = sizes[right];
    for (int other : active) {
      if (other == left || other == right) continue;
      const double dl = dist(left, other);
      const double dr = dist(right, other);
      double d;
      switch (linkage) {
        case Linkage::Single: d = std::min(dl, dr); break;
        case Linkage::Complete: d = std::max(dl, dr); break;
        case Linkage::Average: d = (size_l * dl + size_r * dr) / (size_l + size_r); break;
        default: d = 0; break;
      }
      dist(merged, other) = d;
      dist(other, merged) = d;
    }
    sizes[merged] = sizes[left] + sizes[right];

    active.erase(active.begin() + bj);
    active.erase(active.begin() + bi);
    active.push_back(merged);  // ids are created in ascending order
  }
  return tree;
}

namespace {

// Leaf sets per node id, built by replaying the merges.
std::vector<std::vector<int>> leaf_sets(const Dendrogram& tree) {
  const int n = tree.leaf_count();
  std::vector<std::vector<int>> sets(2 * n - 1);
  for (int i = 0; i < n; ++i) sets[i] = {i};
  for (std::size_t s = 0; s < tree.merges.size(); ++s) {
    const Merge& mg = tree.merges[s];
    auto& dst = sets[n + s];
    dst = sets[mg.left];
    dst.insert(dst.end(), sets[mg.right].begin(), sets[mg.right].end());
    std::sort(dst.begin(), dst.end());
  }
  return sets;
}

double node_height(const Dendrogram& tree, int node) {
  const int n = tree.leaf_count();
  return node < n ? 0.0 : tree.merges[node - n].height;
}

}  // namespace

std::vector<std::vector<std::string>> cut(const Dendrogram& tree, int clusters) {
  const int n = tree.leaf_count();
  if (clusters < 1 || clusters > n)
    throw usage_error("clusters must be in [1, " + std::to_string(n) + "], got " +
                      std::to_string(clusters));

  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);
  const auto sets = leaf_sets(tree);
  for (int s = 0; s < n - clusters; ++s) {
    const Merge& mg = tree.merges[s];
    active.erase(std::remove(active.begin(), active.end(), mg.left), active.end());
    active.erase(std::remove(active.begin(), active.end(), mg.right), active.end());
    active.push_back(n + s);
  }

  std::vector<std::vector<int>> groups;
  groups.reserve(active.size());
  for (int id : active) groups.push_back(sets[id]);
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::vector<std::vector<std::string>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    std::vector<std::string> labels;
    labels.reserve(g.size());
    for (int leaf : g) labels.push_back(tree.labels[leaf]);
    out.push_back(std::move(labels));
  }
  return out;
}

DistanceMatrix cophenetic(const Dendrogram& tree) {
  const int n = tree.leaf_count();
  DistanceMatrix m;
  m.labels = tree.labels;
  m.years = tree.years;
  m.d = Eigen::MatrixXd::Zero(n, n);

  std::vector<std::vector<int>> sets(2 * n - 1);
  for (int i = 0; i < n; ++i) sets[i] = {i};
  for (std::size_t s = 0; s < tree.merges.size(); ++s) {
    const Merge& mg = tree.merges[s];
    // The merge joining two leaf sets is their lowest common node.
    for (int i : sets[mg.left]) {
      for (int j : sets[mg.right]) {
        m.d(i, j) = mg.height;
        m.d(j, i) = mg.height;
      }
    }
    auto& dst = sets[n + s];
    dst = sets[mg.left];
    dst.insert(dst.end(), sets[mg.right].begin(), sets[mg.right].end());
  }
  return m;
}

std::optional<double> spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) return std::nullopt;

  auto average_ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
      i = j + 1;
    }
    return ranks;
  };

  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

ConsistencyReport temporal_consistency(const Dendrogram& tree) {
  const int n = tree.leaf_count();
  if (static_cast<int>(tree.years.size()) != n)
    throw data_error("temporal consistency needs a year for every leaf");

  const DistanceMatrix coph = cophenetic(tree);
  ConsistencyReport report;
  std::vector<double> dists, gaps;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double cd = coph.d(i, j);
      const int gap = std::abs(tree.years[i] - tree.years[j]);
      report.pairs.push_back(ConsistencyPair{tree.labels[i], tree.labels[j], cd, gap});
      dists.push_back(cd);
      gaps.push_back(static_cast<double>(gap));
    }
  }
  report.spearman_rho = spearman_rho(dists, gaps);
  return report;
}

namespace {

// Smallest leaf index under each node; children are emitted in this
// order so output is stable under any merge bookkeeping.
std::vector<int> min_leaf_index(const Dendrogram& tree) {
  const int n = tree.leaf_count();
  std::vector<int> min_leaf(2 * n - 1);
  for (int i = 0; i < n; ++i) min_leaf[i] = i;
  for (std::size_t s = 0; s < tree.merges.size(); ++s)
    min_leaf[n + s] = std::min(min_leaf[tree.merges[s].left], min_leaf[tree.merges[s].right]);
  return min_leaf;
}

void newick_node(const Dendrogram& tree, int node, double parent_height,
                 const std::vector<int>& min_leaf, std::string& out) {
  const int n = tree.leaf_count();
  if (node < n) {
    out += tree.labels[node];
  } else {
    const Merge& mg = tree.merges[node - n];
    const bool left_first = min_leaf[mg.left] < min_leaf[mg.right];
    const int a = left_first ? mg.left : mg.right;
    const int b = left_first ? mg.right : mg.left;
    out += '(';
    newick_node(tree, a, mg.height, min_leaf, out);
    out += ',';
    newick_node(tree, b, mg.height, min_leaf, out);
    out += ')';
  }
  out += ':';
  out += format_double(parent_height - node_height(tree, node));
}

}  // namespace

std::string to_newick(const Dendrogram& tree) {
  const int n = tree.leaf_count();
  std::string out;
  if (n == 1) {
    out = tree.labels[0] + ";";
    return out;
  }
  const std::vector<int> min_leaf = min_leaf_index(tree);
  const Merge& root = tree.merges.back();
  const bool left_first = min_leaf[root.left] < min_leaf[root.right];
  const int a = left_first ? root.left : root.right;
  const int b = left_first ? root.right : root.left;
  out += '(';
  newick_node(tree, a, root.height, min_leaf, out);
  out += ',';
  newick_node(tree, b, root.height, min_leaf, out);
  out += ");";
  return out;
}

namespace {

struct AsciiLayout {
  std::vector<std::string> canvas;
  int label_width = 0;
};

// Children ordered tighter-first for display: lower subtree height wins,
// ties by the lexicographically smallest leaf label underneath.
std::pair<int, int> display_order(const Dendrogram& tree, const Merge& mg,
                                  const std::vector<std::string>& min_label) {
  const double hl = node_height(tree, mg.left);
  const double hr = node_height(tree, mg.right);
  if (hl < hr) return {mg.left, mg.right};
  if (hr < hl) return {mg.right, mg.left};
  return min_label[mg.left] <= min_label[mg.right] ? std::make_pair(mg.left, mg.right)
                                                   : std::make_pair(mg.right, mg.left);
}

void put(std::vector<std::string>& canvas, int row, int col, char c) {
  if (canvas[row][col] == ' ')
    canvas[row][col] = c;
  else if (canvas[row][col] != c)
    canvas[row][col] = '+';
}

// Returns the anchor row of `node`; draws its subtree into the canvas.
int draw_node(const Dendrogram& tree, int node, const std::vector<std::string>& min_label,
              const std::vector<int>& column, std::vector<std::string>& canvas, int& next_leaf_row,
              std::vector<std::pair<int, std::string>>& leaf_rows) {
  const int n = tree.leaf_count();
  if (node < n) {
    const int row = next_leaf_row;
    next_leaf_row += 2;
    leaf_rows.emplace_back(row, tree.labels[node]);
    return row;
  }
  const Merge& mg = tree.merges[node - n];
  const auto [first, second] = display_order(tree, mg, min_label);
  const int r1 = draw_node(tree, first, min_label, column, canvas, next_leaf_row, leaf_rows);
  const int r2 = draw_node(tree, second, min_label, column, canvas, next_leaf_row, leaf_rows);
  const int col = column[node];
  for (int child : {first, second}) {
    const int row = child == first ? r1 : r2;
    for (int c = column[child]; c < col; ++c) put(canvas, row, c, '-');
  }
  put(canvas, r1, col, '+');
  put(canvas, r2, col, '+');
  for (int r = r1 + 1; r < r2; ++r) put(canvas, r, col, '|');
  return (r1 + r2) / 2;
}

}  // namespace

std::string to_ascii(const Dendrogram& tree) {
  const int n = tree.leaf_count();
  const int rows = 2 * n - 1;
  constexpr int kPlotWidth = 48;

  double max_height = 0.0;
  for (const auto& mg : tree.merges) max_height = std::max(max_height, mg.height);

  const int total = 2 * n - 1;
  std::vector<int> column(total, 0);
  for (int id = n; id < total; ++id) {
    const double h = tree.merges[id - n].height;
    column[id] = max_height > 0.0
                     ? 1 + static_cast<int>(std::lround(h / max_height * (kPlotWidth - 1)))
                     : kPlotWidth;
  }

  std::vector<std::string> min_label(total);
  for (int i = 0; i < n; ++i) min_label[i] = tree.labels[i];
  for (std::size_t s = 0; s < tree.merges.size(); ++s)
    min_label[n + s] =
        std::min(min_label[tree.merges[s].left], min_label[tree.merges[s].right]);

  std::vector<std::string> canvas(rows, std::string(kPlotWidth + 1, ' '));
  std::vector<std::pair<int, std::string>> leaf_rows;
  int next_leaf_row = 0;
  draw_node(tree, 2 * n - 2, min_label, column, canvas, next_leaf_row, leaf_rows);

  int label_width = 0;
  for (const auto& [row, label] : leaf_rows)
    label_width = std::max(label_width, static_cast<int>(label.size()));

  std::vector<std::string> labels_by_row(rows);
  for (const auto& [row, label] : leaf_rows) labels_by_row[row] = label;

  std::string out;
  for (int r = 0; r < rows; ++r) {
    std::string line = labels_by_row[r];
    line.resize(label_width + 1, ' ');
    line += canvas[r];
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace lingtree
