#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lingtree/embedding.hpp"
#include "lingtree/errors.hpp"
#include "lingtree/vocab.hpp"

namespace lingtree {

// Head-to-tail concatenation of one corpus's vectors for the shared
// vocabulary, in its canonical order. |data| == k * dim.
struct CombinedVector {
  std::string corpus_id;
  int k = 0;
  int dim = 0;
  Eigen::VectorXd data;
};

// normalize_slices applies per-word L2 normalization before
// concatenation; off by default since plain concatenation is the
// reference behavior.
CombinedVector combine(const EmbeddingModel& model, const SharedVocabulary& vocab,
                       bool normalize_slices = false);

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& u,
                                            const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw data_error("cosine_similarity: vector lengths differ");
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0))
    throw data_error("cosine_similarity: zero-norm vector");
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<int> years;
  Eigen::MatrixXd d;  // symmetric, zero diagonal, entries in [0, 2]

  Eigen::Index size() const { return d.rows(); }
};

// d(i,j) = 1 - cos(v_i, v_j); the diagonal is set to exactly 0, not
// computed.
DistanceMatrix distance_matrix(const std::vector<CombinedVector>& combined,
                               const std::vector<int>& years);

// Symmetry to `tol`, zero diagonal, finite entries in [0, 2]. Throws
// data_error describing the first violation.
void validate_distance_matrix(const DistanceMatrix& m, double tol = 1e-9);

// Averages d and d^T when the largest asymmetry is within `tol`; throws
// data_error otherwise. For matrices published with rounded entries.
void symmetrize(DistanceMatrix& m, double tol);

struct MatrixDelta {
  double max_abs = 0.0;
  double mean_abs = 0.0;
};

// Off-diagonal elementwise |a - b| statistics; labels must match in order.
MatrixDelta matrix_delta(const DistanceMatrix& a, const DistanceMatrix& b);

// CSV layout: first row is a blank cell then the labels; each following
// row is a label then N values. decimals < 0 writes full precision.
void write_matrix_csv(std::ostream& out, const DistanceMatrix& m, int decimals = 3);
void write_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& m,
                      int decimals = 3);
DistanceMatrix read_matrix_csv(std::istream& in, const std::string& source = "<stream>");
DistanceMatrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace lingtree
