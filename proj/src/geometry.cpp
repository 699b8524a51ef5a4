#include "lingtree/geometry.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lingtree/util.hpp"

namespace lingtree {

CombinedVector combine(const EmbeddingModel& model, const SharedVocabulary& vocab,
                       bool normalize_slices) {
  const int dim = model.dim();
  CombinedVector out;
  out.corpus_id = model.corpus_id();
  out.k = vocab.k;
  out.dim = dim;
  out.data.resize(static_cast<Eigen::Index>(vocab.k) * dim);
  for (int i = 0; i < vocab.k; ++i) {
    const auto vec = model.lookup(vocab.words[i]);
    if (!vec)
      throw data_error("corpus '" + model.corpus_id() + "' has no vector for shared word '" +
                       vocab.words[i] + "'");
    auto slice = out.data.segment(static_cast<Eigen::Index>(i) * dim, dim);
    if (normalize_slices) {
      const double n = vec->norm();
      if (n == 0.0)
        throw data_error("cannot normalize zero vector for word '" + vocab.words[i] + "'");
      slice = *vec / n;
    } else {
      slice = *vec;
    }
  }
  return out;
}

DistanceMatrix distance_matrix(const std::vector<CombinedVector>& combined,
                               const std::vector<int>& years) {
  const std::size_t n = combined.size();
  if (n < 2) throw data_error("distance matrix needs at least 2 corpora");
  if (years.size() != n) throw data_error("distance matrix: years and corpora counts differ");
  const Eigen::Index len = combined.front().data.size();
  for (const auto& c : combined) {
    if (c.data.size() != len)
      throw data_error("combined vector length mismatch for corpus '" + c.corpus_id + "'");
    if (c.data.norm() == 0.0)
      throw data_error("zero combined vector for corpus '" + c.corpus_id + "'");
  }

  DistanceMatrix m;
  m.labels.reserve(n);
  for (const auto& c : combined) m.labels.push_back(c.corpus_id);
  m.years = years;
  m.d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dist = 1.0 - cosine_similarity(combined[i].data, combined[j].data);
      m.d(i, j) = dist;
      m.d(j, i) = dist;
    }
  }
  return m;
}

void validate_distance_matrix(const DistanceMatrix& m, double tol) {
  const Eigen::Index n = m.d.rows();
  if (m.d.cols() != n) throw data_error("distance matrix is not square");
  if (static_cast<Eigen::Index>(m.labels.size()) != n)
    throw data_error("distance matrix: labels and matrix size disagree");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.d(i, i) != 0.0)
      throw data_error("nonzero diagonal at '" + m.labels[i] + "'");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = m.d(i, j);
      if (!std::isfinite(v))
        throw data_error("non-finite entry at (" + m.labels[i] + ", " + m.labels[j] + ")");
      if (v < 0.0 || v > 2.0)
        throw data_error("entry out of [0, 2] at (" + m.labels[i] + ", " + m.labels[j] + "): " +
                         format_double(v));
      if (j > i && std::abs(v - m.d(j, i)) > tol)
        throw data_error("asymmetry beyond tolerance at (" + m.labels[i] + ", " + m.labels[j] +
                         "): " + format_double(v) + " vs " + format_double(m.d(j, i)));
    }
  }
}

void symmetrize(DistanceMatrix& m, double tol) {
  const double asym = (m.d - m.d.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol)
    throw data_error("matrix asymmetry " + format_double(asym) + " exceeds tolerance " +
                     format_double(tol));
  if (asym > 0.0) m.d = ((m.d + m.d.transpose()) / 2.0).eval();
}

MatrixDelta matrix_delta(const DistanceMatrix& a, const DistanceMatrix& b) {
  if (a.labels != b.labels)
    throw data_error("matrix_delta: label sets differ or are ordered differently");
  const Eigen::Index n = a.d.rows();
  if (b.d.rows() != n || a.d.cols() != n || b.d.cols() != n)
    throw data_error("matrix_delta: matrix sizes differ");
  MatrixDelta delta;
  double sum = 0.0;
  std::int64_t cells = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = std::abs(a.d(i, j) - b.d(i, j));
      delta.max_abs = std::max(delta.max_abs, v);
      sum += v;
      ++cells;
    }
  }
  delta.mean_abs = cells ? sum / static_cast<double>(cells) : 0.0;
  return delta;
}

void write_matrix_csv(std::ostream& out, const DistanceMatrix& m, int decimals) {
  for (const auto& label : m.labels) out << ',' << label;
  out << '\n';
  const Eigen::Index n = m.d.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    out << m.labels[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      out << ',';
      out << (decimals < 0 ? format_exact(m.d(i, j)) : format_fixed(m.d(i, j), decimals));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const DistanceMatrix& m, int decimals) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write matrix file: " + path.string());
  write_matrix_csv(out, m, decimals);
  if (!out) throw data_error("I/O failure writing: " + path.string());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

DistanceMatrix read_matrix_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw data_error(source + ": empty matrix file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 3 || !header.front().empty())
    throw data_error(source + ": header must be a blank cell followed by at least 2 labels");

  DistanceMatrix m;
  m.labels.assign(header.begin() + 1, header.end());
  const Eigen::Index n = static_cast<Eigen::Index>(m.labels.size());
  m.d.resize(n, n);

  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw data_error(source + ": expected " + std::to_string(n) +
                                                  " data rows, found " + std::to_string(i));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<Eigen::Index>(cells.size()) != n + 1)
      throw data_error(source + ": row " + std::to_string(i + 1) + " has " +
                       std::to_string(cells.size()) + " cells, expected " + std::to_string(n + 1));
    if (cells[0] != m.labels[i])
      throw data_error(source + ": row label '" + cells[0] + "' does not match column label '" +
                       m.labels[i] + "'");
    for (Eigen::Index j = 0; j < n; ++j) {
      char* end = nullptr;
      m.d(i, j) = std::strtod(cells[j + 1].c_str(), &end);
      if (end == cells[j + 1].c_str())
        throw data_error(source + ": bad number '" + cells[j + 1] + "' in row " +
                         std::to_string(i + 1));
    }
  }

  // Years are the labels when they parse as integers; otherwise they
  // default to the row index so downstream code still has a total order.
  m.years.reserve(m.labels.size());
  bool all_numeric = true;
  for (const auto& label : m.labels) {
    try {
      std::size_t used = 0;
      const int y = std::stoi(label, &used);
      if (used != label.size()) throw std::invalid_argument(label);
      m.years.push_back(y);
    } catch (const std::exception&) {
      all_numeric = false;
      break;
    }
  }
  if (!all_numeric) {
    m.years.clear();
    for (Eigen::Index i = 0; i < n; ++i) m.years.push_back(static_cast<int>(i));
  }
  return m;
}

DistanceMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open matrix file: " + path.string());
  return read_matrix_csv(in, path.string());
}

}  // namespace lingtree
