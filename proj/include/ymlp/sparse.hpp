#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

namespace ymlp {

struct Triplet {
  long row;
  long col;
  double value;
};

/// Compressed sparse row matrix: monotone row offsets, strictly increasing
/// column indices within each row, no explicit zeros.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(long rows, long cols) : rows_(rows), cols_(cols), offsets_(rows + 1, 0) {}

  static SparseMatrix from_triplets(long rows, long cols, std::vector<Triplet> entries) {
    for (const auto& t : entries)
      if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
        throw std::out_of_range("SparseMatrix::from_triplets: entry out of range");
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseMatrix m(rows, cols);
    m.cols_idx_.reserve(entries.size());
    m.vals_.reserve(entries.size());
    size_t i = 0;
    for (long r = 0; r < rows; ++r) {
      while (i < entries.size() && entries[i].row == r) {
        double v = entries[i].value;
        const long c = entries[i].col;
        ++i;
        while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
          v += entries[i].value;  // combine duplicates
          ++i;
        }
        if (v != 0.0) {
          m.cols_idx_.push_back(c);
          m.vals_.push_back(v);
        }
      }
      m.offsets_[r + 1] = static_cast<long>(m.cols_idx_.size());
    }
    return m;
  }

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  long nnz() const { return static_cast<long>(vals_.size()); }

  std::span<const long> row_offsets() const { return offsets_; }
  std::span<const long> col_indices() const { return cols_idx_; }
  std::span<const double> values() const { return vals_; }

  std::span<const long> row_cols(long r) const {
    return {cols_idx_.data() + offsets_[r], static_cast<size_t>(offsets_[r + 1] - offsets_[r])};
  }
  std::span<const double> row_vals(long r) const {
    return {vals_.data() + offsets_[r], static_cast<size_t>(offsets_[r + 1] - offsets_[r])};
  }

  double coeff(long r, long c) const {
    const auto cols = row_cols(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return vals_[offsets_[r] + (it - cols.begin())];
  }

  /// y = A x
  void matvec(std::span<const double> x, std::span<double> y) const {
    for (long r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (long i = offsets_[r]; i < offsets_[r + 1]; ++i) acc += vals_[i] * x[cols_idx_[i]];
      y[r] = acc;
    }
  }

  /// y = A^T x
  void matvec_transpose(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (long r = 0; r < rows_; ++r) {
      const double xr = x[r];
      if (xr == 0.0) continue;
      for (long i = offsets_[r]; i < offsets_[r + 1]; ++i) y[cols_idx_[i]] += vals_[i] * xr;
    }
  }

  /// Rows of `this` followed by rows of `other` (same column count).
  SparseMatrix vstack(const SparseMatrix& other) const {
    if (cols_ != other.cols_) throw std::invalid_argument("vstack: column mismatch");
    SparseMatrix m(rows_ + other.rows_, cols_);
    m.cols_idx_.reserve(nnz() + other.nnz());
    m.vals_.reserve(nnz() + other.nnz());
    m.cols_idx_ = cols_idx_;
    m.vals_ = vals_;
    m.cols_idx_.insert(m.cols_idx_.end(), other.cols_idx_.begin(), other.cols_idx_.end());
    m.vals_.insert(m.vals_.end(), other.vals_.begin(), other.vals_.end());
    for (long r = 0; r < rows_; ++r) m.offsets_[r] = offsets_[r];
    for (long r = 0; r <= other.rows_; ++r) m.offsets_[rows_ + r] = nnz() + other.offsets_[r];
    return m;
  }

  Eigen::SparseMatrix<double> to_eigen() const {
    Eigen::SparseMatrix<double> e(rows_, cols_);
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(vals_.size());
    for (long r = 0; r < rows_; ++r)
      for (long i = offsets_[r]; i < offsets_[r + 1]; ++i)
        ts.emplace_back(static_cast<int>(r), static_cast<int>(cols_idx_[i]), vals_[i]);
    e.setFromTriplets(ts.begin(), ts.end());
    return e;
  }

  bool equals(const SparseMatrix& other, double tol = 0.0) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    if (tol == 0.0)
      return offsets_ == other.offsets_ && cols_idx_ == other.cols_idx_ && vals_ == other.vals_;
    if (offsets_ != other.offsets_ || cols_idx_ != other.cols_idx_) return false;
    for (size_t i = 0; i < vals_.size(); ++i)
      if (std::abs(vals_[i] - other.vals_[i]) > tol) return false;
    return true;
  }

 private:
  long rows_ = 0, cols_ = 0;
  std::vector<long> offsets_;
  std::vector<long> cols_idx_;
  std::vector<double> vals_;
};

namespace detail {
inline void print_value(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }
}  // namespace detail

/// Plain-text triplet export of an LP (objective Xi, constraints M F = c):
///   rows cols nnz
///   i j value            (one line per stored entry, row-major, 0-based)
///   rhs
///   value                (rows lines)
///   objective
///   value                (cols lines)
inline void write_lp_triplet_file(const std::string& path, std::span<const double> xi,
                                  const SparseMatrix& m, std::span<const double> c) {
  if (static_cast<long>(xi.size()) != m.cols() || static_cast<long>(c.size()) != m.rows())
    throw std::invalid_argument("write_lp_triplet_file: size mismatch");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_lp_triplet_file: cannot open " + path);
  std::fprintf(f, "%ld %ld %ld\n", m.rows(), m.cols(), m.nnz());
  for (long r = 0; r < m.rows(); ++r) {
    const auto cols = m.row_cols(r);
    const auto vals = m.row_vals(r);
    for (size_t i = 0; i < cols.size(); ++i) {
      std::fprintf(f, "%ld %ld ", r, cols[i]);
      detail::print_value(f, vals[i]);
      std::fputc('\n', f);
    }
  }
  std::fprintf(f, "rhs\n");
  for (double v : c) {
    detail::print_value(f, v);
    std::fputc('\n', f);
  }
  std::fprintf(f, "objective\n");
  for (double v : xi) {
    detail::print_value(f, v);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

struct LpTripletData {
  SparseMatrix m;
  std::vector<double> rhs;
  std::vector<double> objective;
};

inline LpTripletData read_lp_triplet_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_lp_triplet_file: cannot open " + path);
  long rows, cols, nnz;
  if (!(in >> rows >> cols >> nnz)) throw std::runtime_error("read_lp_triplet_file: bad header");
  std::vector<Triplet> ts(nnz);
  for (long i = 0; i < nnz; ++i)
    if (!(in >> ts[i].row >> ts[i].col >> ts[i].value))
      throw std::runtime_error("read_lp_triplet_file: bad entry");
  std::string tag;
  in >> tag;
  if (tag != "rhs") throw std::runtime_error("read_lp_triplet_file: expected rhs section");
  LpTripletData data;
  data.rhs.resize(rows);
  for (auto& v : data.rhs) in >> v;
  in >> tag;
  if (tag != "objective") throw std::runtime_error("read_lp_triplet_file: expected objective section");
  data.objective.resize(cols);
  for (auto& v : data.objective) in >> v;
  if (!in) throw std::runtime_error("read_lp_triplet_file: truncated file");
  data.m = SparseMatrix::from_triplets(rows, cols, std::move(ts));
  return data;
}

}  // namespace ymlp
