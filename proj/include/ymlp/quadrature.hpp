#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ymlp {

/// 1-D quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 2 on [-1, 1]

  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Golub-Welsch: nodes/weights of a Gaussian rule from the symmetric
// tridiagonal Jacobi matrix (zero diagonal, given off-diagonal).
inline QuadratureRule golub_welsch(const std::vector<double>& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = offdiag[k];
    jacobi(k + 1, k) = offdiag[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  if (eig.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolve failed");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule with `npts` nodes, exact for polynomials of degree
/// 2*npts - 1 on [-1, 1].
inline QuadratureRule gauss_legendre(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_legendre: npts must be >= 1");
  if (npts == 1) return {{0.0}, {2.0}};
  if (npts == 2) {
    const double a = 1.0 / std::sqrt(3.0);
    return {{-a, a}, {1.0, 1.0}};
  }
  if (npts == 3) {
    const double a = std::sqrt(3.0 / 5.0);
    return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
  }
  std::vector<double> offdiag(npts - 1);
  for (int k = 1; k < npts; ++k) offdiag[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return detail::golub_welsch(offdiag, 2.0);
}

/// Gauss-Hermite rule for weight exp(-x^2); weights sum to sqrt(pi).
inline QuadratureRule gauss_hermite(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_hermite: npts must be >= 1");
  std::vector<double> offdiag(npts - 1);
  for (int k = 1; k < npts; ++k) offdiag[k - 1] = std::sqrt(0.5 * k);
  return detail::golub_welsch(offdiag, std::sqrt(M_PI));
}

/// Averages a vector-valued function over the box cell
/// [lo_0,hi_0] x ... x [lo_{n-1},hi_{n-1}] with the tensor product of a
/// 1-D Gauss rule: exact for polynomials up to the rule degree per axis.
/// `g` writes `p` values for a point with `n` coordinates.
inline void cell_average_into(
    const std::function<void(std::span<const double>, double*)>& g, int p,
    std::span<const double> lo, std::span<const double> hi, const QuadratureRule& rule,
    double* out) {
  const int n = static_cast<int>(lo.size());
  const int q = rule.size();
  std::vector<double> point(n), buf(p);
  std::vector<int> idx(n, 0);
  for (int c = 0; c < p; ++c) out[c] = 0.0;
  while (true) {
    double w = 1.0;
    for (int ax = 0; ax < n; ++ax) {
      const double mid = 0.5 * (lo[ax] + hi[ax]);
      const double half = 0.5 * (hi[ax] - lo[ax]);
      point[ax] = mid + half * rule.nodes[idx[ax]];
      w *= 0.5 * rule.weights[idx[ax]];  // reference weight / interval length 2
    }
    g(point, buf.data());
    for (int c = 0; c < p; ++c) out[c] += w * buf[c];
    int ax = n - 1;
    while (ax >= 0 && ++idx[ax] == q) idx[ax--] = 0;
    if (ax < 0) break;
  }
}

/// Scalar convenience overload of cell_average_into.
inline double cell_average(const std::function<double(std::span<const double>)>& g,
                           std::span<const double> lo, std::span<const double> hi,
                           const QuadratureRule& rule) {
  double out = 0.0;
  cell_average_into([&](std::span<const double> x, double* y) { *y = g(x); }, 1, lo, hi, rule,
                    &out);
  return out;
}

/// Maximum of `g` over the tensor quadrature nodes of a cell.
inline double cell_node_max(const std::function<double(std::span<const double>)>& g,
                            std::span<const double> lo, std::span<const double> hi,
                            const QuadratureRule& rule) {
  const int n = static_cast<int>(lo.size());
  const int q = rule.size();
  std::vector<double> point(n);
  std::vector<int> idx(n, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (int ax = 0; ax < n; ++ax) {
      const double mid = 0.5 * (lo[ax] + hi[ax]);
      const double half = 0.5 * (hi[ax] - lo[ax]);
      point[ax] = mid + half * rule.nodes[idx[ax]];
    }
    best = std::max(best, g(point));
    int ax = n - 1;
    while (ax >= 0 && ++idx[ax] == q) idx[ax--] = 0;
    if (ax < 0) break;
  }
  return best;
}

}  // namespace ymlp
