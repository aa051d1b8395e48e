#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ymlp/assembly.hpp"
#include "ymlp/grid.hpp"
#include "ymlp/quadrature.hpp"

namespace ymlp {

enum class RandomFamily { uniform, gaussian };

/// Collocation grid in the random parameter: tensor nodes with positive
/// weights summing to 1 (the density is folded into the weights).
struct CollocationSpec {
  int m = 1;                                    // random dimension
  std::vector<int> nodes_per_axis;              // size m
  std::vector<std::vector<double>> axis_nodes;  // [axis][node]
  std::vector<std::vector<double>> axis_weights;

  long node_count() const {
    long q = 1;
    for (int c : nodes_per_axis) q *= c;
    return q;
  }

  void node(long q, std::span<double> out) const {
    for (int ax = m - 1; ax >= 0; --ax) {
      out[ax] = axis_nodes[ax][q % nodes_per_axis[ax]];
      q /= nodes_per_axis[ax];
    }
  }

  double weight(long q) const {
    double w = 1.0;
    for (int ax = m - 1; ax >= 0; --ax) {
      w *= axis_weights[ax][q % nodes_per_axis[ax]];
      q /= nodes_per_axis[ax];
    }
    return w;
  }

  void validate() const {
    if (m < 1 || static_cast<int>(nodes_per_axis.size()) != m ||
        static_cast<int>(axis_nodes.size()) != m || static_cast<int>(axis_weights.size()) != m)
      throw std::invalid_argument("CollocationSpec: inconsistent axis counts");
    double total = 1.0;
    for (int ax = 0; ax < m; ++ax) {
      double s = 0.0;
      for (double w : axis_weights[ax]) {
        if (!(w > 0)) throw std::invalid_argument("CollocationSpec: weights must be positive");
        s += w;
      }
      total *= s;
    }
    if (std::abs(total - 1.0) > 1e-13)
      throw std::invalid_argument("CollocationSpec: weights must sum to 1");
  }
};

/// Gauss-Legendre collocation of uniform densities on per-axis intervals.
inline CollocationSpec uniform_collocation(std::span<const double> lower,
                                           std::span<const double> upper,
                                           std::span<const int> nodes) {
  CollocationSpec spec;
  spec.m = static_cast<int>(nodes.size());
  spec.nodes_per_axis.assign(nodes.begin(), nodes.end());
  spec.axis_nodes.resize(spec.m);
  spec.axis_weights.resize(spec.m);
  for (int ax = 0; ax < spec.m; ++ax) {
    const QuadratureRule rule = gauss_legendre(nodes[ax]);
    const double mid = 0.5 * (lower[ax] + upper[ax]);
    const double half = 0.5 * (upper[ax] - lower[ax]);
    for (int i = 0; i < rule.size(); ++i) {
      spec.axis_nodes[ax].push_back(mid + half * rule.nodes[i]);
      spec.axis_weights[ax].push_back(0.5 * rule.weights[i]);
    }
  }
  spec.validate();
  return spec;
}

/// Gauss-Hermite collocation of independent normal densities.
inline CollocationSpec gaussian_collocation(std::span<const double> mean,
                                            std::span<const double> sigma,
                                            std::span<const int> nodes) {
  CollocationSpec spec;
  spec.m = static_cast<int>(nodes.size());
  spec.nodes_per_axis.assign(nodes.begin(), nodes.end());
  spec.axis_nodes.resize(spec.m);
  spec.axis_weights.resize(spec.m);
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  for (int ax = 0; ax < spec.m; ++ax) {
    const QuadratureRule rule = gauss_hermite(nodes[ax]);
    for (int i = 0; i < rule.size(); ++i) {
      spec.axis_nodes[ax].push_back(mean[ax] + std::sqrt(2.0) * sigma[ax] * rule.nodes[i]);
      spec.axis_weights[ax].push_back(rule.weights[i] * inv_sqrt_pi);
    }
  }
  spec.validate();
  return spec;
}

enum class CollocationNormalization {
  per_node,  // one row per (k, q): sum_l F = w_q; the nodes decouple exactly
  joint,     // one row per k: sum_{q,l} F = 1
};

/// Initial measure for the random problem: mass w_q on the Dirac of
/// u0(x_k, omega_q), per (spatial cell, collocation node).
inline std::vector<double> collocation_dirac_init(
    const std::function<void(std::span<const double>, std::span<const double>, double*)>& u0,
    const GridSpec& grid, const CollocationSpec& colloc,
    DiracMode mode = DiracMode::mean_preserving) {
  colloc.validate();
  const long K = grid.space_cells(), L = grid.phase_cells(), Q = colloc.node_count();
  std::vector<double> f(K * Q * L, 0.0);
  std::vector<double> x(grid.d()), omega(colloc.m), v(grid.n());
  for (long k = 0; k < K; ++k) {
    grid.space_cell_center(k, x);
    for (long q = 0; q < Q; ++q) {
      colloc.node(q, omega);
      u0(x, omega, v.data());
      detail::scatter_dirac(v, grid, mode, colloc.weight(q),
                            std::span<double>(f.data() + (k * Q + q) * L, L));
    }
  }
  return f;
}

/// Stochastic-collocation per-step LP: the transport constraint holds
/// independently per collocation node; the normalization rows follow the
/// selected mode.
inline LpStepProblem assemble_collocation_step(
    const PdeModel& model, const GridSpec& grid, const PhaseCoefficients& pc,
    const CollocationSpec& colloc,
    CollocationNormalization normalization = CollocationNormalization::per_node) {
  colloc.validate();
  if (pc.n != grid.n() || pc.phase_cells != grid.phase_cells())
    throw std::invalid_argument("assemble_collocation_step: coefficients do not match grid");
  const long K = grid.space_cells();
  const long L = grid.phase_cells();
  const long Q = colloc.node_count();
  const StencilCoeffs st = hyperbolic_stencil(pc);

  LpStepProblem p;
  p.space_cells = K;
  p.n_omega = Q;
  p.phase_cells = L;
  p.n_comp = pc.n;
  p.xi = detail::tile_objective(model, pc, K * Q);

  std::vector<Triplet> ta;
  ta.reserve(K * Q * L);
  if (normalization == CollocationNormalization::joint) {
    p.a_rhs.assign(K, 1.0);
    for (long k = 0; k < K; ++k)
      for (long i = 0; i < Q * L; ++i) ta.push_back({k, k * Q * L + i, 1.0});
    p.A = SparseMatrix::from_triplets(K, K * Q * L, std::move(ta));
  } else {
    p.a_rhs.resize(K * Q);
    for (long k = 0; k < K; ++k)
      for (long q = 0; q < Q; ++q) {
        p.a_rhs[k * Q + q] = colloc.weight(q);
        for (long l = 0; l < L; ++l) ta.push_back({k * Q + q, (k * Q + q) * L + l, 1.0});
      }
    p.A = SparseMatrix::from_triplets(K * Q, K * Q * L, std::move(ta));
  }

  p.B = detail::moment_rows(pc, K * Q);

  std::vector<Triplet> td;
  td.reserve(K * Q * L * pc.n * (2 * grid.d() + 1));
  detail::for_each_transport_entry(grid, Q, st,
                                   [&](long row, long col, double v) { td.push_back({row, col, v}); });
  p.D = SparseMatrix::from_triplets(K * Q * pc.n, K * Q * L, std::move(td));
  return p;
}

}  // namespace ymlp
