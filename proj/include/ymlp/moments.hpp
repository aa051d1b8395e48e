#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "ymlp/assembly.hpp"
#include "ymlp/grid.hpp"
#include "ymlp/model.hpp"

namespace ymlp {

/// Cell averages of the model's energy density over the phase grid.
inline std::vector<double> energy_cell_averages(const PdeModel& model, const GridSpec& grid,
                                                int quad_points = 3) {
  const long L = grid.phase_cells();
  const int n = grid.n();
  const QuadratureRule rule = gauss_legendre(quad_points);
  std::vector<double> e(L);
  std::vector<double> lo(n), hi(n);
  for (long l = 0; l < L; ++l) {
    grid.phase_cell_bounds(l, lo, hi);
    e[l] = cell_average(model.energy, lo, hi, rule);
  }
  return e;
}

/// Mean field of one time level: u_k = sum_{q,l} u_bar_l F_{kql}.
/// With a random axis this is the omega-expectation.
inline void mean_field_level(std::span<const double> f, long K, long Q, long L, int n,
                             std::span<const double> u_bar, std::span<double> out) {
  if (static_cast<long>(f.size()) != K * Q * L || static_cast<long>(out.size()) != K * n)
    throw std::invalid_argument("mean_field_level: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (long k = 0; k < K; ++k)
    for (long q = 0; q < Q; ++q)
      for (long l = 0; l < L; ++l) {
        const double m = f[(k * Q + q) * L + l];
        if (m == 0.0) continue;
        for (int comp = 0; comp < n; ++comp) out[k * n + comp] += m * u_bar[l * n + comp];
      }
}

/// Measure-averaged energy of one time level: E_hat_k = sum e_bar_l F_{kql}.
inline void energy_level(std::span<const double> f, long K, long Q, long L,
                         std::span<const double> e_bar, std::span<double> out) {
  for (long k = 0; k < K; ++k) {
    double acc = 0.0;
    for (long q = 0; q < Q; ++q)
      for (long l = 0; l < L; ++l) acc += e_bar[l] * f[(k * Q + q) * L + l];
    out[k] = acc;
  }
}

/// Energy defect of one level: E_hat minus the energy of the mean.
/// Nonnegative up to discretization whenever the energy density is convex.
inline void energy_defect_level(std::span<const double> e_hat, std::span<const double> u, long K,
                                int n, const PdeModel& model, std::span<double> out) {
  for (long k = 0; k < K; ++k)
    out[k] = e_hat[k] - model.energy(std::span<const double>(u.data() + k * n, n));
}

/// h_x^d * sum_k of a per-cell field.
inline double spatial_total(std::span<const double> field, const GridSpec& grid) {
  double cell_volume = 1.0;
  for (int ax = 0; ax < grid.d(); ++ax) cell_volume *= grid.hx(ax);
  double s = 0.0;
  for (double v : field) s += v;
  return cell_volume * s;
}

/// Allen-Cahn energies of one time level (d = 1, periodic in x).
/// The measure-averaged energies carry the literal squared-x-gradient of the
/// measure density; the defects pair each averaged potential with the same
/// potential of the mean so the gradient terms cancel.
struct AllenCahnLevelEnergies {
  std::vector<double> e;          // G(u) + |u_x|^2/2
  std::vector<double> e_hat;      // <G> + gradient term
  std::vector<double> e_re;       // regularized potential of the mean + |u_x|^2/2
  std::vector<double> e_hat_re;   // <G_reg> + gradient term
  std::vector<double> defect;     // <G> - G(u)
  std::vector<double> defect_re;  // <G_reg> - G_reg(u)
};

inline AllenCahnLevelEnergies allen_cahn_energies_level(std::span<const double> f,
                                                        std::span<const double> u,
                                                        const GridSpec& grid,
                                                        const PhaseCoefficients& pc,
                                                        std::span<const double> g_bar,
                                                        double alpha) {
  if (grid.d() != 1 || grid.n() != 1)
    throw std::invalid_argument("allen_cahn_energies_level: expects d = n = 1");
  if (grid.bc != Bc::periodic)
    throw std::invalid_argument("allen_cahn_energies_level: expects a periodic grid");
  const long K = grid.space_cells();
  const long L = grid.phase_cells();
  const double hx = grid.hx(0);
  const double hxi = grid.hxi(0);

  AllenCahnLevelEnergies out;
  out.e.resize(K);
  out.e_hat.resize(K);
  out.e_re.resize(K);
  out.e_hat_re.resize(K);
  out.defect.resize(K);
  out.defect_re.resize(K);

  for (long k = 0; k < K; ++k) {
    const long km = (k - 1 + K) % K;
    const long kp = (k + 1) % K;
    const double du = (u[kp] - u[km]) / (2.0 * hx);
    double grad_f = 0.0;  // 0.5 * integral of (d/dx of the density)^2 dxi
    for (long l = 0; l < L; ++l) {
      const double df = (f[kp * L + l] - f[km * L + l]) / (2.0 * hx * hxi);
      grad_f += 0.5 * df * df * hxi;
    }
    double g_avg = 0.0, greg_avg = 0.0;
    for (long l = 0; l < L; ++l) {
      g_avg += g_bar[l] * f[k * L + l];
      greg_avg += pc.eta_bar[l] * f[k * L + l];  // objective averages are G + alpha/2 xi^2
    }
    const double g_mean = allen_cahn_potential(u[k]);
    const double greg_mean = g_mean + 0.5 * alpha * u[k] * u[k];
    out.e[k] = g_mean + 0.5 * du * du;
    out.e_re[k] = greg_mean + 0.5 * du * du;
    out.e_hat[k] = g_avg + grad_f;
    out.e_hat_re[k] = greg_avg + grad_f;
    out.defect[k] = g_avg - g_mean;
    out.defect_re[k] = greg_avg - greg_mean;
  }
  return out;
}

/// Observables per stored time level. Hyperbolic models fill u, e_hat,
/// defect and the totals; Allen-Cahn additionally fills the regularized
/// energies and defects.
struct MomentReport {
  long K = 0;
  int n = 1;
  int levels = 0;

  std::vector<double> u;       // [j*K*n + k*n + comp]
  std::vector<double> e_hat;   // [j*K + k]
  std::vector<double> defect;  // [j*K + k]

  std::vector<double> total_u;       // [j*n + comp]
  std::vector<double> total_e_hat;   // [j]
  std::vector<double> total_defect;  // [j]

  // Allen-Cahn extras
  std::vector<double> e, e_re, e_hat_re, defect_re;
  std::vector<double> total_e, total_e_re, total_e_hat_re, total_defect_re;

  std::span<const double> u_level(int j) const {
    return {u.data() + static_cast<long>(j) * K * n, static_cast<size_t>(K * n)};
  }
  std::span<const double> field_level(const std::vector<double>& field, int j) const {
    return {field.data() + static_cast<long>(j) * K, static_cast<size_t>(K)};
  }
};

}  // namespace ymlp
