#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ymlp/grid.hpp"
#include "ymlp/model.hpp"

namespace ymlp {

enum class BurgersWave { rarefaction, shock };

/// Entropy solution of the Burgers Riemann problems used by the experiments:
/// rarefaction (-1 | 2) and shock (2 | -1), both with jump at x = 0.
inline double burgers_exact(BurgersWave kind, double x, double t) {
  if (!(t > 0)) throw std::invalid_argument("burgers_exact: t must be positive");
  if (kind == BurgersWave::rarefaction) {
    if (x <= -t) return -1.0;
    if (x >= 2.0 * t) return 2.0;
    return x / t;
  }
  const double shock_speed = 0.5;  // (2 + (-1)) / 2
  return x <= shock_speed * t ? 2.0 : -1.0;  // left state on the jump line
}

/// First-order finite volume reference solution at time T on its own fine
/// grid, evaluated at cell centers. Hyperbolic models use the local
/// Lax-Friedrichs (Rusanov) flux; the Allen-Cahn model uses explicit central
/// differences for the diffusion and pointwise reaction. d = 1 only.
struct FvReferenceResult {
  int nx = 0;
  double x_lower = 0.0, x_upper = 0.0;
  std::vector<double> u;  // [k*n + comp] at time T

  double h() const { return (x_upper - x_lower) / nx; }
  double center(int k) const { return x_lower + (k + 0.5) * h(); }

  /// nearest-cell sample at x (clamped to the domain)
  void sample(double x, std::span<double> out, int n) const {
    int k = static_cast<int>(std::floor((x - x_lower) / h()));
    k = std::clamp(k, 0, nx - 1);
    for (int comp = 0; comp < n; ++comp) out[comp] = u[k * n + comp];
  }
};

inline FvReferenceResult fv_reference(
    const PdeModel& model, int nt, int nx, double x_lower, double x_upper, double T,
    const std::function<void(std::span<const double>, double*)>& u0, Bc bc) {
  if (model.d != 1) throw std::invalid_argument("fv_reference: d = 1 only");
  const int n = model.n;
  const double h = (x_upper - x_lower) / nx;
  const double dt = T / nt;

  FvReferenceResult res;
  res.nx = nx;
  res.x_lower = x_lower;
  res.x_upper = x_upper;
  res.u.resize(static_cast<long>(nx) * n);

  std::vector<double> x(1);
  for (int k = 0; k < nx; ++k) {
    x[0] = x_lower + (k + 0.5) * h;
    u0(x, res.u.data() + static_cast<long>(k) * n);
  }

  std::vector<double> next(res.u.size());
  auto at = [&](std::vector<double>& field, int k) {
    if (bc == Bc::periodic)
      k = (k % nx + nx) % nx;
    else
      k = std::clamp(k, 0, nx - 1);
    return field.data() + static_cast<long>(k) * n;
  };

  if (model.has_laplacian && model.reaction) {
    if (dt > 0.5 * h * h) {
      std::ostringstream msg;
      msg << "fv_reference: explicit diffusion needs dt <= h^2/2 (dt=" << dt << ", h^2/2="
          << 0.5 * h * h << ")";
      throw std::invalid_argument(msg.str());
    }
    for (int j = 0; j < nt; ++j) {
      for (int k = 0; k < nx; ++k) {
        const double* um = at(res.u, k - 1);
        const double* uc = at(res.u, k);
        const double* up = at(res.u, k + 1);
        for (int comp = 0; comp < n; ++comp) {
          const double lap = (up[comp] - 2.0 * uc[comp] + um[comp]) / (h * h);
          const double reac = model.reaction(std::span<const double>(uc, n));
          next[static_cast<long>(k) * n + comp] = uc[comp] + dt * (lap - reac);
        }
      }
      res.u.swap(next);
    }
    return res;
  }

  // CFL check against the characteristic speed over the initial data sweep
  double speed = 0.0;
  for (int k = 0; k < nx; ++k)
    speed = std::max(speed, model.char_speed(std::span<const double>(res.u.data() + k * n, n)));
  if (speed * dt > h) {
    std::ostringstream msg;
    msg << "fv_reference: CFL violated (max speed " << speed << ", dt/h=" << dt / h << ")";
    throw std::invalid_argument(msg.str());
  }

  std::vector<double> flux_l(n), flux_r(n), numflux(static_cast<long>(nx + 1) * n);
  for (int j = 0; j < nt; ++j) {
    for (int e = 0; e <= nx; ++e) {  // edge e between cells e-1 and e
      const double* ul = at(res.u, e - 1);
      const double* ur = at(res.u, e);
      model.flux(std::span<const double>(ul, n), flux_l.data());
      model.flux(std::span<const double>(ur, n), flux_r.data());
      const double lam = std::max(model.char_speed(std::span<const double>(ul, n)),
                                  model.char_speed(std::span<const double>(ur, n)));
      for (int comp = 0; comp < n; ++comp)
        numflux[static_cast<long>(e) * n + comp] =
            0.5 * (flux_l[comp] + flux_r[comp]) - 0.5 * lam * (ur[comp] - ul[comp]);
    }
    for (int k = 0; k < nx; ++k)
      for (int comp = 0; comp < n; ++comp)
        next[static_cast<long>(k) * n + comp] =
            res.u[static_cast<long>(k) * n + comp] -
            dt / h *
                (numflux[static_cast<long>(k + 1) * n + comp] -
                 numflux[static_cast<long>(k) * n + comp]);
    res.u.swap(next);
  }
  return res;
}

/// Discrete L1 and L2 distances between a field and a reference sampled at
/// the same cell centers: L1 = h sum |du|, L2 = sqrt(h sum du^2).
struct ErrorNorms {
  double l1 = 0.0;
  double l2 = 0.0;
};

inline ErrorNorms error_norms(std::span<const double> u, std::span<const double> u_ref, double h) {
  if (u.size() != u_ref.size()) throw std::invalid_argument("error_norms: field size mismatch");
  ErrorNorms e;
  for (size_t i = 0; i < u.size(); ++i) {
    const double d = std::abs(u[i] - u_ref[i]);
    e.l1 += d;
    e.l2 += d * d;
  }
  e.l1 *= h;
  e.l2 = std::sqrt(h * e.l2);
  return e;
}

struct ConvergenceRow {
  int nt = 0, nx = 0, nxi = 0;
  double l1 = 0.0, l1_rate = std::numeric_limits<double>::quiet_NaN();
  double l2 = 0.0, l2_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Rates from consecutive runs: log(e_prev/e_cur)/log(ratio) with the
/// spatial refinement ratio; the first row has no rate.
inline std::vector<ConvergenceRow> convergence_table(std::span<const ConvergenceRow> runs) {
  std::vector<ConvergenceRow> rows(runs.begin(), runs.end());
  if (!rows.empty()) {
    rows[0].l1_rate = std::numeric_limits<double>::quiet_NaN();
    rows[0].l2_rate = std::numeric_limits<double>::quiet_NaN();
  }
  for (size_t i = 1; i < rows.size(); ++i) {
    const double ratio = static_cast<double>(rows[i].nx) / rows[i - 1].nx;
    if (!(ratio >= 1.0)) throw std::invalid_argument("convergence_table: resolutions must not decrease");
    if (ratio == 1.0) {  // degenerate repeat carries no rate information
      rows[i].l1_rate = 0.0;
      rows[i].l2_rate = 0.0;
      continue;
    }
    rows[i].l1_rate = std::log(rows[i - 1].l1 / rows[i].l1) / std::log(ratio);
    rows[i].l2_rate = std::log(rows[i - 1].l2 / rows[i].l2) / std::log(ratio);
  }
  return rows;
}

}  // namespace ymlp
