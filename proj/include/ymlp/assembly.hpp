#pragma once

#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ymlp/grid.hpp"
#include "ymlp/model.hpp"
#include "ymlp/quadrature.hpp"
#include "ymlp/sparse.hpp"

namespace ymlp {

/// How the per-cell characteristic speed entering the viscosity is sampled.
enum class ViscosityEval {
  cell_center,  // rho evaluated at the cell center (default)
  node_max,     // max of rho over the quadrature nodes of the cell
};

/// Phase-cell averages and the Lax-Friedrichs stencil weights derived from
/// them. Layouts: u_bar[l*n + comp]; f_bar[(l*n + comp)*d + axis];
/// a/b/c[axis][l*n + comp]. The per-axis triples satisfy
/// a + b + c = -u_bar componentwise; eps stores the axis-0 viscosity
/// 0.5 * hx * rho_cell (the assembler rescales rho_cell per axis).
struct PhaseCoefficients {
  int n = 1, d = 1;
  long phase_cells = 0;
  std::vector<double> u_bar;
  std::vector<double> f_bar;
  std::vector<double> eta_bar;     // objective density averages (unsigned)
  std::vector<double> rho_cell;    // per-cell characteristic speed sample
  std::vector<double> eps;         // 0.5 * hx(0) * rho_cell
  std::vector<std::vector<double>> a, b, c;
  std::vector<double> gprime_bar;  // reaction averages (empty unless present)
};

inline PhaseCoefficients phase_coefficients(const PdeModel& model, const GridSpec& grid,
                                            int quad_points = 3,
                                            ViscosityEval viscosity = ViscosityEval::cell_center) {
  if (model.n != grid.n())
    throw std::invalid_argument("phase_coefficients: model/grid state dimension mismatch");
  const int n = grid.n();
  const int d = grid.d();
  const long L = grid.phase_cells();
  const QuadratureRule rule = gauss_legendre(quad_points);
  PhaseCoefficients pc;
  pc.n = n;
  pc.d = d;
  pc.phase_cells = L;
  pc.u_bar.resize(L * n);
  pc.f_bar.resize(L * n * d);
  pc.eta_bar.resize(L);
  pc.rho_cell.resize(L);
  pc.eps.resize(L);
  pc.a.assign(d, std::vector<double>(L * n));
  pc.b.assign(d, std::vector<double>(L * n));
  pc.c.assign(d, std::vector<double>(L * n));
  if (model.reaction) pc.gprime_bar.resize(L);

  std::vector<double> lo(n), hi(n), fbuf(n * d);
  for (long l = 0; l < L; ++l) {
    grid.phase_cell_bounds(l, lo, hi);
    try {
      // identity average = cell center on a uniform grid, but computed by
      // quadrature so the same rule covers every integrand
      cell_average_into([](std::span<const double> xi, double* out) {
        for (size_t c = 0; c < xi.size(); ++c) out[c] = xi[c];
      }, n, lo, hi, rule, pc.u_bar.data() + l * n);
      cell_average_into([&](std::span<const double> xi, double* out) { model.flux(xi, out); },
                        n * d, lo, hi, rule, fbuf.data());
      for (int comp = 0; comp < n; ++comp)
        for (int ax = 0; ax < d; ++ax)
          pc.f_bar[(l * n + comp) * d + ax] = fbuf[comp * d + ax];
      pc.eta_bar[l] = cell_average(model.objective_density, lo, hi, rule);
      if (viscosity == ViscosityEval::node_max) {
        pc.rho_cell[l] = cell_node_max(model.char_speed, lo, hi, rule);
      } else {
        std::vector<double> mid(n);
        for (int c = 0; c < n; ++c) mid[c] = 0.5 * (lo[c] + hi[c]);
        pc.rho_cell[l] = model.char_speed(mid);
      }
      if (model.reaction) pc.gprime_bar[l] = cell_average(model.reaction, lo, hi, rule);
    } catch (const std::domain_error& e) {
      std::ostringstream msg;
      msg << e.what() << " (phase cell " << l << ")";
      throw std::domain_error(msg.str());
    }
    pc.eps[l] = 0.5 * grid.hx(0) * pc.rho_cell[l];
  }

  const double dt = grid.dt();
  for (int ax = 0; ax < d; ++ax) {
    const double h = grid.hx(ax);
    for (long l = 0; l < L; ++l) {
      const double nu = pc.rho_cell[l] * dt / (2.0 * h);  // eps * dt / h^2 with eps = h*rho/2
      for (int comp = 0; comp < n; ++comp) {
        const double u = pc.u_bar[l * n + comp];
        const double f = pc.f_bar[(l * n + comp) * d + ax];
        pc.a[ax][l * n + comp] = -f * dt / (2.0 * h) - nu * u;
        pc.b[ax][l * n + comp] = -u + 2.0 * nu * u;
        pc.c[ax][l * n + comp] = f * dt / (2.0 * h) - nu * u;
      }
    }
  }
  return pc;
}

/// Stencil weights of the transport matrix D: per-axis off-diagonal blocks
/// plus one diagonal block that counts -u_bar exactly once.
struct StencilCoeffs {
  int n = 1, d = 1;
  long phase_cells = 0;
  std::vector<std::vector<double>> a, c;  // [axis][l*n + comp]
  std::vector<double> diag;               // [l*n + comp]
};

inline StencilCoeffs hyperbolic_stencil(const PhaseCoefficients& pc) {
  StencilCoeffs st;
  st.n = pc.n;
  st.d = pc.d;
  st.phase_cells = pc.phase_cells;
  st.a = pc.a;
  st.c = pc.c;
  st.diag.assign(pc.phase_cells * pc.n, 0.0);
  for (long i = 0; i < pc.phase_cells * pc.n; ++i) {
    double s = 0.0;
    for (int ax = 0; ax < pc.d; ++ax) s += pc.b[ax][i];
    st.diag[i] = s + (pc.d - 1) * pc.u_bar[i];
  }
  return st;
}

/// Reaction-diffusion stencil: physical Laplacian with unit diffusivity times
/// u_bar, reaction averages on the diagonal at the old time level.
inline StencilCoeffs allen_cahn_stencil(const PhaseCoefficients& pc, const GridSpec& grid) {
  if (pc.gprime_bar.empty())
    throw std::invalid_argument("allen_cahn_stencil: model has no reaction term");
  StencilCoeffs st;
  st.n = pc.n;
  st.d = pc.d;
  st.phase_cells = pc.phase_cells;
  const double dt = grid.dt();
  st.a.assign(pc.d, std::vector<double>(pc.phase_cells * pc.n));
  st.c.assign(pc.d, std::vector<double>(pc.phase_cells * pc.n));
  st.diag.assign(pc.phase_cells * pc.n, 0.0);
  for (long l = 0; l < pc.phase_cells; ++l)
    for (int comp = 0; comp < pc.n; ++comp) {
      const long i = l * pc.n + comp;
      const double u = pc.u_bar[i];
      double diag = -u + dt * pc.gprime_bar[l];
      for (int ax = 0; ax < pc.d; ++ax) {
        const double nu = dt / (grid.hx(ax) * grid.hx(ax));
        st.a[ax][i] = -nu * u;
        st.c[ax][i] = -nu * u;
        diag += 2.0 * nu * u;
      }
      st.diag[i] = diag;
    }
  return st;
}

namespace detail {

struct Neighbor {
  long cell;
  bool folded;  // outflow ghost copy landed on the cell itself
};

inline Neighbor space_neighbor(std::span<const int> ki, int axis, int dir,
                               std::span<const int> dims, Bc bc) {
  std::vector<int> kj(ki.begin(), ki.end());
  kj[axis] += dir;
  if (kj[axis] < 0 || kj[axis] >= dims[axis]) {
    if (bc == Bc::periodic) {
      kj[axis] = (kj[axis] + dims[axis]) % dims[axis];
      return {flatten_multi(kj, dims), false};
    }
    kj[axis] = std::clamp(kj[axis], 0, dims[axis] - 1);
    return {flatten_multi(kj, dims), true};
  }
  return {flatten_multi(kj, dims), false};
}

/// Enumerates every entry of the transport matrix D (rows (k, q, comp),
/// columns (k', q, l)). `emit(row, col, value)` is called once per stored
/// entry location; duplicate locations (stencil folds at outflow
/// boundaries, multiple axes hitting the diagonal) are emitted separately.
template <class Emit>
void for_each_transport_entry(const GridSpec& grid, long n_omega, const StencilCoeffs& st,
                              Emit&& emit) {
  const int d = grid.d();
  const int n = st.n;
  const long L = st.phase_cells;
  const long K = grid.space_cells();
  std::vector<int> ki(d);
  for (long k = 0; k < K; ++k) {
    unflatten_multi(k, grid.nx, ki);
    for (long q = 0; q < n_omega; ++q) {
      const long row0 = (k * n_omega + q) * n;
      const long col_self = (k * n_omega + q) * L;
      for (long l = 0; l < L; ++l)
        for (int comp = 0; comp < n; ++comp)
          emit(row0 + comp, col_self + l, st.diag[l * n + comp]);
      for (int ax = 0; ax < d; ++ax) {
        const Neighbor km = space_neighbor(ki, ax, -1, grid.nx, grid.bc);
        const Neighbor kp = space_neighbor(ki, ax, +1, grid.nx, grid.bc);
        const long col_m = (km.cell * n_omega + q) * L;
        const long col_p = (kp.cell * n_omega + q) * L;
        for (long l = 0; l < L; ++l)
          for (int comp = 0; comp < n; ++comp) {
            emit(row0 + comp, col_m + l, st.a[ax][l * n + comp]);
            emit(row0 + comp, col_p + l, st.c[ax][l * n + comp]);
          }
      }
    }
  }
}

}  // namespace detail

/// rhs -= or = -(D f_prev): the transport rows applied matrix-free.
inline void apply_transport(const GridSpec& grid, long n_omega, const StencilCoeffs& st,
                            std::span<const double> f_prev, std::span<double> rhs) {
  std::fill(rhs.begin(), rhs.end(), 0.0);
  detail::for_each_transport_entry(grid, n_omega, st,
                                   [&](long row, long col, double v) { rhs[row] -= v * f_prev[col]; });
}

/// One time level of the LP in matrix form. The step constraint reads
/// A F^{j+1} = a_rhs, B F^{j+1} = -D F^j.
struct LpStepProblem {
  long space_cells = 0;
  long n_omega = 1;
  long phase_cells = 0;
  int n_comp = 1;
  std::vector<double> xi;     // minimization objective (sign already applied)
  std::vector<double> a_rhs;  // rhs of the normalization rows
  SparseMatrix A, B, D;

  long s() const { return space_cells * n_omega * phase_cells; }
  long r() const { return A.rows() + B.rows(); }
  SparseMatrix stacked() const { return A.vstack(B); }

  std::vector<double> rhs_for(std::span<const double> f_prev) const {
    std::vector<double> c(a_rhs.begin(), a_rhs.end());
    std::vector<double> dpart(D.rows());
    D.matvec(f_prev, dpart);
    for (double& v : dpart) v = -v;
    c.insert(c.end(), dpart.begin(), dpart.end());
    return c;
  }
};

namespace detail {

inline std::vector<double> tile_objective(const PdeModel& model, const PhaseCoefficients& pc,
                                          long blocks) {
  const double sign = model.objective_kind == ObjectiveKind::entropy_max ? -1.0 : 1.0;
  std::vector<double> xi(blocks * pc.phase_cells);
  for (long b = 0; b < blocks; ++b)
    for (long l = 0; l < pc.phase_cells; ++l) xi[b * pc.phase_cells + l] = sign * pc.eta_bar[l];
  return xi;
}

inline SparseMatrix moment_rows(const PhaseCoefficients& pc, long blocks) {
  std::vector<Triplet> ts;
  ts.reserve(blocks * pc.phase_cells * pc.n);
  for (long b = 0; b < blocks; ++b)
    for (long l = 0; l < pc.phase_cells; ++l)
      for (int comp = 0; comp < pc.n; ++comp)
        ts.push_back({b * pc.n + comp, b * pc.phase_cells + l, pc.u_bar[l * pc.n + comp]});
  return SparseMatrix::from_triplets(blocks * pc.n, blocks * pc.phase_cells, std::move(ts));
}

inline LpStepProblem build_step(const PdeModel& model, const GridSpec& grid,
                                const PhaseCoefficients& pc, const StencilCoeffs& st) {
  const long K = grid.space_cells();
  const long L = grid.phase_cells();
  LpStepProblem p;
  p.space_cells = K;
  p.phase_cells = L;
  p.n_comp = pc.n;
  p.xi = tile_objective(model, pc, K);
  p.a_rhs.assign(K, 1.0);

  std::vector<Triplet> ta;
  ta.reserve(K * L);
  for (long k = 0; k < K; ++k)
    for (long l = 0; l < L; ++l) ta.push_back({k, k * L + l, 1.0});
  p.A = SparseMatrix::from_triplets(K, K * L, std::move(ta));

  p.B = moment_rows(pc, K);

  std::vector<Triplet> td;
  td.reserve(K * L * pc.n * (2 * grid.d() + 1));
  detail::for_each_transport_entry(grid, 1, st,
                                   [&](long row, long col, double v) { td.push_back({row, col, v}); });
  p.D = SparseMatrix::from_triplets(K * pc.n, K * L, std::move(td));
  return p;
}

}  // namespace detail

/// Hyperbolic per-step LP matrices (Lax-Friedrichs transport constraint).
inline LpStepProblem assemble_step(const PdeModel& model, const GridSpec& grid,
                                   const PhaseCoefficients& pc) {
  if (pc.n != grid.n() || pc.phase_cells != grid.phase_cells())
    throw std::invalid_argument("assemble_step: coefficients do not match grid");
  return detail::build_step(model, grid, pc, hyperbolic_stencil(pc));
}

/// Reaction-diffusion per-step LP matrices (Allen-Cahn variant).
inline LpStepProblem assemble_allen_cahn_step(const PdeModel& model, const GridSpec& grid,
                                              const PhaseCoefficients& pc) {
  if (!model.has_laplacian || !model.reaction)
    throw std::invalid_argument("assemble_allen_cahn_step: model is not a reaction-diffusion model");
  return detail::build_step(model, grid, pc, allen_cahn_stencil(pc, grid));
}

/// The LP over all time levels at once: M = (A; B) with
/// A = I_{N_t} (x) A_step and B = J_{N_t}(0)^T (x) D_step + I_{N_t} (x) B_step,
/// unknowns ordered by time level.
struct LpGlobalProblem {
  long nt = 0;
  long step_vars = 0;
  std::vector<double> xi;
  std::vector<double> rhs;
  SparseMatrix M;

  long s() const { return nt * step_vars; }
  long r() const { return M.rows(); }
};

inline LpGlobalProblem assemble_global(const PdeModel& model, const GridSpec& grid,
                                       const PhaseCoefficients& pc, std::span<const double> f0,
                                       long max_variables = 4'000'000) {
  const LpStepProblem step = assemble_step(model, grid, pc);
  const long nt = grid.nt;
  const long s_step = step.s();
  if (nt * s_step > max_variables) {
    std::ostringstream msg;
    msg << "assemble_global: " << nt * s_step << " variables exceed the cap " << max_variables
        << "; use the per-step solve mode";
    throw std::invalid_argument(msg.str());
  }
  if (static_cast<long>(f0.size()) != s_step)
    throw std::invalid_argument("assemble_global: initial field has wrong size");

  LpGlobalProblem g;
  g.nt = nt;
  g.step_vars = s_step;
  g.xi.resize(nt * s_step);
  for (long j = 0; j < nt; ++j)
    std::copy(step.xi.begin(), step.xi.end(), g.xi.begin() + j * s_step);

  const long ra = step.A.rows(), rb = step.B.rows();
  std::vector<Triplet> ts;
  ts.reserve(nt * (step.A.nnz() + step.B.nnz() + step.D.nnz()));
  auto add_block = [&](const SparseMatrix& m, long row0, long col0) {
    for (long r = 0; r < m.rows(); ++r) {
      const auto cols = m.row_cols(r);
      const auto vals = m.row_vals(r);
      for (size_t i = 0; i < cols.size(); ++i) ts.push_back({row0 + r, col0 + cols[i], vals[i]});
    }
  };
  for (long j = 0; j < nt; ++j) add_block(step.A, j * ra, j * s_step);
  for (long j = 0; j < nt; ++j) {
    add_block(step.B, nt * ra + j * rb, j * s_step);
    if (j > 0) add_block(step.D, nt * ra + j * rb, (j - 1) * s_step);
  }
  g.M = SparseMatrix::from_triplets(nt * ra + nt * rb, nt * s_step, std::move(ts));

  g.rhs.assign(nt * ra + nt * rb, 0.0);
  for (long j = 0; j < nt; ++j)
    std::copy(step.a_rhs.begin(), step.a_rhs.end(), g.rhs.begin() + j * ra);
  std::vector<double> d0(rb);
  step.D.matvec(f0, d0);
  for (long i = 0; i < rb; ++i) g.rhs[nt * ra + i] = -d0[i];
  return g;
}

}  // namespace ymlp
