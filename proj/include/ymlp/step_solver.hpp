#pragma once

#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ymlp/assembly.hpp"
#include "ymlp/collocation.hpp"
#include "ymlp/ipm.hpp"

namespace ymlp {

enum class SolveMode {
  cell,  // the per-step LP split into independent per-spatial-cell LPs
  step,  // one monolithic LP per time step
};

struct StepDiagnostics {
  int step = 0;
  int max_iterations = 0;
  double max_mu = 0.0;
  double max_rp = 0.0;
  double objective = 0.0;  // minimization objective over the whole level
};

/// Advances the measure one time level at a time. The constraint rows of a
/// step couple spatial cells only through the right-hand side, so the
/// default mode solves one small LP per spatial cell; the monolithic mode
/// feeds the whole step to the sparse IPM and yields the same optima.
class StepChainSolver {
 public:
  StepChainSolver(const PdeModel& model, const GridSpec& grid, const PhaseCoefficients& pc,
                  IpmOptions ipm = {}, SolveMode mode = SolveMode::cell,
                  std::optional<CollocationSpec> colloc = std::nullopt,
                  CollocationNormalization normalization = CollocationNormalization::per_node)
      : grid_(grid), n_(pc.n), L_(pc.phase_cells), mode_(mode), colloc_(std::move(colloc)) {
    grid_.validate();
    q_count_ = colloc_ ? colloc_->node_count() : 1;
    stencil_ = (model.objective_kind == ObjectiveKind::regularized_potential_min && model.has_laplacian)
                   ? allen_cahn_stencil(pc, grid_)
                   : hyperbolic_stencil(pc);
    if (mode_ == SolveMode::cell) {
      build_cell_solver(model, pc, normalization);
    } else {
      step_problem_ = colloc_ ? assemble_collocation_step(model, grid_, pc, *colloc_, normalization)
                              : assemble_step(model, grid_, pc);
      step_solver_ = std::make_unique<IpmSolver>(step_problem_->xi, step_problem_->stacked(), ipm);
    }
    if (mode_ == SolveMode::cell) cell_solver_ = std::make_unique<IpmSolver>(cell_xi_, cell_m_, ipm);
  }

  long level_size() const { return grid_.space_cells() * q_count_ * L_; }

  /// F^{j+1} from F^j; throws with step/cell context when a level is infeasible.
  StepDiagnostics advance(std::span<const double> f_prev, std::span<double> f_next, int step_index) {
    if (static_cast<long>(f_prev.size()) != level_size() ||
        static_cast<long>(f_next.size()) != level_size())
      throw std::invalid_argument("StepChainSolver::advance: field size mismatch");
    StepDiagnostics diag;
    diag.step = step_index;

    std::vector<double> transport_rhs(grid_.space_cells() * q_count_ * n_);
    apply_transport(grid_, q_count_, stencil_, f_prev, transport_rhs);

    if (mode_ == SolveMode::cell) {
      const long K = grid_.space_cells();
      const long rows_a = static_cast<long>(cell_a_rhs_.size());
      std::vector<double> c(rows_a + q_count_ * n_);
      std::copy(cell_a_rhs_.begin(), cell_a_rhs_.end(), c.begin());
      for (long k = 0; k < K; ++k) {
        std::copy(transport_rhs.begin() + k * q_count_ * n_,
                  transport_rhs.begin() + (k + 1) * q_count_ * n_, c.begin() + rows_a);
        LpSolution sol = cell_solver_->solve(c);
        if (sol.status != LpStatus::optimal) fail(step_index, k, sol);
        std::copy(sol.F.data(), sol.F.data() + q_count_ * L_, f_next.begin() + k * q_count_ * L_);
        diag.max_iterations = std::max(diag.max_iterations, sol.iterations);
        diag.max_mu = std::max(diag.max_mu, sol.mu);
        diag.max_rp = std::max(diag.max_rp, sol.rp_scaled);
        diag.objective += sol.objective;
      }
    } else {
      // transport_rhs already carries -(D f_prev)
      std::vector<double> c(step_problem_->a_rhs.begin(), step_problem_->a_rhs.end());
      c.insert(c.end(), transport_rhs.begin(), transport_rhs.end());
      LpSolution sol = step_solver_->solve(c);
      if (sol.status != LpStatus::optimal) fail(step_index, -1, sol);
      std::copy(sol.F.data(), sol.F.data() + level_size(), f_next.begin());
      diag.max_iterations = sol.iterations;
      diag.max_mu = sol.mu;
      diag.max_rp = sol.rp_scaled;
      diag.objective = sol.objective;
    }
    return diag;
  }

  const StencilCoeffs& stencil() const { return stencil_; }

 private:
  [[noreturn]] void fail(int step_index, long cell, const LpSolution& sol) const {
    std::ostringstream msg;
    msg << "LP " << to_string(sol.status) << " at time step " << step_index;
    if (cell >= 0) msg << ", spatial cell " << cell;
    msg << " (mu=" << sol.mu << ", rp=" << sol.rp_scaled
        << "); consider enlarging the phase box";
    throw std::runtime_error(msg.str());
  }

  void build_cell_solver(const PdeModel& model, const PhaseCoefficients& pc,
                         CollocationNormalization normalization) {
    const long Q = q_count_;
    const long vars = Q * L_;
    cell_xi_.resize(vars);
    const double sign = model.objective_kind == ObjectiveKind::entropy_max ? -1.0 : 1.0;
    for (long q = 0; q < Q; ++q)
      for (long l = 0; l < L_; ++l) cell_xi_[q * L_ + l] = sign * pc.eta_bar[l];

    std::vector<Triplet> ts;
    long rows_a;
    if (colloc_ && normalization == CollocationNormalization::joint) {
      rows_a = 1;
      cell_a_rhs_.assign(1, 1.0);
      for (long i = 0; i < vars; ++i) ts.push_back({0, i, 1.0});
    } else {
      rows_a = Q;
      cell_a_rhs_.resize(Q);
      for (long q = 0; q < Q; ++q) {
        cell_a_rhs_[q] = colloc_ ? colloc_->weight(q) : 1.0;
        for (long l = 0; l < L_; ++l) ts.push_back({q, q * L_ + l, 1.0});
      }
    }
    for (long q = 0; q < Q; ++q)
      for (long l = 0; l < L_; ++l)
        for (int comp = 0; comp < n_; ++comp)
          ts.push_back({rows_a + q * n_ + comp, q * L_ + l, pc.u_bar[l * n_ + comp]});
    cell_m_ = SparseMatrix::from_triplets(rows_a + Q * n_, vars, std::move(ts));
  }

  GridSpec grid_;
  int n_;
  long L_;
  long q_count_ = 1;
  SolveMode mode_;
  std::optional<CollocationSpec> colloc_;
  StencilCoeffs stencil_;

  // cell mode: one shared LP skeleton for every spatial cell
  std::vector<double> cell_xi_;
  std::vector<double> cell_a_rhs_;
  SparseMatrix cell_m_;
  std::unique_ptr<IpmSolver> cell_solver_;

  // monolithic mode
  std::optional<LpStepProblem> step_problem_;
  std::unique_ptr<IpmSolver> step_solver_;
};

}  // namespace ymlp
