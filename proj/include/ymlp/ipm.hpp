#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ymlp/sparse.hpp"

namespace ymlp {

struct IpmOptions {
  double sigma = 0.1;      // centering parameter in (0,1)
  double tol_p = 1e-8;     // scaled primal residual tolerance
  double tol_d = 1e-8;     // scaled dual residual tolerance
  double tol_gap = 1e-8;   // duality measure tolerance
  int max_iter = 200;
  double ftb = 0.995;      // fraction-to-boundary factor
  double reg = 1e-10;      // normal-equation diagonal regularization
  double reg_max = 1e-6;   // escalation cap (x10 per retry)
  bool mehrotra = false;   // predictor-corrector instead of fixed centering
  long dense_threshold = 64;  // normal equations go dense below this row count
  std::ostream* log = nullptr;  // CSV iteration log when set

  void validate() const {
    if (!(sigma > 0 && sigma < 1)) throw std::invalid_argument("IpmOptions: sigma must be in (0,1)");
    if (!(ftb > 0 && ftb < 1)) throw std::invalid_argument("IpmOptions: ftb must be in (0,1)");
    if (!(tol_p > 0 && tol_d > 0 && tol_gap > 0))
      throw std::invalid_argument("IpmOptions: tolerances must be positive");
    if (max_iter < 1) throw std::invalid_argument("IpmOptions: max_iter must be >= 1");
  }
};

struct IpmState {
  Eigen::VectorXd F;       // primal iterate, strictly positive
  Eigen::VectorXd Theta;   // equality multipliers
  Eigen::VectorXd s_dual;  // dual slacks, strictly positive
  int iter = 0;

  double mu() const { return F.dot(s_dual) / static_cast<double>(F.size()); }
};

struct IpmResiduals {
  Eigen::VectorXd rp;  // M F - c
  Eigen::VectorXd rd;  // M^T Theta + s - Xi
  Eigen::VectorXd rc;  // F.*s - tau
};

enum class LpStatus { optimal, infeasible_suspected, iteration_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible_suspected: return "infeasible_suspected";
    default: return "iteration_limit";
  }
}

struct LpSolution {
  Eigen::VectorXd F;
  Eigen::VectorXd Theta;
  Eigen::VectorXd s_dual;
  double objective = 0.0;
  int iterations = 0;
  double rp_scaled = 0.0;
  double rd_scaled = 0.0;
  double mu = 0.0;
  LpStatus status = LpStatus::iteration_limit;
  bool positivity_ok = true;       // strict positivity held at every iterate
  std::vector<double> mu_history;  // mu after each accepted step
};

struct IpmNumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Perturbed KKT residuals at centering level tau.
inline IpmResiduals ipm_residuals(const IpmState& st, std::span<const double> xi,
                                  const SparseMatrix& m, std::span<const double> c, double tau) {
  IpmResiduals r;
  r.rp.resize(m.rows());
  r.rd.resize(m.cols());
  m.matvec({st.F.data(), static_cast<size_t>(st.F.size())},
           {r.rp.data(), static_cast<size_t>(r.rp.size())});
  for (long i = 0; i < m.rows(); ++i) r.rp[i] -= c[i];
  m.matvec_transpose({st.Theta.data(), static_cast<size_t>(st.Theta.size())},
                     {r.rd.data(), static_cast<size_t>(r.rd.size())});
  for (long j = 0; j < m.cols(); ++j) r.rd[j] += st.s_dual[j] - xi[j];
  r.rc = st.F.cwiseProduct(st.s_dual).array() - tau;
  return r;
}

/// Largest step in [0,1] keeping x + alpha*dx nonnegative, damped by the
/// fraction-to-boundary factor.
inline double step_length(const Eigen::VectorXd& x, const Eigen::VectorXd& dx, double ftb) {
  double alpha_max = std::numeric_limits<double>::infinity();
  for (long i = 0; i < x.size(); ++i)
    if (dx[i] < 0.0) alpha_max = std::min(alpha_max, -x[i] / dx[i]);
  if (!std::isfinite(alpha_max)) return 1.0;
  return std::min(1.0, ftb * alpha_max);
}

struct NewtonDirection {
  Eigen::VectorXd dF, dTheta, ds;
};

/// Primal-dual path-following solver for min Xi^T F s.t. M F = c, F >= 0.
/// The Newton system is reduced to the normal equations (M D M^T) dTheta = rhat
/// with D = diag(F ./ s); the factorization goes dense for small row counts
/// and through a sparse LDL^T otherwise.
class IpmSolver {
 public:
  IpmSolver(std::vector<double> xi, SparseMatrix m, IpmOptions opts = {})
      : xi_(std::move(xi)), m_(std::move(m)), opts_(opts) {
    opts_.validate();
    if (static_cast<long>(xi_.size()) != m_.cols())
      throw std::invalid_argument("IpmSolver: objective size does not match columns");
    dense_ = m_.rows() <= opts_.dense_threshold;
    if (dense_) {
      build_columns();
    } else {
      m_eigen_ = m_.to_eigen();
      m_eigen_t_ = m_eigen_.transpose();
    }
    xi_inf_ = 0.0;
    for (double v : xi_) xi_inf_ = std::max(xi_inf_, std::abs(v));
  }

  const SparseMatrix& matrix() const { return m_; }
  std::span<const double> objective() const { return xi_; }

  LpSolution solve(std::span<const double> c) {
    if (static_cast<long>(c.size()) != m_.rows())
      throw std::invalid_argument("IpmSolver::solve: rhs size does not match rows");
    const long s_count = m_.cols();
    double c_inf = 0.0;
    for (double v : c) c_inf = std::max(c_inf, std::abs(v));

    IpmState st;
    st.F = Eigen::VectorXd::Constant(s_count, std::max(1.0, c_inf));
    st.s_dual = Eigen::VectorXd::Constant(s_count, std::max(1.0, xi_inf_));
    st.Theta = Eigen::VectorXd::Zero(m_.rows());

    LpSolution sol;
    if (opts_.log) *opts_.log << "iter,mu,rp,rd,alpha_p,alpha_d\n";

    double mu = st.mu();
    int tiny_step_streak = 0;
    int no_progress_streak = 0;
    double best_merit = std::numeric_limits<double>::infinity();
    analyzed_ = false;
    for (st.iter = 0; st.iter < opts_.max_iter; ++st.iter) {
      IpmResiduals res = ipm_residuals(st, xi_, m_, c, 0.0);
      const double rp_inf = res.rp.lpNorm<Eigen::Infinity>() / (1.0 + c_inf);
      const double rd_inf = res.rd.lpNorm<Eigen::Infinity>() / (1.0 + xi_inf_);
      mu = st.mu();
      if (rp_inf <= opts_.tol_p && rd_inf <= opts_.tol_d && mu <= opts_.tol_gap) {
        finish(sol, st, c, rp_inf, rd_inf, mu, LpStatus::optimal);
        return sol;
      }
      const double merit = std::max({rp_inf / opts_.tol_p, rd_inf / opts_.tol_d, mu / opts_.tol_gap});
      if (merit < 0.95 * best_merit) {
        best_merit = merit;
        no_progress_streak = 0;
      } else if (++no_progress_streak >= 30) {
        break;  // stalled short of the tolerances
      }

      // keep the centering target away from zero while feasibility catches
      // up: a collapsed mu makes the scaling matrix numerically singular
      const double mu_floor = 0.01 * opts_.tol_gap;
      // near convergence the neighborhood is wide: step almost to the wall
      const double ftb = std::min(std::max(opts_.ftb, 1.0 - 100.0 * mu), 1.0 - 1e-12);
      NewtonDirection dir;
      double alpha_p = 0.0, alpha_d = 0.0;
      if (!opts_.mehrotra) {
        res.rc.array() -= opts_.sigma * std::max(mu, mu_floor);
        dir = newton_step(st, res);
        alpha_p = step_length(st.F, dir.dF, ftb);
        alpha_d = step_length(st.s_dual, dir.ds, ftb);
      } else {
        NewtonDirection aff = newton_step(st, res);  // affine predictor (tau = 0)
        const double ap = step_length(st.F, aff.dF, 1.0);
        const double ad = step_length(st.s_dual, aff.ds, 1.0);
        const double mu_aff = (st.F + ap * aff.dF).dot(st.s_dual + ad * aff.ds) / s_count;
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);
        sigma = std::clamp(sigma, 1e-8, 0.999);
        IpmResiduals cor = res;
        cor.rc.array() += (aff.dF.cwiseProduct(aff.ds)).array() -
                          std::max(sigma * mu, opts_.sigma * mu_floor);
        dir = newton_step(st, cor);
        alpha_p = step_length(st.F, dir.dF, ftb);
        alpha_d = step_length(st.s_dual, dir.ds, ftb);
      }

      st.F += alpha_p * dir.dF;
      st.Theta += alpha_d * dir.dTheta;
      st.s_dual += alpha_d * dir.ds;
      for (long i = 0; i < s_count; ++i)
        if (!(st.F[i] > 0.0) || !(st.s_dual[i] > 0.0)) {
          sol.positivity_ok = false;
          throw IpmNumericalError("ipm: positivity lost at iteration " + std::to_string(st.iter));
        }
      mu = st.mu();
      sol.mu_history.push_back(mu);
      if (opts_.log) {
        char line[160];
        std::snprintf(line, sizeof(line), "%d,%.9e,%.9e,%.9e,%.6f,%.6f\n", st.iter, mu, rp_inf,
                      rd_inf, alpha_p, alpha_d);
        *opts_.log << line;
      }
      tiny_step_streak = (alpha_p < 1e-10 && alpha_d < 1e-10) ? tiny_step_streak + 1 : 0;
      if (tiny_step_streak >= 3) break;  // stalled
    }

    IpmResiduals res = ipm_residuals(st, xi_, m_, c, 0.0);
    const double rp_inf = res.rp.lpNorm<Eigen::Infinity>() / (1.0 + c_inf);
    const double rd_inf = res.rd.lpNorm<Eigen::Infinity>() / (1.0 + xi_inf_);
    mu = st.mu();
    LpStatus status = LpStatus::iteration_limit;
    if (rp_inf <= opts_.tol_p && rd_inf <= opts_.tol_d && mu <= opts_.tol_gap)
      status = LpStatus::optimal;
    else if (rp_inf > 100.0 * opts_.tol_p && mu <= std::max(opts_.tol_gap, 1e-10))
      status = LpStatus::infeasible_suspected;  // gap collapsed, primal still off
    finish(sol, st, c, rp_inf, rd_inf, mu, status);
    return sol;
  }

  /// Solves the 3x3 block Newton system for the given residuals via the
  /// Schur-complement normal equations, with block-level iterative
  /// refinement; exposed for direct testing.
  NewtonDirection newton_step(const IpmState& st, const IpmResiduals& res) {
    const long s_count = m_.cols();
    Eigen::VectorXd d(s_count);
    for (long i = 0; i < s_count; ++i) d[i] = st.F[i] / st.s_dual[i];

    const double rhs_scale =
        1.0 + std::max({res.rp.lpNorm<Eigen::Infinity>(), res.rd.lpNorm<Eigen::Infinity>(),
                        res.rc.lpNorm<Eigen::Infinity>()});
    // the solve must be an order tighter than the requested tolerances,
    // otherwise full steps re-introduce residuals at the stopping level
    const double accuracy =
        std::max(1e-13, std::min({1e-8, 0.1 * opts_.tol_p, 0.1 * opts_.tol_d}));
    const double target = accuracy * rhs_scale;

    double reg = opts_.reg;
    while (true) {
      if (factor_normal(d, reg)) {
        NewtonDirection dir = schur_solve(st, d, res.rd, res.rp, res.rc);
        // refinement on the full block system: the back-substitution loses
        // accuracy when D is ill-scaled, but corrections have small rhs
        double worst = std::numeric_limits<double>::infinity();
        for (int pass = 0; pass < 3 && worst > target; ++pass) {
          Eigen::VectorXd ed(s_count), ep(m_.rows()), ec(s_count);
          block_residual(st, res, dir, ed, ep, ec);
          worst = std::max({ed.lpNorm<Eigen::Infinity>(), ep.lpNorm<Eigen::Infinity>(),
                            ec.lpNorm<Eigen::Infinity>()});
          if (worst <= target) return dir;
          const NewtonDirection fix = schur_solve(st, d, -ed, -ep, -ec);
          dir.dF += fix.dF;
          dir.dTheta += fix.dTheta;
          dir.ds += fix.ds;
        }
        if (worst <= target) return dir;
        // near-degenerate vertices make the normal matrix rank-deficient to
        // double precision; redo the small dense systems in quad
        if (dense_ && quad_newton(st, d, res, reg, target, dir)) return dir;
        if (reg >= opts_.reg_max) return dir;
      } else if (reg >= opts_.reg_max) {
        std::ostringstream msg;
        msg << "ipm: normal-equation factorization failed at iteration " << st.iter
            << " (mu=" << st.mu() << ", reg=" << reg << ")";
        throw IpmNumericalError(msg.str());
      }
      reg *= 10.0;
    }
  }

 private:
  void finish(LpSolution& sol, IpmState& st, std::span<const double> c, double rp, double rd,
              double mu, LpStatus status) {
    sol.F = std::move(st.F);
    sol.Theta = std::move(st.Theta);
    sol.s_dual = std::move(st.s_dual);
    sol.iterations = st.iter;
    sol.rp_scaled = rp;
    sol.rd_scaled = rd;
    sol.mu = mu;
    sol.status = status;
    sol.objective = 0.0;
    for (long j = 0; j < m_.cols(); ++j) sol.objective += xi_[j] * sol.F[j];
    (void)c;
  }

  void build_columns() {
    col_ptr_.assign(m_.cols() + 1, 0);
    for (long r = 0; r < m_.rows(); ++r)
      for (long c : m_.row_cols(r)) col_ptr_[c + 1]++;
    for (long j = 0; j < m_.cols(); ++j) col_ptr_[j + 1] += col_ptr_[j];
    col_rows_.resize(m_.nnz());
    col_vals_.resize(m_.nnz());
    std::vector<long> fill(col_ptr_.begin(), col_ptr_.end() - 1);
    for (long r = 0; r < m_.rows(); ++r) {
      const auto cols = m_.row_cols(r);
      const auto vals = m_.row_vals(r);
      for (size_t i = 0; i < cols.size(); ++i) {
        const long pos = fill[cols[i]]++;
        col_rows_[pos] = r;
        col_vals_[pos] = vals[i];
      }
    }
  }

  bool factor_normal(const Eigen::VectorXd& d, double reg) {
    if (dense_) {
      const long r = m_.rows();
      normal_dense_.setZero(r, r);
      for (long j = 0; j < m_.cols(); ++j) {
        const double dj = d[j];
        for (long p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
          for (long q = col_ptr_[j]; q < col_ptr_[j + 1]; ++q)
            normal_dense_(col_rows_[p], col_rows_[q]) += dj * col_vals_[p] * col_vals_[q];
      }
      normal_dense_.diagonal().array() += reg;
      dense_ldlt_.compute(normal_dense_);
      return dense_ldlt_.info() == Eigen::Success;
    }
    Eigen::SparseMatrix<double> scaled = m_eigen_ * d.asDiagonal();
    normal_sparse_ = scaled * m_eigen_t_;
    if (!analyzed_) {
      sparse_ldlt_.analyzePattern(normal_sparse_);
      analyzed_ = true;
    }
    sparse_ldlt_.setShift(reg);
    sparse_ldlt_.factorize(normal_sparse_);
    return sparse_ldlt_.info() == Eigen::Success;
  }

  Eigen::VectorXd solve_normal(const Eigen::VectorXd& rhs) const {
    return dense_ ? dense_ldlt_.solve(rhs).eval() : sparse_ldlt_.solve(rhs).eval();
  }

  void block_residual(const IpmState& st, const IpmResiduals& res, const NewtonDirection& dir,
                      Eigen::VectorXd& ed, Eigen::VectorXd& ep, Eigen::VectorXd& ec) const {
    m_.matvec_transpose({dir.dTheta.data(), static_cast<size_t>(dir.dTheta.size())},
                        {ed.data(), static_cast<size_t>(ed.size())});
    ed = -res.rd - ed - dir.ds;
    m_.matvec({dir.dF.data(), static_cast<size_t>(dir.dF.size())},
              {ep.data(), static_cast<size_t>(ep.size())});
    ep = -res.rp - ep;
    ec = -res.rc - st.s_dual.cwiseProduct(dir.dF) - st.F.cwiseProduct(dir.ds);
  }

  /// Quad-precision Newton solve for the dense path. Forming M D M^T in
  /// doubles destroys the weakly-scaled directions near a degenerate vertex;
  /// quad formation, factorization and back-substitution recover them.
  bool quad_newton(const IpmState& st, const Eigen::VectorXd& d, const IpmResiduals& res,
                   double reg, double target, NewtonDirection& dir) const {
    using quad = __float128;
    const long r = m_.rows();
    const long s = m_.cols();
    std::vector<quad> normal(r * r, quad(0));
    for (long j = 0; j < s; ++j) {
      const quad dj = quad(d[j]);
      for (long p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        for (long q = col_ptr_[j]; q < col_ptr_[j + 1]; ++q)
          normal[col_rows_[p] * r + col_rows_[q]] += dj * quad(col_vals_[p]) * quad(col_vals_[q]);
    }
    for (long i = 0; i < r; ++i) normal[i * r + i] += quad(reg);
    // in-place Cholesky
    for (long i = 0; i < r; ++i) {
      for (long k = 0; k < i; ++k) {
        quad acc = normal[i * r + k];
        for (long t = 0; t < k; ++t) acc -= normal[i * r + t] * normal[k * r + t];
        normal[i * r + k] = acc / normal[k * r + k];
      }
      quad acc = normal[i * r + i];
      for (long t = 0; t < i; ++t) acc -= normal[i * r + t] * normal[i * r + t];
      if (!(acc > quad(0))) return false;
      normal[i * r + i] = sqrtq_approx(acc);
    }
    auto chol_solve = [&](std::vector<quad>& b) {
      for (long i = 0; i < r; ++i) {
        for (long t = 0; t < i; ++t) b[i] -= normal[i * r + t] * b[t];
        b[i] /= normal[i * r + i];
      }
      for (long i = r - 1; i >= 0; --i) {
        for (long t = i + 1; t < r; ++t) b[i] -= normal[t * r + i] * b[t];
        b[i] /= normal[i * r + i];
      }
    };
    // the full Schur reduction and back-substitution in quad
    std::vector<quad> qF(s), qS(s), qrd(s), qrc(s), qrp(r);
    for (long i = 0; i < s; ++i) {
      qF[i] = quad(st.F[i]);
      qS[i] = quad(st.s_dual[i]);
      qrd[i] = quad(res.rd[i]);
      qrc[i] = quad(res.rc[i]);
    }
    for (long i = 0; i < r; ++i) qrp[i] = quad(res.rp[i]);
    std::vector<quad> rhat(r, quad(0));
    for (long j = 0; j < s; ++j) {
      const quad w = (qF[j] / qS[j]) * (qrd[j] - qrc[j] / qF[j]);
      for (long p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        rhat[col_rows_[p]] -= quad(col_vals_[p]) * w;
    }
    for (long i = 0; i < r; ++i) rhat[i] -= qrp[i];
    chol_solve(rhat);
    std::vector<quad> qdF(s), qds(s);
    for (long j = 0; j < s; ++j) {
      quad mt = quad(0);
      for (long p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        mt += quad(col_vals_[p]) * rhat[col_rows_[p]];
      qdF[j] = (qF[j] / qS[j]) * (mt + qrd[j] - qrc[j] / qF[j]);
      qds[j] = -(qrc[j] + qS[j] * qdF[j]) / qF[j];
    }
    NewtonDirection out;
    out.dTheta.resize(r);
    out.dF.resize(s);
    out.ds.resize(s);
    for (long i = 0; i < r; ++i) out.dTheta[i] = static_cast<double>(rhat[i]);
    for (long j = 0; j < s; ++j) {
      out.dF[j] = static_cast<double>(qdF[j]);
      out.ds[j] = static_cast<double>(qds[j]);
    }
    Eigen::VectorXd ed(s), ep(r), ec(s);
    block_residual(st, res, out, ed, ep, ec);
    const double worst = std::max({ed.lpNorm<Eigen::Infinity>(), ep.lpNorm<Eigen::Infinity>(),
                                   ec.lpNorm<Eigen::Infinity>()});
    if (worst <= 10.0 * target) {
      dir = out;
      return true;
    }
    return false;
  }

  static __float128 sqrtq_approx(__float128 x) {
    // Newton iterations from the double seed reach quad accuracy
    __float128 y = __float128(std::sqrt(static_cast<double>(x)));
    for (int it = 0; it < 3; ++it) y = __float128(0.5) * (y + x / y);
    return y;
  }

  /// One pass of the Schur reduction through the current factorization:
  /// returns the direction solving the block system with residuals
  /// (rd, rp, rc) on the right-hand side (negated, as in the Newton system).
  NewtonDirection schur_solve(const IpmState& st, const Eigen::VectorXd& d,
                              const Eigen::VectorXd& rd, const Eigen::VectorXd& rp,
                              const Eigen::VectorXd& rc) const {
    const long s_count = m_.cols();
    Eigen::VectorXd w(s_count);
    for (long i = 0; i < s_count; ++i) w[i] = d[i] * (rd[i] - rc[i] / st.F[i]);
    Eigen::VectorXd rhat(m_.rows());
    m_.matvec({w.data(), static_cast<size_t>(w.size())},
              {rhat.data(), static_cast<size_t>(rhat.size())});
    rhat = -rp - rhat;
    NewtonDirection dir;
    dir.dTheta = solve_normal(rhat);
    Eigen::VectorXd mt_dtheta(s_count);
    m_.matvec_transpose({dir.dTheta.data(), static_cast<size_t>(dir.dTheta.size())},
                        {mt_dtheta.data(), static_cast<size_t>(mt_dtheta.size())});
    dir.dF.resize(s_count);
    dir.ds.resize(s_count);
    for (long i = 0; i < s_count; ++i) {
      dir.dF[i] = d[i] * (mt_dtheta[i] + rd[i] - rc[i] / st.F[i]);
      dir.ds[i] = -(rc[i] + st.s_dual[i] * dir.dF[i]) / st.F[i];
    }
    return dir;
  }

  std::vector<double> xi_;
  SparseMatrix m_;
  IpmOptions opts_;
  double xi_inf_ = 0.0;
  bool dense_ = true;

  // dense normal path
  std::vector<long> col_ptr_, col_rows_;
  std::vector<double> col_vals_;
  Eigen::MatrixXd normal_dense_;
  Eigen::LDLT<Eigen::MatrixXd> dense_ldlt_;

  // sparse normal path
  Eigen::SparseMatrix<double> m_eigen_, m_eigen_t_, normal_sparse_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> sparse_ldlt_;
  bool analyzed_ = false;
};

/// One-shot solve of min Xi^T F s.t. M F = c, F >= 0.
inline LpSolution solve_lp(std::span<const double> xi, const SparseMatrix& m,
                           std::span<const double> c, const IpmOptions& opts = {}) {
  IpmSolver solver(std::vector<double>(xi.begin(), xi.end()), m, opts);
  return solver.solve(c);
}

}  // namespace ymlp
