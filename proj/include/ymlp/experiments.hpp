#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymlp/collocation.hpp"
#include "ymlp/io.hpp"
#include "ymlp/moments.hpp"
#include "ymlp/reference.hpp"
#include "ymlp/step_solver.hpp"

namespace ymlp {

struct ExperimentConfig {
  std::string name = "custom";
  std::string model_name = "burgers";
  double gamma = 1.4;
  double alpha = 1.1;

  GridSpec grid;
  DiracMode init_mode = DiracMode::mean_preserving;
  std::function<void(std::span<const double>, double*)> u0;

  std::optional<CollocationSpec> colloc;
  // additive random perturbation of the initial data:
  // u0(x, omega) = u0(x) + sum_ax random_shift[ax][comp] * omega[ax]
  std::vector<std::vector<double>> random_shift;
  CollocationNormalization normalization = CollocationNormalization::per_node;

  IpmOptions ipm;
  SolveMode mode = SolveMode::cell;
  int quad_points = 3;
  std::string output_dir;
  bool full_fields = false;  // additionally write (t, x, value) field histories

  // doubling ladder base for convergence studies, when the experiment has one
  std::optional<std::array<int, 3>> convergence_base;
  std::optional<BurgersWave> exact_wave;

  PdeModel make_model() const { return ymlp::make_model(model_name, gamma, alpha); }
};

struct RunResult {
  GridSpec grid;
  long q_count = 1;
  MomentReport report;
  std::vector<double> f_final;            // level nt, size K*Q*L
  std::vector<double> mass_residual;      // per level: max_k |sum_{q,l} F - 1|
  std::vector<double> total_reaction;     // Allen-Cahn: sum_k <G'>_F per level
  std::vector<StepDiagnostics> steps;
  std::vector<std::string> files_written;
};

/// Serializes one scalar moment field over all stored levels as
/// (t, x..., value) rows.
inline void write_field_history_csv(const std::string& path, const GridSpec& grid,
                                    std::span<const double> field, int levels) {
  CsvWriter w(path);
  std::vector<std::string> names = {"t"};
  for (int ax = 0; ax < grid.d(); ++ax) names.push_back("x" + std::to_string(ax));
  names.push_back("value");
  w.header(names);
  const long K = grid.space_cells();
  std::vector<double> x(grid.d());
  for (int j = 0; j < levels; ++j)
    for (long k = 0; k < K; ++k) {
      grid.space_cell_center(k, x);
      w.begin_row();
      w.field(grid.time_of_level(j));
      for (double v : x) w.field(v);
      w.field(field[static_cast<long>(j) * K + k]);
      w.end_row();
    }
}

namespace detail {

inline void write_outputs(const ExperimentConfig& cfg, const PdeModel& model, RunResult& res) {
  if (cfg.output_dir.empty()) return;
  const GridSpec& grid = res.grid;
  const long K = grid.space_cells();
  const long Q = res.q_count;
  const long L = grid.phase_cells();
  const int n = grid.n();
  const bool ac = !res.report.e.empty();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  auto path = [&](const char* f) { return (fs::path(cfg.output_dir) / f).string(); };

  {
    CsvWriter w(path("u_final.csv"));
    std::vector<std::string> names;
    for (int ax = 0; ax < grid.d(); ++ax) names.push_back("x" + std::to_string(ax));
    for (int comp = 0; comp < n; ++comp) names.push_back("u" + std::to_string(comp));
    w.header(names);
    std::vector<double> x(grid.d());
    const auto u = res.report.u_level(res.report.levels - 1);
    for (long k = 0; k < K; ++k) {
      grid.space_cell_center(k, x);
      w.begin_row();
      for (double v : x) w.field(v);
      for (int comp = 0; comp < n; ++comp) w.field(u[k * n + comp]);
      w.end_row();
    }
    res.files_written.push_back(path("u_final.csv"));
  }

  {
    CsvWriter w(path("F_final.csv"));
    std::vector<std::string> names;
    for (int ax = 0; ax < grid.d(); ++ax) names.push_back("x" + std::to_string(ax));
    if (Q > 1) names.push_back("q");
    for (int comp = 0; comp < n; ++comp) names.push_back("xi" + std::to_string(comp));
    names.push_back("mass");
    w.header(names);
    std::vector<double> x(grid.d()), xi(n);
    for (long k = 0; k < K; ++k) {
      grid.space_cell_center(k, x);
      for (long q = 0; q < Q; ++q)
        for (long l = 0; l < L; ++l) {
          const double mass = res.f_final[(k * Q + q) * L + l];
          if (mass <= 1e-12) continue;  // omit numerically empty cells
          grid.phase_cell_center(l, xi);
          w.begin_row();
          for (double v : x) w.field(v);
          if (Q > 1) w.field(q);
          for (double v : xi) w.field(v);
          w.field(mass);
          w.end_row();
        }
    }
    res.files_written.push_back(path("F_final.csv"));
  }

  {
    CsvWriter w(path("energy_final.csv"));
    std::vector<std::string> names;
    for (int ax = 0; ax < grid.d(); ++ax) names.push_back("x" + std::to_string(ax));
    names.push_back("e_hat");
    names.push_back("defect");
    if (ac) {
      names.push_back("e");
      names.push_back("e_re");
      names.push_back("e_hat_re");
      names.push_back("defect_re");
    }
    w.header(names);
    std::vector<double> x(grid.d());
    const int j = res.report.levels - 1;
    for (long k = 0; k < K; ++k) {
      grid.space_cell_center(k, x);
      w.begin_row();
      for (double v : x) w.field(v);
      w.field(res.report.e_hat[static_cast<long>(j) * K + k]);
      w.field(res.report.defect[static_cast<long>(j) * K + k]);
      if (ac) {
        w.field(res.report.e[static_cast<long>(j) * K + k]);
        w.field(res.report.e_re[static_cast<long>(j) * K + k]);
        w.field(res.report.e_hat_re[static_cast<long>(j) * K + k]);
        w.field(res.report.defect_re[static_cast<long>(j) * K + k]);
      }
      w.end_row();
    }
    res.files_written.push_back(path("energy_final.csv"));
  }

  {
    CsvWriter w(path("totals.csv"));
    std::vector<std::string> names = {"t"};
    for (int comp = 0; comp < n; ++comp) names.push_back("total_u" + std::to_string(comp));
    names.push_back("total_e_hat");
    names.push_back("total_defect");
    names.push_back("max_mass_residual");
    if (ac) {
      names.push_back("total_e");
      names.push_back("total_e_re");
      names.push_back("total_e_hat_re");
      names.push_back("total_defect_re");
    }
    w.header(names);
    for (int j = 0; j < res.report.levels; ++j) {
      w.begin_row();
      w.field(grid.time_of_level(j));
      for (int comp = 0; comp < n; ++comp) w.field(res.report.total_u[j * n + comp]);
      w.field(res.report.total_e_hat[j]);
      w.field(res.report.total_defect[j]);
      w.field(res.mass_residual[j]);
      if (ac) {
        w.field(res.report.total_e[j]);
        w.field(res.report.total_e_re[j]);
        w.field(res.report.total_e_hat_re[j]);
        w.field(res.report.total_defect_re[j]);
      }
      w.end_row();
    }
    res.files_written.push_back(path("totals.csv"));
  }

  if (cfg.full_fields) {
    // one file per scalar field with (t, x, value) rows over all levels
    for (int comp = 0; comp < n; ++comp) {
      std::vector<double> u_comp(static_cast<long>(res.report.levels) * K);
      for (int j = 0; j < res.report.levels; ++j)
        for (long k = 0; k < K; ++k)
          u_comp[static_cast<long>(j) * K + k] =
              res.report.u[(static_cast<long>(j) * K + k) * n + comp];
      const std::string f = "u" + std::to_string(comp) + ".csv";
      write_field_history_csv(path(f.c_str()), grid, u_comp, res.report.levels);
      res.files_written.push_back(path(f.c_str()));
    }
    write_field_history_csv(path("e_hat.csv"), grid, res.report.e_hat, res.report.levels);
    write_field_history_csv(path("defect.csv"), grid, res.report.defect, res.report.levels);
    res.files_written.push_back(path("e_hat.csv"));
    res.files_written.push_back(path("defect.csv"));
    if (ac) {
      write_field_history_csv(path("defect_re.csv"), grid, res.report.defect_re,
                              res.report.levels);
      res.files_written.push_back(path("defect_re.csv"));
    }
  }

  {
    CsvWriter w(path("solver_log.csv"));
    std::vector<std::string> names = {"step", "max_iterations", "max_mu", "max_rp", "objective"};
    w.header(names);
    for (const auto& d : res.steps) {
      w.begin_row();
      w.field(d.step);
      w.field(d.max_iterations);
      w.field(d.max_mu);
      w.field(d.max_rp);
      w.field(d.objective);
      w.end_row();
    }
    res.files_written.push_back(path("solver_log.csv"));
  }
  (void)model;
}

}  // namespace detail

/// Runs one experiment: Dirac initialization, the per-step LP chain, moment
/// extraction, and (when an output directory is set) the CSV artifacts.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  const PdeModel model = cfg.make_model();
  GridSpec grid = cfg.grid;
  grid.validate();
  if (!cfg.u0) throw std::invalid_argument("run_experiment: no initial data");

  RunResult res;
  res.grid = grid;
  const long K = grid.space_cells();
  const long L = grid.phase_cells();
  const int n = grid.n();
  const int nt = grid.nt;
  const PhaseCoefficients pc = phase_coefficients(model, grid, cfg.quad_points);
  const std::vector<double> e_bar = energy_cell_averages(model, grid, cfg.quad_points);
  const bool ac = model.has_laplacian && model.reaction;

  std::vector<double> f_prev, f_next;
  long Q = 1;
  std::optional<StepChainSolver> solver;
  if (cfg.colloc) {
    Q = cfg.colloc->node_count();
    auto u0_random = [&](std::span<const double> x, std::span<const double> omega, double* out) {
      cfg.u0(x, out);
      for (size_t ax = 0; ax < cfg.random_shift.size(); ++ax)
        for (int comp = 0; comp < n; ++comp) out[comp] += cfg.random_shift[ax][comp] * omega[ax];
    };
    f_prev = collocation_dirac_init(u0_random, grid, *cfg.colloc, cfg.init_mode);
    solver.emplace(model, grid, pc, cfg.ipm, cfg.mode, cfg.colloc, cfg.normalization);
  } else {
    f_prev = dirac_init(cfg.u0, grid, cfg.init_mode);
    solver.emplace(model, grid, pc, cfg.ipm, cfg.mode);
  }
  res.q_count = Q;
  f_next.resize(f_prev.size());

  MomentReport& rep = res.report;
  rep.K = K;
  rep.n = n;
  rep.levels = nt + 1;
  rep.u.resize(static_cast<long>(nt + 1) * K * n);
  rep.e_hat.resize(static_cast<long>(nt + 1) * K);
  rep.defect.resize(static_cast<long>(nt + 1) * K);
  rep.total_u.resize(static_cast<long>(nt + 1) * n);
  rep.total_e_hat.resize(nt + 1);
  rep.total_defect.resize(nt + 1);
  if (ac) {
    rep.e.resize(static_cast<long>(nt + 1) * K);
    rep.e_re.resize(static_cast<long>(nt + 1) * K);
    rep.e_hat_re.resize(static_cast<long>(nt + 1) * K);
    rep.defect_re.resize(static_cast<long>(nt + 1) * K);
    rep.total_e.resize(nt + 1);
    rep.total_e_re.resize(nt + 1);
    rep.total_e_hat_re.resize(nt + 1);
    rep.total_defect_re.resize(nt + 1);
    res.total_reaction.resize(nt + 1);
  }
  res.mass_residual.resize(nt + 1);

  auto record_level = [&](int j, std::span<const double> f) {
    std::span<double> u(rep.u.data() + static_cast<long>(j) * K * n, K * n);
    mean_field_level(f, K, Q, L, n, pc.u_bar, u);
    std::span<double> eh(rep.e_hat.data() + static_cast<long>(j) * K, K);
    std::span<double> df(rep.defect.data() + static_cast<long>(j) * K, K);
    if (ac) {
      AllenCahnLevelEnergies en = allen_cahn_energies_level(f, u, grid, pc, e_bar, model.alpha);
      std::copy(en.e_hat.begin(), en.e_hat.end(), eh.begin());
      std::copy(en.defect.begin(), en.defect.end(), df.begin());
      std::copy(en.e.begin(), en.e.end(), rep.e.begin() + static_cast<long>(j) * K);
      std::copy(en.e_re.begin(), en.e_re.end(), rep.e_re.begin() + static_cast<long>(j) * K);
      std::copy(en.e_hat_re.begin(), en.e_hat_re.end(),
                rep.e_hat_re.begin() + static_cast<long>(j) * K);
      std::copy(en.defect_re.begin(), en.defect_re.end(),
                rep.defect_re.begin() + static_cast<long>(j) * K);
      rep.total_e[j] = spatial_total(en.e, grid);
      rep.total_e_re[j] = spatial_total(en.e_re, grid);
      rep.total_e_hat_re[j] = spatial_total(en.e_hat_re, grid);
      rep.total_defect_re[j] = spatial_total(en.defect_re, grid);
      double reac = 0.0;
      for (long k = 0; k < K; ++k)
        for (long l = 0; l < L; ++l) reac += pc.gprime_bar[l] * f[k * L + l];
      res.total_reaction[j] = reac;
    } else {
      energy_level(f, K, Q, L, e_bar, eh);
      energy_defect_level(eh, u, K, n, model, df);
    }
    rep.total_e_hat[j] = spatial_total(eh, grid);
    rep.total_defect[j] = spatial_total(df, grid);
    for (int comp = 0; comp < n; ++comp) {
      double s = 0.0;
      for (long k = 0; k < K; ++k) s += u[k * n + comp];
      double vol = 1.0;
      for (int ax = 0; ax < grid.d(); ++ax) vol *= grid.hx(ax);
      rep.total_u[static_cast<long>(j) * n + comp] = vol * s;
    }
    double worst = 0.0;
    for (long k = 0; k < K; ++k) {
      double mass = 0.0;
      for (long i = 0; i < Q * L; ++i) mass += f[k * Q * L + i];
      worst = std::max(worst, std::abs(mass - 1.0));
    }
    res.mass_residual[j] = worst;
  };

  record_level(0, f_prev);
  for (int j = 0; j < nt; ++j) {
    res.steps.push_back(solver->advance(f_prev, f_next, j));
    f_prev.swap(f_next);
    record_level(j + 1, f_prev);
  }
  res.f_final = std::move(f_prev);

  detail::write_outputs(cfg, model, res);
  return res;
}

/// Named experiments with the reference setups baked in; resolution
/// overrides rescale (nt, nx, nxi) without touching the rest.
inline ExperimentConfig make_experiment(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.init_mode = DiracMode::nearest;
  auto riemann1 = [](double left, double right) {
    return [=](std::span<const double> x, double* out) { out[0] = x[0] < 0.0 ? left : right; };
  };
  if (name == "burgers-rarefaction" || name == "burgers-shock") {
    cfg.model_name = "burgers";
    cfg.grid.T = 1.0;
    cfg.grid.nt = 150;
    cfg.grid.x_lower = {-3.0};
    cfg.grid.x_upper = {3.0};
    cfg.grid.nx = {200};
    cfg.grid.phase = {{-1.05}, {2.05}, {200}};
    cfg.grid.bc = Bc::outflow;
    cfg.u0 = name == "burgers-rarefaction" ? riemann1(-1.0, 2.0) : riemann1(2.0, -1.0);
    cfg.convergence_base = {{10, 15, 10}};
    cfg.exact_wave =
        name == "burgers-rarefaction" ? BurgersWave::rarefaction : BurgersWave::shock;
  } else if (name == "burgers-compound") {
    cfg.model_name = "burgers";
    cfg.grid.T = 0.4;
    cfg.grid.nt = 300;
    cfg.grid.x_lower = {-3.0};
    cfg.grid.x_upper = {3.0};
    cfg.grid.nx = {400};
    cfg.grid.phase = {{-1.05}, {3.05}, {401}};
    cfg.grid.bc = Bc::periodic;
    cfg.u0 = [](std::span<const double> x, double* out) {
      const double v = x[0];
      if (std::abs(v) >= 1.0) out[0] = std::sin(M_PI * v);
      else if ((v > -1.0 && v <= -0.5) || (v > 0.0 && v <= 0.5)) out[0] = 3.0;
      else if (v > -0.5 && v <= 0.0) out[0] = 1.0;
      else out[0] = 2.0;
    };
  } else if (name == "euler-degond-tang") {
    cfg.model_name = "barotropic-euler";
    const double e = 0.8;
    cfg.grid.T = 0.06;
    cfg.grid.nt = 200;
    cfg.grid.x_lower = {0.0};
    cfg.grid.x_upper = {1.0};
    cfg.grid.nx = {300};
    cfg.grid.phase = {{0.105, 0.205}, {1.805, 1.805}, {151, 151}};
    cfg.grid.bc = Bc::periodic;
    cfg.u0 = [e](std::span<const double> x, double* out) {
      const double v = x[0];
      if (v <= 0.2 || v > 0.8) {
        out[0] = 1.0;
        out[1] = 1.0 - e * e / 2.0;
      } else if (v <= 0.3) {
        out[0] = 1.0 + e * e;
        out[1] = 1.0;
      } else if (v <= 0.7) {
        out[0] = 1.0;
        out[1] = 1.0 + e * e / 2.0;
      } else {
        out[0] = 1.0 - e * e;
        out[1] = 1.0;
      }
    };
  } else if (name == "euler-acoustic") {
    cfg.model_name = "barotropic-euler";
    const double e = 0.1;
    cfg.grid.T = 0.01;
    cfg.grid.nt = 50;
    cfg.grid.x_lower = {-1.0};
    cfg.grid.x_upper = {1.0};
    cfg.grid.nx = {100};
    cfg.grid.phase = {{0.805, -3.105}, {1.205, 3.105}, {51, 201}};
    cfg.grid.bc = Bc::periodic;
    cfg.u0 = [e](std::span<const double> x, double* out) {
      const double v = x[0];
      const double rho = 0.955 + 0.5 * e * (1.0 - std::cos(2.0 * M_PI * v));
      const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      const double vel = -sign * std::sqrt(2.0) * (1.0 - std::cos(2.0 * M_PI * v));
      out[0] = rho;
      out[1] = rho * vel;
    };
  } else if (name == "euler-riemann") {
    cfg.model_name = "barotropic-euler";
    cfg.grid.T = 0.06;
    cfg.grid.nt = 180;
    cfg.grid.x_lower = {0.0};
    cfg.grid.x_upper = {1.0};
    cfg.grid.nx = {200};
    cfg.grid.phase = {{0.505, -0.505}, {3.505, 2.005}, {201, 201}};
    cfg.grid.bc = Bc::outflow;
    cfg.u0 = [](std::span<const double> x, double* out) {
      out[0] = x[0] < 0.5 ? 3.0 : 1.0;
      out[1] = 0.0;
    };
  } else if (name == "ac-interfaces") {
    cfg.model_name = "allen-cahn";
    cfg.alpha = 1.1;
    cfg.grid.T = 0.02;
    cfg.grid.nt = 100;
    cfg.grid.x_lower = {0.0};
    cfg.grid.x_upper = {1.0};
    cfg.grid.nx = {50};
    cfg.grid.phase = {{-0.75}, {-0.55}, {200}};
    cfg.grid.bc = Bc::periodic;
    cfg.u0 = [](std::span<const double> x, double* out) {
      const double v = x[0];
      out[0] = std::tanh((v - 0.25) / std::sqrt(2.0)) - std::tanh((v - 0.75) / std::sqrt(2.0)) - 1.0;
    };
  } else if (name == "ac-square") {
    cfg.model_name = "allen-cahn";
    cfg.alpha = 1.1;
    cfg.grid.T = 0.02;
    cfg.grid.nt = 150;
    cfg.grid.x_lower = {-1.0};
    cfg.grid.x_upper = {1.0};
    cfg.grid.nx = {80};
    cfg.grid.phase = {{-1.05}, {1.05}, {100}};
    cfg.grid.bc = Bc::periodic;
    cfg.u0 = [](std::span<const double> x, double* out) { out[0] = std::abs(x[0]) < 0.5 ? 1.0 : -1.0; };
  } else {
    throw std::invalid_argument("unknown experiment: " + name);
  }
  return cfg;
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "burgers-rarefaction", "burgers-shock",  "burgers-compound",
      "euler-degond-tang",   "euler-acoustic", "euler-riemann",
      "ac-interfaces",       "ac-square",
  };
  return names;
}

inline void override_resolution(ExperimentConfig& cfg, std::optional<int> nt,
                                std::optional<std::vector<int>> nx,
                                std::optional<std::vector<int>> nxi) {
  if (nt) cfg.grid.nt = *nt;
  if (nx) cfg.grid.nx = *nx;
  if (nxi) cfg.grid.phase.cells = *nxi;
}

/// Final-time errors of one run against the exact Burgers wave, sampled at
/// cell centers and averaged over the domain: L1 = (1/|O|) integral |du|,
/// L2 = ((1/|O|) integral du^2)^{1/2}. These are the norms the convergence
/// tables report.
inline ErrorNorms burgers_errors(const RunResult& res, BurgersWave wave) {
  const GridSpec& grid = res.grid;
  const long K = grid.space_cells();
  std::vector<double> u_exact(K);
  for (long k = 0; k < K; ++k) u_exact[k] = burgers_exact(wave, grid.x_center(0, k), grid.T);
  ErrorNorms e = error_norms(res.report.u_level(res.report.levels - 1), u_exact, grid.hx(0));
  const double volume = grid.x_upper[0] - grid.x_lower[0];
  e.l1 /= volume;
  e.l2 /= std::sqrt(volume);
  return e;
}

/// Doubling-refinement convergence study against the exact solution.
/// `jobs > 1` runs the (independent) levels concurrently.
inline std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& base, int levels,
                                                   const std::string& csv_path = "",
                                                   int jobs = 1) {
  if (levels < 2) throw std::invalid_argument("run_convergence: need at least 2 levels");
  if (!base.convergence_base || !base.exact_wave)
    throw std::invalid_argument("run_convergence: experiment has no exact reference");
  auto run_level = [&](int lev) {
    ExperimentConfig cfg = base;
    cfg.output_dir.clear();
    const int f = 1 << lev;
    cfg.grid.nt = (*base.convergence_base)[0] * f;
    cfg.grid.nx = {(*base.convergence_base)[1] * f};
    cfg.grid.phase.cells = {(*base.convergence_base)[2] * f};
    RunResult res = run_experiment(cfg);
    const ErrorNorms err = burgers_errors(res, *base.exact_wave);
    ConvergenceRow row;
    row.nt = cfg.grid.nt;
    row.nx = cfg.grid.nx[0];
    row.nxi = cfg.grid.phase.cells[0];
    row.l1 = err.l1;
    row.l2 = err.l2;
    return row;
  };
  std::vector<ConvergenceRow> rows(levels);
  if (jobs <= 1) {
    for (int lev = 0; lev < levels; ++lev) rows[lev] = run_level(lev);
  } else {
    std::vector<std::future<ConvergenceRow>> futures;
    for (int lev = 0; lev < levels; ++lev)
      futures.push_back(std::async(std::launch::async, run_level, lev));
    for (int lev = 0; lev < levels; ++lev) rows[lev] = futures[lev].get();
  }
  rows = convergence_table(rows);
  if (!csv_path.empty()) {
    CsvWriter w(csv_path);
    const std::vector<std::string> names = {"nt", "nx", "nxi", "l1", "l1_rate", "l2", "l2_rate"};
    w.header(names);
    for (const auto& r : rows) {
      w.begin_row();
      w.field(r.nt);
      w.field(r.nx);
      w.field(r.nxi);
      w.field(r.l1);
      w.field(r.l1_rate);
      w.field(r.l2);
      w.field(r.l2_rate);
      w.end_row();
    }
  }
  return rows;
}

}  // namespace ymlp
