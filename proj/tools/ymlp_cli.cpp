#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ymlp/complexity.hpp"
#include "ymlp/config.hpp"
#include "ymlp/experiments.hpp"
#include "ymlp/ipm.hpp"

namespace {

std::string output_root() {
  const char* env = std::getenv("YMLP_OUTPUT_ROOT");
  return env ? env : "out";
}

ymlp::ExperimentConfig load_config(const std::string& spec) {
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json")
    return ymlp::config_from_file(spec);
  return ymlp::make_experiment(spec);
}

void apply_overrides(ymlp::ExperimentConfig& cfg, std::optional<int> nt,
                     const std::vector<int>& nx, const std::vector<int>& nxi,
                     const std::string& mode, const std::string& init_mode) {
  if (nt) cfg.grid.nt = *nt;
  if (!nx.empty()) cfg.grid.nx = nx;
  if (!nxi.empty()) cfg.grid.phase.cells = nxi;
  if (mode == "cell") cfg.mode = ymlp::SolveMode::cell;
  else if (mode == "step") cfg.mode = ymlp::SolveMode::step;
  else if (!mode.empty()) throw CLI::ValidationError("--mode must be cell or step");
  if (init_mode == "nearest") cfg.init_mode = ymlp::DiracMode::nearest;
  else if (init_mode == "mean-preserving") cfg.init_mode = ymlp::DiracMode::mean_preserving;
  else if (!init_mode.empty())
    throw CLI::ValidationError("--init-mode must be nearest or mean-preserving");
}

int run_cmd(const std::string& spec, std::optional<int> nt, const std::vector<int>& nx,
            const std::vector<int>& nxi, const std::string& mode, const std::string& init_mode,
            std::string out_dir, bool full_fields, const std::string& ipm_log) {
  ymlp::ExperimentConfig cfg = load_config(spec);
  apply_overrides(cfg, nt, nx, nxi, mode, init_mode);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (cfg.output_dir.empty())
    cfg.output_dir = (std::filesystem::path(output_root()) / cfg.name).string();
  cfg.full_fields = full_fields;
  std::ofstream log_stream;
  if (!ipm_log.empty()) {
    log_stream.open(ipm_log);
    if (!log_stream) throw std::runtime_error("cannot open " + ipm_log);
    cfg.ipm.log = &log_stream;
  }
  ymlp::RunResult res = ymlp::run_experiment(cfg);
  const int last = res.report.levels - 1;
  std::cout << "experiment " << cfg.name << ": " << res.grid.nt << " steps, "
            << res.grid.space_cells() << " spatial cells, " << res.grid.phase_cells()
            << " phase cells\n";
  std::cout << "  total energy at T:  " << res.report.total_e_hat[last] << "\n";
  std::cout << "  total defect at T:  " << res.report.total_defect[last] << "\n";
  std::cout << "  max mass residual:  "
            << *std::max_element(res.mass_residual.begin(), res.mass_residual.end()) << "\n";
  for (const auto& f : res.files_written) std::cout << "  wrote " << f << "\n";
  return 0;
}

int convergence_cmd(const std::string& name, int levels, std::string out_file, int jobs) {
  ymlp::ExperimentConfig cfg = ymlp::make_experiment(name);
  if (out_file.empty())
    out_file = (std::filesystem::path(output_root()) / (name + "-convergence.csv")).string();
  const auto rows = ymlp::run_convergence(cfg, levels, out_file, jobs);
  std::printf("%-18s %-12s %-8s %-12s %-8s\n", "(nt,nx,nxi)", "L1", "rate", "L2", "rate");
  for (const auto& r : rows) {
    char res[32];
    std::snprintf(res, sizeof(res), "(%d,%d,%d)", r.nt, r.nx, r.nxi);
    std::printf("%-18s %-12.4e %-8.4f %-12.4e %-8.4f\n", res, r.l1, r.l1_rate, r.l2, r.l2_rate);
  }
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

int export_lp_cmd(const std::string& spec, const std::string& out_file, bool global) {
  ymlp::ExperimentConfig cfg = load_config(spec);
  const ymlp::PdeModel model = cfg.make_model();
  cfg.grid.validate();
  const ymlp::PhaseCoefficients pc = ymlp::phase_coefficients(model, cfg.grid, cfg.quad_points);
  const std::vector<double> f0 = ymlp::dirac_init(cfg.u0, cfg.grid, cfg.init_mode);
  if (global) {
    const ymlp::LpGlobalProblem g = ymlp::assemble_global(model, cfg.grid, pc, f0);
    ymlp::write_lp_triplet_file(out_file, g.xi, g.M, g.rhs);
  } else {
    const ymlp::LpStepProblem p =
        model.has_laplacian ? ymlp::assemble_allen_cahn_step(model, cfg.grid, pc)
                            : ymlp::assemble_step(model, cfg.grid, pc);
    const std::vector<double> c = p.rhs_for(f0);
    ymlp::write_lp_triplet_file(out_file, p.xi, p.stacked(), c);
  }
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

int complexity_cmd(std::vector<std::string> methods, const std::string& pde, int d, int m,
                   bool random, bool particle, std::optional<double> Nt, std::optional<double> Nx,
                   std::optional<double> Nxi, std::optional<double> Nomega,
                   std::optional<double> eps, std::optional<double> delta,
                   std::optional<double> kappa, const std::string& compare, bool csv) {
  using namespace ymlp;
  CostParams p;
  p.d = d;
  p.m = m;
  p.random = random;
  p.representation = particle ? Representation::particle : Representation::grid;
  if (pde == "burgers" || pde == "allen-cahn") p.n = 1;
  else if (pde == "barotropic-euler") p.n = d + 1;
  else if (pde == "full-euler" || pde == "navier-stokes") p.n = d + 2;
  else if (!pde.empty()) throw CLI::ValidationError("unknown --pde " + pde);
  p.N_t = Nt;
  p.N_x = Nx;
  p.N_xi = Nxi;
  p.N_omega = Nomega;
  p.epsilon = eps;
  p.delta = delta;
  p.kappa_newt = kappa;

  if (methods.empty()) {
    methods = {"IPM", "SIPM", "QIPM", "QZSG", "QCP-query", "QCP-gate"};
    if (random) methods.push_back("direct-collocation");
    else methods.push_back("direct-classical");
  }

  const bool numeric = Nt && Nx && Nxi;
  if (csv) std::printf("method,cost,%s\n", numeric ? "value" : "notes");
  else std::printf("%-20s %-42s %s\n", "method", "cost", numeric ? "value" : "notes");
  for (const auto& name : methods) {
    const CostMethod method = cost_method_from_string(name);
    const CostExpr e = cost(method, p);
    std::string extra;
    if (numeric) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", evaluate_cost(e, p));
      extra = buf;
    } else {
      for (const auto& note : e.notes) extra += (extra.empty() ? "" : "; ") + note;
    }
    if (csv) std::printf("%s,\"%s\",\"%s\"\n", to_string(method), e.str().c_str(), extra.c_str());
    else std::printf("%-20s %-42s %s\n", to_string(method), e.str().c_str(), extra.c_str());
  }

  if (!compare.empty()) {
    const auto comma = compare.find(',');
    if (comma == std::string::npos)
      throw CLI::ValidationError("--compare expects method_a,method_b");
    const CostMethod a = cost_method_from_string(compare.substr(0, comma));
    const CostMethod b = cost_method_from_string(compare.substr(comma + 1));
    const AdvantageReport rep = advantage(a, b, p);
    std::printf("\nunder N = N_t = N_x = N_xi = N_omega = 1/eps:\n");
    std::printf("  %s: N^{%s}\n", to_string(a), rep.exponent_a.str().c_str());
    std::printf("  %s: N^{%s}\n", to_string(b), rep.exponent_b.str().c_str());
    std::printf("  advantage exponent (b - a): %s\n", rep.difference.str().c_str());
    if (!rep.crossover.empty())
      std::printf("  %s is cheaper iff %s\n", to_string(a), rep.crossover.c_str());
  }
  return 0;
}

int lp_selftest_cmd(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> rdist(2, 8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.2, 1.2);
  int ok = 0;
  double worst_rp = 0.0, worst_gap = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    const int r = rdist(rng);
    std::uniform_int_distribution<int> sdist(r + 2, 24);
    const int s = sdist(rng);
    std::vector<ymlp::Triplet> ts;
    std::vector<double> x_star(s), y(r), xi(s), c(r, 0.0);
    std::vector<std::vector<double>> m(r, std::vector<double>(s));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < s; ++j) {
        m[i][j] = gauss(rng);
        ts.push_back({i, j, m[i][j]});
      }
    for (int j = 0; j < s; ++j) x_star[j] = unif(rng);
    for (int i = 0; i < r; ++i) {
      y[i] = gauss(rng);
      for (int j = 0; j < s; ++j) c[i] += m[i][j] * x_star[j];
    }
    for (int j = 0; j < s; ++j) {
      xi[j] = unif(rng);
      for (int i = 0; i < r; ++i) xi[j] += m[i][j] * y[i];
    }
    const auto mat = ymlp::SparseMatrix::from_triplets(r, s, std::move(ts));
    const ymlp::LpSolution sol = ymlp::solve_lp(xi, mat, c);
    worst_rp = std::max(worst_rp, sol.rp_scaled);
    worst_gap = std::max(worst_gap, sol.mu);
    if (sol.status == ymlp::LpStatus::optimal) ++ok;
  }
  std::printf("random LP self-test: %d/%d optimal, worst rp %.3e, worst mu %.3e\n", ok, count,
              worst_rp, worst_gap);
  return ok == count ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Young-measure LP solver for nonlinear PDEs"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a named experiment or a JSON config");
  std::string run_spec, run_mode, run_init_mode, run_out;
  std::optional<int> run_nt;
  std::vector<int> run_nx, run_nxi;
  run->add_option("experiment", run_spec, "experiment name or config.json path")->required();
  run->add_option("--nt", run_nt, "override time steps");
  run->add_option("--nx", run_nx, "override spatial cells (per axis)");
  run->add_option("--nxi", run_nxi, "override phase cells (per component)");
  run->add_option("--mode", run_mode, "LP solve mode: cell (default) or step");
  run->add_option("--init-mode", run_init_mode, "nearest or mean-preserving");
  run->add_option("--out", run_out, "output directory (default $YMLP_OUTPUT_ROOT/<name>)");
  bool run_full_fields = false;
  std::string run_ipm_log;
  run->add_flag("--full-fields", run_full_fields, "also write (t, x, value) field histories");
  run->add_option("--ipm-log", run_ipm_log, "append per-iteration solver CSV rows to this file");

  // convergence
  auto* conv = app.add_subcommand("convergence", "doubling-refinement error study");
  std::string conv_name, conv_out;
  int conv_levels = 5;
  conv->add_option("experiment", conv_name, "experiment with an exact reference")->required();
  conv->add_option("--levels", conv_levels, "refinement levels (default 5)");
  conv->add_option("--out", conv_out, "CSV output path");
  int conv_jobs = 1;
  conv->add_option("--jobs", conv_jobs, "run refinement levels concurrently");

  // complexity
  auto* cx = app.add_subcommand("complexity", "cost-model comparison tables");
  std::vector<std::string> cx_methods;
  std::string cx_pde, cx_compare;
  int cx_d = 1, cx_m = 1;
  bool cx_random = false, cx_particle = false;
  std::optional<double> cx_Nt, cx_Nx, cx_Nxi, cx_Nomega, cx_eps, cx_delta, cx_kappa;
  cx->add_option("--methods", cx_methods, "methods (comma separated)")->delimiter(',');
  cx->add_option("--pde", cx_pde, "burgers | allen-cahn | barotropic-euler | full-euler");
  cx->add_option("--d", cx_d, "physical dimension");
  cx->add_option("--m", cx_m, "random dimension");
  cx->add_flag("--random", cx_random, "stochastic-collocation LP");
  cx->add_flag("--particle", cx_particle, "particle representation");
  cx->add_option("--Nt", cx_Nt);
  cx->add_option("--Nx", cx_Nx);
  cx->add_option("--Nxi", cx_Nxi);
  cx->add_option("--Nomega", cx_Nomega);
  cx->add_option("--eps", cx_eps);
  cx->add_option("--delta", cx_delta);
  cx->add_option("--kappa", cx_kappa, "condition number of the Newton matrix");
  cx->add_option("--compare", cx_compare, "advantage report: method_a,method_b");
  bool cx_csv = false;
  cx->add_flag("--csv", cx_csv, "emit the table as CSV");

  // export-lp
  auto* exp = app.add_subcommand("export-lp", "write the assembled LP as a triplet file");
  std::string exp_spec, exp_out = "lp.txt";
  bool exp_global = false;
  exp->add_option("experiment", exp_spec, "experiment name or config.json path")->required();
  exp->add_option("--out", exp_out, "output path (default lp.txt)");
  exp->add_flag("--global", exp_global, "export the all-time-levels LP instead of step 0");

  // lp-selftest
  auto* st = app.add_subcommand("lp-selftest", "solve seeded random LPs and report KKT quality");
  int st_count = 100;
  unsigned st_seed = 20240101;
  st->add_option("--count", st_count, "number of problems");
  st->add_option("--seed", st_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return run_cmd(run_spec, run_nt, run_nx, run_nxi, run_mode, run_init_mode, run_out,
                     run_full_fields, run_ipm_log);
    if (*conv) return convergence_cmd(conv_name, conv_levels, conv_out, conv_jobs);
    if (*cx)
      return complexity_cmd(cx_methods, cx_pde, cx_d, cx_m, cx_random, cx_particle, cx_Nt, cx_Nx,
                            cx_Nxi, cx_Nomega, cx_eps, cx_delta, cx_kappa, cx_compare, cx_csv);
    if (*exp) return export_lp_cmd(exp_spec, exp_out, exp_global);
    if (*st) return lp_selftest_cmd(st_count, st_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
