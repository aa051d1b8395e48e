#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ymlp/experiments.hpp"

namespace ymlp {

/// Builds an ExperimentConfig from the JSON schema documented in the README.
/// A top-level "experiment" key loads a named setup; the remaining keys
/// override or define the custom problem.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("experiment")) cfg = make_experiment(j.at("experiment").get<std::string>());

  if (j.contains("model")) {
    const auto& m = j.at("model");
    cfg.model_name = m.value("name", cfg.model_name);
    cfg.gamma = m.value("gamma", cfg.gamma);
    cfg.alpha = m.value("alpha", cfg.alpha);
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    cfg.grid.T = g.value("T", cfg.grid.T);
    cfg.grid.nt = g.value("nt", cfg.grid.nt);
    if (g.contains("space")) {
      const auto& s = g.at("space");
      cfg.grid.x_lower = s.at("lower").get<std::vector<double>>();
      cfg.grid.x_upper = s.at("upper").get<std::vector<double>>();
      cfg.grid.nx = s.at("nx").get<std::vector<int>>();
    }
    if (g.contains("bc")) {
      const std::string bc = g.at("bc").get<std::string>();
      if (bc == "periodic") cfg.grid.bc = Bc::periodic;
      else if (bc == "outflow") cfg.grid.bc = Bc::outflow;
      else throw std::invalid_argument("config: bc must be periodic or outflow");
    }
  }

  if (j.contains("phase")) {
    const auto& p = j.at("phase");
    cfg.grid.phase.lower = p.at("lower").get<std::vector<double>>();
    cfg.grid.phase.upper = p.at("upper").get<std::vector<double>>();
    cfg.grid.phase.cells = p.at("cells").get<std::vector<int>>();
  }

  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    const std::string type = init.at("type").get<std::string>();
    if (type == "constant") {
      const auto value = init.at("value").get<std::vector<double>>();
      cfg.u0 = [value](std::span<const double>, double* out) {
        for (size_t c = 0; c < value.size(); ++c) out[c] = value[c];
      };
    } else if (type == "riemann") {
      const auto left = init.at("left").get<std::vector<double>>();
      const auto right = init.at("right").get<std::vector<double>>();
      const double x0 = init.value("x0", 0.0);
      if (left.size() != right.size())
        throw std::invalid_argument("config: riemann states must have equal size");
      cfg.u0 = [left, right, x0](std::span<const double> x, double* out) {
        const auto& v = x[0] < x0 ? left : right;
        for (size_t c = 0; c < v.size(); ++c) out[c] = v[c];
      };
    } else {
      throw std::invalid_argument("config: initial type must be constant or riemann");
    }
  }

  if (j.contains("init_mode")) {
    const std::string mode = j.at("init_mode").get<std::string>();
    if (mode == "nearest") cfg.init_mode = DiracMode::nearest;
    else if (mode == "mean_preserving") cfg.init_mode = DiracMode::mean_preserving;
    else throw std::invalid_argument("config: init_mode must be nearest or mean_preserving");
  }

  if (j.contains("collocation")) {
    const auto& c = j.at("collocation");
    const std::string family = c.value("family", "uniform");
    const auto nodes = c.at("nodes").get<std::vector<int>>();
    if (family == "uniform") {
      const auto lower = c.at("lower").get<std::vector<double>>();
      const auto upper = c.at("upper").get<std::vector<double>>();
      cfg.colloc = uniform_collocation(lower, upper, nodes);
    } else if (family == "gaussian") {
      const auto mean = c.at("mean").get<std::vector<double>>();
      const auto sigma = c.at("sigma").get<std::vector<double>>();
      cfg.colloc = gaussian_collocation(mean, sigma, nodes);
    } else {
      throw std::invalid_argument("config: collocation family must be uniform or gaussian");
    }
    if (c.contains("shift"))
      cfg.random_shift = c.at("shift").get<std::vector<std::vector<double>>>();
    if (c.contains("normalization")) {
      const std::string norm = c.at("normalization").get<std::string>();
      if (norm == "per-node") cfg.normalization = CollocationNormalization::per_node;
      else if (norm == "joint") cfg.normalization = CollocationNormalization::joint;
      else throw std::invalid_argument("config: normalization must be per-node or joint");
    }
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.ipm.sigma = s.value("sigma", cfg.ipm.sigma);
    cfg.ipm.tol_p = s.value("tol_p", cfg.ipm.tol_p);
    cfg.ipm.tol_d = s.value("tol_d", cfg.ipm.tol_d);
    cfg.ipm.tol_gap = s.value("tol_gap", cfg.ipm.tol_gap);
    cfg.ipm.max_iter = s.value("max_iter", cfg.ipm.max_iter);
    cfg.ipm.ftb = s.value("ftb", cfg.ipm.ftb);
    cfg.ipm.reg = s.value("reg", cfg.ipm.reg);
    cfg.ipm.mehrotra = s.value("mehrotra", cfg.ipm.mehrotra);
    if (s.contains("mode")) {
      const std::string mode = s.at("mode").get<std::string>();
      if (mode == "cell") cfg.mode = SolveMode::cell;
      else if (mode == "step") cfg.mode = SolveMode::step;
      else throw std::invalid_argument("config: solver mode must be cell or step");
    }
    cfg.quad_points = s.value("quad_points", cfg.quad_points);
  }

  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
  return cfg;
}

inline ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

}  // namespace ymlp
