#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymlp/quadrature.hpp"

namespace ymlp {

using StateView = std::span<const double>;

enum class ObjectiveKind {
  entropy_max,                // maximize integrated entropy (Burgers, Euler)
  regularized_potential_min,  // minimize integrated regularized potential (Allen-Cahn)
};

/// One PDE family: flux, entropy, characteristic speed, and the optional
/// reaction/diffusion pieces needed by the reaction-diffusion variant.
struct PdeModel {
  std::string name;
  int n = 1;  // state dimension
  int d = 1;  // physical dimension

  /// flux(xi) -> out[comp * d + axis]
  std::function<void(StateView, double*)> flux;
  /// entropy to be maximized (concave on the admissible phase box)
  std::function<double(StateView)> entropy;
  /// maximum absolute characteristic speed, >= 0
  std::function<double(StateView)> char_speed;
  /// energy density used by the moment diagnostics (-entropy for the
  /// hyperbolic models, the double-well potential for Allen-Cahn)
  std::function<double(StateView)> energy;
  /// objective density assembled into the LP cost row; minimized after the
  /// entropy_max sign flip is applied by the assembler
  std::function<double(StateView)> objective_density;

  /// reaction term G'(u) (Allen-Cahn); empty otherwise
  std::function<double(StateView)> reaction;
  bool has_laplacian = false;

  ObjectiveKind objective_kind = ObjectiveKind::entropy_max;

  double gamma = 0.0;  // barotropic Euler adiabatic index
  double alpha = 0.0;  // Allen-Cahn regularization strength
};

/// Truncated phase-space box with per-component bounds and cell counts.
struct PhaseBox {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> cells;

  int dim() const { return static_cast<int>(lower.size()); }

  long cell_count() const {
    long s = 1;
    for (int c : cells) s *= c;
    return s;
  }

  double spacing(int comp) const { return (upper[comp] - lower[comp]) / cells[comp]; }

  void validate() const {
    if (lower.size() != upper.size() || lower.size() != cells.size() || lower.empty())
      throw std::invalid_argument("PhaseBox: inconsistent component counts");
    for (size_t c = 0; c < lower.size(); ++c) {
      if (!(lower[c] < upper[c])) throw std::invalid_argument("PhaseBox: lower must be < upper");
      if (cells[c] < 1) throw std::invalid_argument("PhaseBox: cells must be >= 1");
    }
  }
};

inline PdeModel burgers_model() {
  PdeModel m;
  m.name = "burgers";
  m.n = 1;
  m.d = 1;
  m.flux = [](StateView xi, double* out) { out[0] = 0.5 * xi[0] * xi[0]; };
  m.entropy = [](StateView xi) { return -xi[0] * xi[0]; };
  m.char_speed = [](StateView xi) { return std::abs(xi[0]); };
  m.energy = [](StateView xi) { return xi[0] * xi[0]; };
  m.objective_density = m.entropy;
  m.objective_kind = ObjectiveKind::entropy_max;
  return m;
}

/// Barotropic Euler in one space dimension, state (rho, m), pressure rho^gamma.
/// Evaluation at rho <= 0 is a domain error: the phase box must exclude vacuum.
inline PdeModel barotropic_euler_model(double gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("barotropic_euler_model: gamma must be > 1");
  PdeModel m;
  m.name = "barotropic-euler";
  m.n = 2;
  m.d = 1;
  m.gamma = gamma;
  auto check = [](StateView xi) {
    if (!(xi[0] > 0.0))
      throw std::domain_error("barotropic-euler: density must be positive (vacuum excluded)");
  };
  m.flux = [gamma, check](StateView xi, double* out) {
    check(xi);
    const double rho = xi[0], mom = xi[1];
    out[0] = mom;
    out[1] = mom * mom / rho + std::pow(rho, gamma);
  };
  m.entropy = [gamma, check](StateView xi) {
    check(xi);
    const double rho = xi[0], mom = xi[1];
    return -(0.5 * mom * mom / rho + std::pow(rho, gamma) / (gamma - 1.0));
  };
  m.char_speed = [gamma, check](StateView xi) {
    check(xi);
    const double rho = xi[0], mom = xi[1];
    return std::abs(mom / rho) + std::sqrt(gamma * std::pow(rho, gamma - 1.0));
  };
  m.energy = [entropy = m.entropy](StateView xi) { return -entropy(xi); };
  m.objective_density = m.entropy;
  m.objective_kind = ObjectiveKind::entropy_max;
  return m;
}

inline double allen_cahn_potential(double u) {
  const double w = 1.0 - u * u;
  return 0.25 * w * w;
}

/// Allen-Cahn with double-well potential G(u) = (1-u^2)^2/4.
/// The LP cost row carries the convex regularization G(u) + alpha/2 u^2,
/// which requires alpha > 1.
inline PdeModel allen_cahn_model(double alpha) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("allen_cahn_model: alpha must be > 1 for a convex objective");
  PdeModel m;
  m.name = "allen-cahn";
  m.n = 1;
  m.d = 1;
  m.alpha = alpha;
  m.flux = [](StateView, double* out) { out[0] = 0.0; };
  m.entropy = [alpha](StateView xi) {
    return -(allen_cahn_potential(xi[0]) + 0.5 * alpha * xi[0] * xi[0]);
  };
  m.char_speed = [](StateView) { return 0.0; };
  m.energy = [](StateView xi) { return allen_cahn_potential(xi[0]); };
  m.objective_density = [alpha](StateView xi) {
    return allen_cahn_potential(xi[0]) + 0.5 * alpha * xi[0] * xi[0];
  };
  m.reaction = [](StateView xi) { return xi[0] * xi[0] * xi[0] - xi[0]; };
  m.has_laplacian = true;
  m.objective_kind = ObjectiveKind::regularized_potential_min;
  return m;
}

/// Transport-free scalar model; the measure stays put under the step map.
inline PdeModel zero_flux_model() {
  PdeModel m = burgers_model();
  m.name = "zero-flux";
  m.flux = [](StateView, double* out) { out[0] = 0.0; };
  m.char_speed = [](StateView) { return 0.0; };
  return m;
}

inline PdeModel make_model(const std::string& name, double gamma, double alpha) {
  if (name == "burgers") return burgers_model();
  if (name == "barotropic-euler") return barotropic_euler_model(gamma);
  if (name == "allen-cahn") return allen_cahn_model(alpha);
  if (name == "zero-flux") return zero_flux_model();
  throw std::invalid_argument("unknown model name: " + name);
}

}  // namespace ymlp
