#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ymlp/moments.hpp"

using namespace ymlp;
using Catch::Approx;

namespace {
GridSpec grid_1d(double lo, double hi, int nxi, int nx = 4) {
  GridSpec g;
  g.T = 1.0;
  g.nt = 1;
  g.x_lower = {-3.0};
  g.x_upper = {3.0};
  g.nx = {nx};
  g.phase = {{lo}, {hi}, {nxi}};
  g.bc = Bc::periodic;
  return g;
}
}  // namespace

TEST_CASE("mean field of basic measures") {
  const PdeModel model = burgers_model();
  GridSpec g = grid_1d(0.0, 1.0, 10, 1);
  const PhaseCoefficients pc = phase_coefficients(model, g);
  std::vector<double> u(1);

  SECTION("point mass reproduces the cell center") {
    std::vector<double> f(10, 0.0);
    f[4] = 1.0;
    mean_field_level(f, 1, 1, 10, 1, pc.u_bar, u);
    REQUIRE(u[0] == Approx(pc.u_bar[4]).margin(1e-15));
  }
  SECTION("uniform measure on [0,1] has mean one half") {
    std::vector<double> f(10, 0.1);
    mean_field_level(f, 1, 1, 10, 1, pc.u_bar, u);
    REQUIRE(u[0] == Approx(0.5).margin(1e-14));
  }
  SECTION("symmetric masses cancel") {
    GridSpec g2 = grid_1d(-1.25, 1.25, 5, 1);  // centers -1, -0.5, 0, 0.5, 1
    const PhaseCoefficients pc2 = phase_coefficients(model, g2);
    std::vector<double> f(5, 0.0);
    f[0] = 0.5;
    f[4] = 0.5;
    mean_field_level(f, 1, 1, 5, 1, pc2.u_bar, u);
    REQUIRE(u[0] == Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("burgers energy defect of concentrated measures") {
  const PdeModel model = burgers_model();
  SECTION("one-cell dirac has the uniform-cell variance as defect") {
    GridSpec g = grid_1d(0.0, 1.0, 4, 1);
    const double h = g.hxi(0);
    const PhaseCoefficients pc = phase_coefficients(model, g);
    const auto e_bar = energy_cell_averages(model, g);
    std::vector<double> f(4, 0.0);
    f[2] = 1.0;
    std::vector<double> u(1), eh(1), df(1);
    mean_field_level(f, 1, 1, 4, 1, pc.u_bar, u);
    energy_level(f, 1, 1, 4, e_bar, eh);
    energy_defect_level(eh, u, 1, 1, model, df);
    REQUIRE(df[0] == Approx(h * h / 12.0).margin(1e-15));
    REQUIRE(df[0] <= h * h * 1.0);  // curvature bound for xi^2
  }
  SECTION("half masses at centers +-1") {
    GridSpec g = grid_1d(-1.25, 1.25, 5, 1);
    const double h = g.hxi(0);
    const PhaseCoefficients pc = phase_coefficients(model, g);
    const auto e_bar = energy_cell_averages(model, g);
    std::vector<double> f(5, 0.0);
    f[0] = 0.5;
    f[4] = 0.5;
    std::vector<double> u(1), eh(1), df(1);
    mean_field_level(f, 1, 1, 5, 1, pc.u_bar, u);
    energy_level(f, 1, 1, 5, e_bar, eh);
    energy_defect_level(eh, u, 1, 1, model, df);
    REQUIRE(u[0] == Approx(0.0).margin(1e-15));
    REQUIRE(eh[0] == Approx(1.0 + h * h / 12.0).margin(1e-14));
    REQUIRE(df[0] == Approx(1.0 + h * h / 12.0).margin(1e-14));
  }
}

TEST_CASE("defect is nonnegative for convex energy densities") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  SECTION("burgers") {
    const PdeModel model = burgers_model();
    GridSpec g = grid_1d(-1.05, 2.05, 12, 1);
    const PhaseCoefficients pc = phase_coefficients(model, g);
    const auto e_bar = energy_cell_averages(model, g);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f(12);
      double total = 0.0;
      for (auto& v : f) total += (v = mass(rng));
      for (auto& v : f) v /= total;
      std::vector<double> u(1), eh(1), df(1);
      mean_field_level(f, 1, 1, 12, 1, pc.u_bar, u);
      energy_level(f, 1, 1, 12, e_bar, eh);
      energy_defect_level(eh, u, 1, 1, model, df);
      REQUIRE(df[0] >= -1e-10);
    }
  }
  SECTION("barotropic euler, gamma = 1.4") {
    const PdeModel model = barotropic_euler_model(1.4);
    GridSpec g;
    g.T = 1.0;
    g.nt = 1;
    g.x_lower = {0.0};
    g.x_upper = {1.0};
    g.nx = {1};
    g.phase = {{0.105, 0.205}, {1.805, 1.805}, {6, 6}};
    const PhaseCoefficients pc = phase_coefficients(model, g);
    const auto e_bar = energy_cell_averages(model, g);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f(36);
      double total = 0.0;
      for (auto& v : f) total += (v = mass(rng));
      for (auto& v : f) v /= total;
      std::vector<double> u(2), eh(1), df(1);
      mean_field_level(f, 1, 1, 36, 2, pc.u_bar, u);
      energy_level(f, 1, 1, 36, e_bar, eh);
      energy_defect_level(eh, u, 1, 2, model, df);
      REQUIRE(df[0] >= -1e-10);
    }
  }
}

TEST_CASE("two quadrature routes to the averaged energy agree") {
  const PdeModel model = barotropic_euler_model(1.4);
  GridSpec g;
  g.T = 1.0;
  g.nt = 1;
  g.x_lower = {0.0};
  g.x_upper = {1.0};
  g.nx = {1};
  g.phase = {{0.3, -1.0}, {1.3, 1.0}, {5, 5}};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> mass(0.0, 1.0);
  std::vector<double> f(25);
  double total = 0.0;
  for (auto& v : f) total += (v = mass(rng));
  for (auto& v : f) v /= total;
  std::vector<double> eh3(1), eh6(1);
  energy_level(f, 1, 1, 25, energy_cell_averages(model, g, 3), eh3);
  energy_level(f, 1, 1, 25, energy_cell_averages(model, g, 6), eh6);
  REQUIRE(eh3[0] == Approx(eh6[0]).margin(1e-9));
}

TEST_CASE("spatial totals") {
  GridSpec g = grid_1d(0.0, 1.0, 2, 6);  // domain [-3,3], 6 cells of width 1
  std::vector<double> ones(6, 1.0), zeros(6, 0.0), twos(6, 2.0);
  REQUIRE(spatial_total(ones, g) == Approx(6.0));
  REQUIRE(spatial_total(zeros, g) == 0.0);
  REQUIRE(spatial_total(twos, g) == Approx(2.0 * spatial_total(ones, g)));
}

TEST_CASE("allen-cahn energies") {
  const double alpha = 1.1;
  const PdeModel model = allen_cahn_model(alpha);
  GridSpec g;
  g.T = 0.02;
  g.nt = 1;
  g.x_lower = {0.0};
  g.x_upper = {1.0};
  g.nx = {8};
  g.phase = {{-1.05}, {1.05}, {21}};  // cell 20 is [0.95, 1.05], center 1
  g.bc = Bc::periodic;
  const PhaseCoefficients pc = phase_coefficients(model, g);
  const auto g_bar = energy_cell_averages(model, g);

  SECTION("spatially constant measure: gradient terms vanish, E = G(u)") {
    const long K = 8, L = 21;
    std::vector<double> f(K * L, 0.0);
    for (long k = 0; k < K; ++k) f[k * L + 20] = 1.0;  // dirac at u = 1
    std::vector<double> u(K);
    mean_field_level(f, K, 1, L, 1, pc.u_bar, u);
    const AllenCahnLevelEnergies en = allen_cahn_energies_level(f, u, g, pc, g_bar, alpha);
    for (long k = 0; k < K; ++k) {
      REQUIRE(u[k] == Approx(1.0).margin(1e-14));
      REQUIRE(en.e[k] == Approx(allen_cahn_potential(1.0)).margin(1e-14));  // G(1) = 0
      // measure-averaged energy differs only by the cell-average offset,
      // bounded by h_xi^2/12 times the potential curvature near u = 1
      REQUIRE(std::abs(en.e_hat[k] - en.e[k]) <= 0.1 * 0.1 / 12.0 * 3.0);
      REQUIRE(en.defect_re[k] >= -1e-12);  // regularized potential is convex
      // E_RE - E = (alpha/2) u^2 when the gradient terms cancel
      REQUIRE(en.e_re[k] - en.e[k] == Approx(0.5 * alpha * u[k] * u[k]).margin(1e-14));
    }
  }
  SECTION("u = 0 constant: regularized and plain energies coincide") {
    const long K = 8, L = 21;
    std::vector<double> f(K * L, 0.0);
    for (long k = 0; k < K; ++k) f[k * L + 10] = 1.0;  // center cell, u = 0
    std::vector<double> u(K);
    mean_field_level(f, K, 1, L, 1, pc.u_bar, u);
    const AllenCahnLevelEnergies en = allen_cahn_energies_level(f, u, g, pc, g_bar, alpha);
    for (long k = 0; k < K; ++k) {
      REQUIRE(u[k] == Approx(0.0).margin(1e-15));
      REQUIRE(en.e_re[k] - en.e[k] == Approx(0.0).margin(1e-15));
    }
  }
  SECTION("the literal gradient term enters e_hat but not the defect") {
    const long K = 8, L = 21;
    std::vector<double> f(K * L, 0.0);
    // support position varies with k: x-gradient of the measure is nonzero
    for (long k = 0; k < K; ++k) f[k * L + 8 + (k % 3)] = 1.0;
    std::vector<double> u(K);
    mean_field_level(f, K, 1, L, 1, pc.u_bar, u);
    const AllenCahnLevelEnergies en = allen_cahn_energies_level(f, u, g, pc, g_bar, alpha);
    bool grad_seen = false;
    for (long k = 0; k < K; ++k) {
      const double grad_part = en.e_hat[k] - (en.defect[k] + allen_cahn_potential(u[k]));
      if (grad_part > 1.0) grad_seen = true;  // the 1/(4 hx^2 hxi)-scaled term
      REQUIRE(en.defect[k] <= 0.5);           // defect itself stays potential-sized
    }
    REQUIRE(grad_seen);
  }
}
