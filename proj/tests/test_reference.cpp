#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ymlp/reference.hpp"

using namespace ymlp;
using Catch::Approx;

TEST_CASE("burgers exact solutions") {
  REQUIRE(burgers_exact(BurgersWave::rarefaction, 0.0, 1.0) == Approx(0.0));
  REQUIRE(burgers_exact(BurgersWave::rarefaction, -2.0, 1.0) == -1.0);
  REQUIRE(burgers_exact(BurgersWave::rarefaction, 3.0, 1.0) == 2.0);
  REQUIRE(burgers_exact(BurgersWave::rarefaction, 1.0, 1.0) == Approx(1.0));
  REQUIRE(burgers_exact(BurgersWave::shock, 0.4, 1.0) == 2.0);
  REQUIRE(burgers_exact(BurgersWave::shock, 0.6, 1.0) == -1.0);
  REQUIRE_THROWS_AS(burgers_exact(BurgersWave::shock, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("error norms") {
  SECTION("zero for identical fields") {
    std::vector<double> u = {1.0, 2.0, 3.0};
    const ErrorNorms e = error_norms(u, u, 0.5);
    REQUIRE(e.l1 == 0.0);
    REQUIRE(e.l2 == 0.0);
  }
  SECTION("constant offset on [-3,3]") {
    const int nx = 60;
    const double h = 6.0 / nx;
    std::vector<double> u(nx, 0.1), ref(nx, 0.0);
    const ErrorNorms e = error_norms(u, ref, h);
    REQUIRE(e.l1 == Approx(0.6).margin(1e-14));
    REQUIRE(e.l2 == Approx(0.1 * std::sqrt(6.0)).margin(1e-14));
  }
  SECTION("metric properties on random fields") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const int nx = 40;
    const double h = 0.05;
    std::vector<double> a(nx), b(nx), c(nx), zero(nx, 0.0);
    for (int i = 0; i < nx; ++i) {
      a[i] = val(rng);
      b[i] = val(rng);
      c[i] = val(rng);
    }
    const ErrorNorms ab = error_norms(a, b, h), ba = error_norms(b, a, h);
    REQUIRE(ab.l1 == Approx(ba.l1).margin(1e-13));
    REQUIRE(ab.l2 == Approx(ba.l2).margin(1e-13));
    const ErrorNorms ac = error_norms(a, c, h), cb = error_norms(c, b, h);
    REQUIRE(ab.l1 <= ac.l1 + cb.l1 + 1e-13);
    REQUIRE(ab.l2 <= ac.l2 + cb.l2 + 1e-13);
  }
}

TEST_CASE("convergence table rates") {
  SECTION("hand-computed log ratios") {
    std::vector<ConvergenceRow> rows(3);
    rows[0] = {10, 15, 10, 0.4, 0, 0.8, 0};
    rows[1] = {20, 30, 20, 0.1, 0, 0.4, 0};
    rows[2] = {40, 60, 40, 0.1, 0, 0.2, 0};
    const auto table = convergence_table(rows);
    REQUIRE(std::isnan(table[0].l1_rate));
    REQUIRE(table[1].l1_rate == Approx(2.0).margin(1e-14));  // log2(0.4/0.1)
    REQUIRE(table[1].l2_rate == Approx(1.0).margin(1e-14));
    REQUIRE(table[2].l1_rate == Approx(0.0).margin(1e-14));  // identical errors
    REQUIRE(table[2].l2_rate == Approx(1.0).margin(1e-14));
  }
  SECTION("non-doubling refinements use the general formula") {
    std::vector<ConvergenceRow> rows(2);
    rows[0] = {10, 10, 10, 0.9, 0, 0.9, 0};
    rows[1] = {30, 30, 30, 0.1, 0, 0.3, 0};
    const auto table = convergence_table(rows);
    REQUIRE(table[1].l1_rate == Approx(std::log(9.0) / std::log(3.0)).margin(1e-14));
    REQUIRE(table[1].l2_rate == Approx(1.0).margin(1e-14));
  }
  SECTION("the published rarefaction rate follows from the published errors") {
    REQUIRE(std::log2(2.3182e-01 / 1.2837e-01) == Approx(0.8527).margin(5e-4));
    REQUIRE(std::log2(2.2612e-01 / 9.5736e-02) == Approx(1.2400).margin(5e-4));
  }
}

TEST_CASE("fv reference: constant data stays constant") {
  auto constant = [](std::span<const double>, double* out) {
    out[0] = 1.0;
    out[1] = 0.5;
  };
  const PdeModel model = barotropic_euler_model(1.4);
  for (Bc bc : {Bc::periodic, Bc::outflow}) {
    const FvReferenceResult res = fv_reference(model, 50, 40, 0.0, 1.0, 0.05, constant, bc);
    for (int k = 0; k < 40; ++k) {
      REQUIRE(res.u[k * 2 + 0] == Approx(1.0).margin(1e-13));
      REQUIRE(res.u[k * 2 + 1] == Approx(0.5).margin(1e-13));
    }
  }
}

TEST_CASE("fv reference: shock self-check against the exact solution") {
  const PdeModel model = burgers_model();
  auto u0 = [](std::span<const double> x, double* out) { out[0] = x[0] < 0.0 ? 2.0 : -1.0; };
  const FvReferenceResult res = fv_reference(model, 2000, 1000, -3.0, 3.0, 1.0, u0, Bc::outflow);
  std::vector<double> exact(1000);
  for (int k = 0; k < 1000; ++k) exact[k] = burgers_exact(BurgersWave::shock, res.center(k), 1.0);
  const ErrorNorms e = error_norms(res.u, exact, res.h());
  REQUIRE(e.l1 <= 0.02);
}

TEST_CASE("fv reference converges on the rarefaction at order >= 0.5") {
  const PdeModel model = burgers_model();
  auto u0 = [](std::span<const double> x, double* out) { out[0] = x[0] < 0.0 ? -1.0 : 2.0; };
  double prev_l1 = 0.0;
  for (int lev = 0; lev < 4; ++lev) {
    const int nx = 100 << lev, nt = 200 << lev;
    const FvReferenceResult res = fv_reference(model, nt, nx, -3.0, 3.0, 1.0, u0, Bc::outflow);
    std::vector<double> exact(nx);
    for (int k = 0; k < nx; ++k)
      exact[k] = burgers_exact(BurgersWave::rarefaction, res.center(k), 1.0);
    const ErrorNorms e = error_norms(res.u, exact, res.h());
    if (lev > 0) {
      const double rate = std::log2(prev_l1 / e.l1);
      REQUIRE(rate >= 0.5);
    }
    prev_l1 = e.l1;
  }
}

TEST_CASE("allen-cahn reference respects the maximum principle") {
  const PdeModel model = allen_cahn_model(1.1);
  auto u0 = [](std::span<const double> x, double* out) { out[0] = std::abs(x[0]) < 0.5 ? 1.0 : -1.0; };
  const FvReferenceResult res = fv_reference(model, 4000, 100, -1.0, 1.0, 0.02, u0, Bc::periodic);
  for (int k = 0; k < 100; ++k) {
    REQUIRE(res.u[k] <= 1.0 + 1e-12);
    REQUIRE(res.u[k] >= -1.0 - 1e-12);
  }
}

TEST_CASE("stability guards") {
  const PdeModel burgers = burgers_model();
  auto u0 = [](std::span<const double> x, double* out) { out[0] = x[0] < 0.0 ? 2.0 : -1.0; };
  // CFL: dt max-speed > h
  REQUIRE_THROWS_AS(fv_reference(burgers, 10, 1000, -3.0, 3.0, 1.0, u0, Bc::outflow),
                    std::invalid_argument);
  const PdeModel ac = allen_cahn_model(1.1);
  auto flat = [](std::span<const double>, double* out) { out[0] = 0.5; };
  // explicit diffusion: dt > h^2/2
  REQUIRE_THROWS_AS(fv_reference(ac, 10, 1000, 0.0, 1.0, 0.02, flat, Bc::periodic),
                    std::invalid_argument);
}
