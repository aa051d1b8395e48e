#include <catch2/catch_amalgamated.hpp>

#include "ymlp/complexity.hpp"

using namespace ymlp;
using Catch::Approx;

namespace {

// golden-table helpers: build the expected exponent maps cell by cell
CostExpr expect(std::initializer_list<std::pair<CostSymbol, DimExpr>> items) {
  CostExpr e;
  for (const auto& [sym, ex] : items) e.mul(sym, ex);
  return e;
}

DimExpr fr(std::int64_t num, std::int64_t den = 1) { return dim_const(Fraction(num, den)); }

}  // namespace

TEST_CASE("fraction arithmetic and formatting") {
  REQUIRE(Fraction(5, 2).str() == "2.5");
  REQUIRE(Fraction(119, 50).str() == "2.38");
  REQUIRE(Fraction(4, 2).str() == "2");
  REQUIRE(Fraction(1, 3).str() == "1/3");
  REQUIRE((Fraction(1, 2) + Fraction(1, 3)) == Fraction(5, 6));
  REQUIRE((Fraction(3, 4) * Fraction(2, 3)) == Fraction(1, 2));
  REQUIRE((Fraction(1, 2) - Fraction(1, 2)).is_zero());
  REQUIRE_THROWS_AS(Fraction(1, 0), std::invalid_argument);
}

TEST_CASE("dim expressions render like the tables") {
  REQUIRE(dim_n(Fraction(5, 2)).str() == "2.5n");
  REQUIRE((dim_n() + dim_d() + fr(3)).str() == "n + d + 3");
  REQUIRE((dim_m(Fraction(1, 2)) + fr(19, 2)).str() == "0.5m + 9.5");
  REQUIRE(DimExpr{}.str() == "0");
}

TEST_CASE("lp shape: deterministic grid, particle, and random columns") {
  CostParams grid_det;
  const LpShape a = lp_shape(grid_det);
  REQUIRE(a.r == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, dim_d()}}));
  REQUIRE(a.s == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, dim_d()},
                         {CostSymbol::N_xi, dim_n()}}));
  REQUIRE(a.R1 == a.r);
  REQUIRE(a.nnz == a.s);
  REQUIRE(a.s_M == expect({{CostSymbol::N_xi, dim_n()}}));

  CostParams particle;
  particle.representation = Representation::particle;
  const LpShape b = lp_shape(particle);
  REQUIRE(b.r == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, fr(1)}}));
  REQUIRE(b.s == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, fr(1)},
                         {CostSymbol::N_xi, fr(1)}}));
  REQUIRE(b.s_M == expect({{CostSymbol::N_xi, fr(1)}}));
  particle.random = true;
  REQUIRE_THROWS_AS(lp_shape(particle), std::invalid_argument);

  CostParams random;
  random.random = true;
  const LpShape c = lp_shape(random);
  REQUIRE(c.r == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, dim_d()},
                         {CostSymbol::N_omega, dim_m()}}));
  REQUIRE(c.s == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, dim_d()},
                         {CostSymbol::N_omega, dim_m()}, {CostSymbol::N_xi, dim_n()}}));
  REQUIRE(c.R1 == expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, dim_d()}}));
  REQUIRE(c.s_M == expect({{CostSymbol::N_omega, dim_m()}, {CostSymbol::N_xi, dim_n()}}));
}

TEST_CASE("golden: deterministic cost table (per-algorithm, r and N_xi form)") {
  CostParams p;  // symbolic d, n
  REQUIRE(cost(CostMethod::IPM, p) ==
          expect({{CostSymbol::N_t, fr(5, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(5, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(5, 2))}}));
  REQUIRE(cost(CostMethod::SIPM, p) ==
          expect({{CostSymbol::N_t, fr(119, 50)},
                  {CostSymbol::N_x, dim_d(Fraction(119, 50))},
                  {CostSymbol::N_xi, dim_n(Fraction(119, 50))}}));
  REQUIRE(cost(CostMethod::QIPM, p) ==
          expect({{CostSymbol::kappa_newt, fr(3)},
                  {CostSymbol::N_t, fr(2)},
                  {CostSymbol::N_x, dim_d(Fraction(2))},
                  {CostSymbol::N_xi, dim_n(Fraction(2))},
                  {CostSymbol::inv_delta, fr(2)}}));
  REQUIRE(cost(CostMethod::QZSG, p) ==
          expect({{CostSymbol::N_t, fr(7, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(7, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(1, 2))},
                  {CostSymbol::inv_eps, fr(7, 2)}}));
  REQUIRE(cost(CostMethod::QCP_query, p) ==
          expect({{CostSymbol::N_t, fr(3, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(3, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(1, 2))},
                  {CostSymbol::inv_eps, fr(1)}}));
  REQUIRE(cost(CostMethod::QCP_gate, p) ==
          expect({{CostSymbol::N_t, fr(5, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(5, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(3, 2))},
                  {CostSymbol::inv_eps, fr(1)}}));
  // QSDP appears in the per-algorithm summary but not the per-PDE tables
  REQUIRE(cost(CostMethod::QSDP, p) ==
          expect({{CostSymbol::N_t, fr(4)},
                  {CostSymbol::N_x, dim_d(Fraction(4))},
                  {CostSymbol::N_xi, dim_n()},
                  {CostSymbol::inv_eps, fr(2)}}));
  REQUIRE(cost(CostMethod::direct_classical, p) ==
          expect({{CostSymbol::N_t, fr(1)}, {CostSymbol::N_x, dim_d()}}));
}

TEST_CASE("golden: per-PDE table, d symbolic (n = 1, d+1, d+2)") {
  CostParams p;
  struct Family {
    DimExpr n;
  };
  const DimExpr n_scalar = fr(1);
  const DimExpr n_barotropic = dim_d() + fr(1);
  const DimExpr n_full = dim_d() + fr(2);

  auto nxi_exponent = [&](CostMethod method, const DimExpr& n_family) {
    const CostExpr e = cost(method, p);
    return substitute_n(e.exponents.at(CostSymbol::N_xi), n_family);
  };

  // Burgers / Allen-Cahn column
  REQUIRE(nxi_exponent(CostMethod::IPM, n_scalar) == fr(5, 2));
  REQUIRE(nxi_exponent(CostMethod::SIPM, n_scalar) == fr(119, 50));
  REQUIRE(nxi_exponent(CostMethod::QIPM, n_scalar) == fr(2));
  REQUIRE(nxi_exponent(CostMethod::QZSG, n_scalar) == fr(1, 2));
  REQUIRE(nxi_exponent(CostMethod::QCP_query, n_scalar) == fr(1, 2));
  // Barotropic Euler column: 2.5(d+1), 2.38(d+1), 2(d+1), (d+1)/2, (d+1)/2
  REQUIRE(nxi_exponent(CostMethod::IPM, n_barotropic) == dim_d(Fraction(5, 2)) + fr(5, 2));
  REQUIRE(nxi_exponent(CostMethod::SIPM, n_barotropic) ==
          dim_d(Fraction(119, 50)) + fr(119, 50));
  REQUIRE(nxi_exponent(CostMethod::QIPM, n_barotropic) == dim_d(Fraction(2)) + fr(2));
  REQUIRE(nxi_exponent(CostMethod::QZSG, n_barotropic) == dim_d(Fraction(1, 2)) + fr(1, 2));
  REQUIRE(nxi_exponent(CostMethod::QCP_query, n_barotropic) == dim_d(Fraction(1, 2)) + fr(1, 2));
  // Full Euler / NSF column: 2.5(d+2) etc.
  REQUIRE(nxi_exponent(CostMethod::IPM, n_full) == dim_d(Fraction(5, 2)) + fr(5));
  REQUIRE(nxi_exponent(CostMethod::QCP_gate, n_full) == dim_d(Fraction(3, 2)) + fr(3));
  // the N_t / N_x exponents do not depend on the family
  const CostExpr ipm = cost(CostMethod::IPM, p);
  REQUIRE(ipm.exponents.at(CostSymbol::N_t) == fr(5, 2));
  REQUIRE(ipm.exponents.at(CostSymbol::N_x) == dim_d(Fraction(5, 2)));
}

TEST_CASE("golden: per-PDE table at d = 3") {
  CostParams p;
  p.d = 3;
  struct Cell {
    CostMethod method;
    int n;
    double nt, nx, nxi;
  };
  // transcribed exponents: rows IPM/SIPM/QZSG/QCP-query/QCP-gate, columns
  // Burgers+AC (n=1), Barotropic (n=4), Full Euler (n=5)
  const Cell cells[] = {
      {CostMethod::IPM, 1, 2.5, 7.5, 2.5},     {CostMethod::IPM, 4, 2.5, 7.5, 10.0},
      {CostMethod::IPM, 5, 2.5, 7.5, 12.5},    {CostMethod::SIPM, 1, 2.38, 7.14, 2.38},
      {CostMethod::SIPM, 4, 2.38, 7.14, 9.52}, {CostMethod::SIPM, 5, 2.38, 7.14, 11.9},
      {CostMethod::QZSG, 1, 3.5, 10.5, 0.5},   {CostMethod::QZSG, 4, 3.5, 10.5, 2.0},
      {CostMethod::QZSG, 5, 3.5, 10.5, 2.5},   {CostMethod::QCP_query, 1, 1.5, 4.5, 0.5},
      {CostMethod::QCP_query, 4, 1.5, 4.5, 2.0}, {CostMethod::QCP_query, 5, 1.5, 4.5, 2.5},
      {CostMethod::QCP_gate, 1, 2.5, 7.5, 1.5}, {CostMethod::QCP_gate, 4, 2.5, 7.5, 6.0},
      {CostMethod::QCP_gate, 5, 2.5, 7.5, 7.5},
  };
  for (const Cell& cell : cells) {
    p.n = cell.n;
    const CostExpr e = cost(cell.method, p);
    REQUIRE(e.exponents.at(CostSymbol::N_t).at(p.d, p.n, p.m).value() == Approx(cell.nt));
    REQUIRE(e.exponents.at(CostSymbol::N_x).at(p.d, p.n, p.m).value() == Approx(cell.nx));
    REQUIRE(e.exponents.at(CostSymbol::N_xi).at(p.d, p.n, p.m).value() == Approx(cell.nxi));
  }
}

TEST_CASE("golden: random-problem cost table") {
  CostParams p;
  p.random = true;
  // q = N_t N_x^d throughout; exponents on (N_t, N_x^d) match the q powers
  REQUIRE(cost(CostMethod::IPM, p) ==
          expect({{CostSymbol::N_t, fr(5, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(5, 2))},
                  {CostSymbol::N_omega, dim_m(Fraction(5, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(5, 2))}}));
  REQUIRE(cost(CostMethod::SIPM, p) ==
          expect({{CostSymbol::N_t, fr(119, 50)},
                  {CostSymbol::N_x, dim_d(Fraction(119, 50))},
                  {CostSymbol::N_omega, dim_m(Fraction(119, 50))},
                  {CostSymbol::N_xi, dim_n(Fraction(119, 50))}}));
  REQUIRE(cost(CostMethod::QIPM, p) ==
          expect({{CostSymbol::kappa_newt, fr(3)},
                  {CostSymbol::N_t, fr(2)},
                  {CostSymbol::N_x, dim_d(Fraction(2))},
                  {CostSymbol::N_omega, dim_m(Fraction(2))},
                  {CostSymbol::N_xi, dim_n(Fraction(2))},
                  {CostSymbol::inv_delta, fr(2)}}));
  REQUIRE(cost(CostMethod::QZSG, p) ==
          expect({{CostSymbol::N_t, fr(7, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(7, 2))},
                  {CostSymbol::N_omega, dim_m(Fraction(1, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(1, 2))},
                  {CostSymbol::inv_eps, fr(7, 2)}}));
  REQUIRE(cost(CostMethod::QCP_query, p) ==
          expect({{CostSymbol::N_t, fr(3, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(3, 2))},
                  {CostSymbol::N_omega, dim_m(Fraction(1, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(1, 2))},
                  {CostSymbol::inv_eps, fr(1)}}));
  REQUIRE(cost(CostMethod::QCP_gate, p) ==
          expect({{CostSymbol::N_t, fr(5, 2)},
                  {CostSymbol::N_x, dim_d(Fraction(5, 2))},
                  {CostSymbol::N_omega, dim_m(Fraction(3, 2))},
                  {CostSymbol::N_xi, dim_n(Fraction(3, 2))},
                  {CostSymbol::inv_eps, fr(1)}}));
  REQUIRE(cost(CostMethod::direct_collocation, p) ==
          expect({{CostSymbol::N_t, fr(1)},
                  {CostSymbol::N_x, dim_d()},
                  {CostSymbol::N_omega, dim_m()}}));
}

TEST_CASE("crossover: quantum query advantage over direct collocation iff m > n + d + 3") {
  CostParams p;
  p.random = true;
  const AdvantageReport rep = advantage(CostMethod::QCP_query, CostMethod::direct_collocation, p);
  REQUIRE(rep.crossover == "m > n + d + 3");
  // QCP exponent (m+n)/2 + 1.5 d + 2.5; direct m + d + 1
  REQUIRE(rep.exponent_a == dim_m(Fraction(1, 2)) + dim_n(Fraction(1, 2)) +
                                dim_d(Fraction(3, 2)) + fr(5, 2));
  REQUIRE(rep.exponent_b == dim_m() + dim_d() + fr(1));

  SECTION("full euler at d = 3: N^{m/2 + 9.5} vs N^{m + 4}") {
    const DimExpr qcp = substitute_d(substitute_n(rep.exponent_a, dim_d() + fr(2)), 3);
    const DimExpr direct = substitute_d(rep.exponent_b, 3);
    REQUIRE(qcp == dim_m(Fraction(1, 2)) + fr(19, 2));
    REQUIRE(direct == dim_m() + fr(4));
    // quantum is cheaper by N^{m/2 - 5.5}
    REQUIRE((direct - qcp) == dim_m(Fraction(1, 2)) - fr(11, 2));
  }
}

TEST_CASE("a method has zero advantage over itself") {
  CostParams p;
  p.random = true;
  const AdvantageReport rep = advantage(CostMethod::QZSG, CostMethod::QZSG, p);
  REQUIRE(rep.difference.is_zero());
  REQUIRE(rep.crossover.empty());
}

TEST_CASE("numeric evaluation") {
  CostParams p;
  p.d = 1;
  p.n = 1;
  p.N_t = 10;
  p.N_x = 10;
  p.N_xi = 10;
  p.epsilon = 0.1;
  SECTION("values and monotonicity") {
    const CostExpr e = cost(CostMethod::QCP_query, p);
    const double v1 = evaluate_cost(e, p);
    REQUIRE(v1 == Approx(std::pow(10.0, 1.5 + 1.5 + 0.5 + 1.0)));
    CostParams finer = p;
    finer.N_x = 20;
    REQUIRE(evaluate_cost(e, finer) > v1);
  }
  SECTION("missing kappa for QIPM is a config error") {
    p.delta = 0.01;
    const CostExpr e = cost(CostMethod::QIPM, p);
    REQUIRE_THROWS_AS(evaluate_cost(e, p), std::invalid_argument);
    p.kappa_newt = 100.0;
    REQUIRE(evaluate_cost(e, p) > 0);
  }
  SECTION("direct collocation requires the random setting") {
    REQUIRE_THROWS_AS(cost(CostMethod::direct_collocation, p), std::invalid_argument);
  }
}

TEST_CASE("cost strings render compactly") {
  CostParams p;
  REQUIRE(cost(CostMethod::QCP_query, p).str() == "N_t^1.5 N_x^1.5d N_xi^0.5n (1/eps)");
  p.random = true;
  REQUIRE(cost(CostMethod::direct_collocation, p).str() == "N_t N_x^d N_omega^m");
}
