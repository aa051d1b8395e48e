#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ymlp {

/// Exact rational with normalized sign and reduced terms.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Fraction() = default;
  constexpr Fraction(std::int64_t n) : num(n), den(1) {}
  Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("Fraction: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Fraction operator-(Fraction a, Fraction b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
  friend Fraction operator/(Fraction a, Fraction b) {
    if (b.num == 0) throw std::invalid_argument("Fraction: division by zero");
    return {a.num * b.den, a.den * b.num};
  }
  friend Fraction operator-(Fraction a) { return {-a.num, a.den}; }
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Fraction& a, const Fraction& b) { return !(a == b); }
  friend bool operator<(const Fraction& a, const Fraction& b) { return a.num * b.den < b.num * a.den; }

  bool is_zero() const { return num == 0; }
  double value() const { return static_cast<double>(num) / den; }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    if (100 % den == 0) {  // exact two-decimal value, printed the way the tables do
      std::ostringstream os;
      const double v = value();
      os << v;
      return os.str();
    }
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

/// Exponent that is linear in the symbolic dimensions d, n, m.
struct DimExpr {
  Fraction c0, cd, cn, cm;

  friend DimExpr operator+(const DimExpr& a, const DimExpr& b) {
    return {a.c0 + b.c0, a.cd + b.cd, a.cn + b.cn, a.cm + b.cm};
  }
  friend DimExpr operator-(const DimExpr& a, const DimExpr& b) {
    return {a.c0 - b.c0, a.cd - b.cd, a.cn - b.cn, a.cm - b.cm};
  }
  friend DimExpr operator*(const DimExpr& a, const Fraction& f) {
    return {a.c0 * f, a.cd * f, a.cn * f, a.cm * f};
  }
  friend bool operator==(const DimExpr& a, const DimExpr& b) {
    return a.c0 == b.c0 && a.cd == b.cd && a.cn == b.cn && a.cm == b.cm;
  }

  bool is_zero() const { return c0.is_zero() && cd.is_zero() && cn.is_zero() && cm.is_zero(); }

  Fraction at(int d, int n, int m) const {
    return c0 + cd * Fraction(d) + cn * Fraction(n) + cm * Fraction(m);
  }

  /// Rendered like the tables: "2.5", "5n/2" -> "2.5n", "m/2 + 3/2", ...
  std::string str() const {
    std::ostringstream os;
    bool first = true;
    auto term = [&](const Fraction& f, const char* var) {
      if (f.is_zero()) return;
      if (!first) os << (f < Fraction(0) ? " - " : " + ");
      else if (f < Fraction(0)) os << "-";
      Fraction a = f < Fraction(0) ? -f : f;
      if (*var == '\0') {
        os << a.str();
      } else {
        if (!(a == Fraction(1))) os << a.str();
        os << var;
      }
      first = false;
    };
    term(cn, "n");
    term(cd, "d");
    term(cm, "m");
    term(c0, "");
    if (first) os << "0";
    return os.str();
  }
};

inline DimExpr dim_const(Fraction f) { return {f, {}, {}, {}}; }
inline DimExpr dim_d(Fraction f = Fraction(1)) { return {{}, f, {}, {}}; }
inline DimExpr dim_n(Fraction f = Fraction(1)) { return {{}, {}, f, {}}; }
inline DimExpr dim_m(Fraction f = Fraction(1)) { return {{}, {}, {}, f}; }

/// Replaces the symbol n by an expression in d (the per-PDE tables tie the
/// system size to the physical dimension, e.g. n = d + 2).
inline DimExpr substitute_n(const DimExpr& e, const DimExpr& n_value) {
  DimExpr out{e.c0, e.cd, Fraction(0), e.cm};
  out = out + n_value * e.cn;
  return out;
}

/// Substitutes d (and n, via n_value) by numbers, leaving m symbolic.
inline DimExpr substitute_d(const DimExpr& e, int d) {
  return {e.c0 + e.cd * Fraction(d), Fraction(0), e.cn, e.cm};
}

enum class CostSymbol { N_t, N_x, N_xi, N_omega, inv_eps, inv_delta, kappa_newt };

inline const char* to_string(CostSymbol s) {
  switch (s) {
    case CostSymbol::N_t: return "N_t";
    case CostSymbol::N_x: return "N_x";
    case CostSymbol::N_xi: return "N_xi";
    case CostSymbol::N_omega: return "N_omega";
    case CostSymbol::inv_eps: return "(1/eps)";
    case CostSymbol::inv_delta: return "(1/delta)";
    default: return "kappa_Newt";
  }
}

/// A cost as a product of symbol powers, exponents linear in (d, n, m),
/// with multiplicative notes (suppressed logarithmic or small factors).
struct CostExpr {
  std::map<CostSymbol, DimExpr> exponents;
  std::vector<std::string> notes;

  CostExpr& mul(CostSymbol s, DimExpr e) {
    if (!e.is_zero()) {
      auto [it, inserted] = exponents.emplace(s, e);
      if (!inserted) {
        it->second = it->second + e;
        if (it->second.is_zero()) exponents.erase(it);
      }
    }
    return *this;
  }

  friend bool operator==(const CostExpr& a, const CostExpr& b) { return a.exponents == b.exponents; }

  std::string str() const {
    if (exponents.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [sym, e] : exponents) {
      if (!first) os << " ";
      os << to_string(sym);
      if (!(e == dim_const(Fraction(1)))) {
        const std::string es = e.str();
        const bool braces = es.find(' ') != std::string::npos;
        os << "^" << (braces ? "{" : "") << es << (braces ? "}" : "");
      }
      first = false;
    }
    return os.str();
  }
};

enum class CostMethod {
  IPM,
  SIPM,
  QIPM,
  QZSG,
  QCP_query,
  QCP_gate,
  QSDP,
  direct_classical,
  direct_collocation,
};

inline const char* to_string(CostMethod m) {
  switch (m) {
    case CostMethod::IPM: return "IPM";
    case CostMethod::SIPM: return "SIPM";
    case CostMethod::QIPM: return "QIPM";
    case CostMethod::QZSG: return "QZSG";
    case CostMethod::QCP_query: return "QCP (query)";
    case CostMethod::QCP_gate: return "QCP (gate)";
    case CostMethod::QSDP: return "QSDP";
    case CostMethod::direct_classical: return "direct classical";
    default: return "direct collocation";
  }
}

inline CostMethod cost_method_from_string(const std::string& s) {
  if (s == "IPM") return CostMethod::IPM;
  if (s == "SIPM") return CostMethod::SIPM;
  if (s == "QIPM") return CostMethod::QIPM;
  if (s == "QZSG") return CostMethod::QZSG;
  if (s == "QCP-query" || s == "QCP" || s == "QCP_query") return CostMethod::QCP_query;
  if (s == "QCP-gate" || s == "QCP_gate") return CostMethod::QCP_gate;
  if (s == "QSDP") return CostMethod::QSDP;
  if (s == "direct-classical" || s == "direct_classical") return CostMethod::direct_classical;
  if (s == "direct-collocation" || s == "direct_collocation") return CostMethod::direct_collocation;
  throw std::invalid_argument("unknown cost method: " + s);
}

enum class Representation { grid, particle };

struct CostParams {
  int d = 1;
  int n = 1;
  int m = 1;                 // random dimension (random problems)
  bool random = false;       // stochastic-collocation LP
  Representation representation = Representation::grid;

  // optional numeric values for evaluation
  std::optional<double> N_t, N_x, N_xi, N_omega;
  std::optional<double> epsilon, delta, kappa_newt;
};

/// LP shape quantities (rows, variables, l1 norm, nonzeros, sparsity) as
/// symbol products.
struct LpShape {
  CostExpr r, s, R1, nnz, s_M;
};

inline LpShape lp_shape(const CostParams& p) {
  LpShape sh;
  if (p.representation == Representation::particle) {
    if (p.random)
      throw std::invalid_argument("lp_shape: particle representation is deterministic only");
    sh.r.mul(CostSymbol::N_t, dim_const(1)).mul(CostSymbol::N_x, dim_const(1));
    sh.s = sh.r;
    sh.s.mul(CostSymbol::N_xi, dim_const(1));
    sh.R1 = sh.r;
    sh.nnz = sh.s;
    sh.s_M.mul(CostSymbol::N_xi, dim_const(1));
    return sh;
  }
  sh.r.mul(CostSymbol::N_t, dim_const(1)).mul(CostSymbol::N_x, dim_d());
  if (p.random) sh.r.mul(CostSymbol::N_omega, dim_m());
  sh.s = sh.r;
  sh.s.mul(CostSymbol::N_xi, dim_n());
  sh.R1.mul(CostSymbol::N_t, dim_const(1)).mul(CostSymbol::N_x, dim_d());
  sh.nnz = sh.s;
  sh.s_M.mul(CostSymbol::N_xi, dim_n());
  if (p.random) sh.s_M.mul(CostSymbol::N_omega, dim_m());
  return sh;
}

namespace detail {
inline CostExpr pow(const CostExpr& base, Fraction e) {
  CostExpr out;
  for (const auto& [sym, ex] : base.exponents) out.mul(sym, ex * e);
  return out;
}
inline CostExpr mul(const CostExpr& a, const CostExpr& b) {
  CostExpr out = a;
  for (const auto& [sym, ex] : b.exponents) out.mul(sym, ex);
  return out;
}
}  // namespace detail

/// Dominant cost monomial of a solver applied to the Young-measure LP,
/// reduced to resolution symbols exactly as in the comparison tables.
inline CostExpr cost(CostMethod method, const CostParams& p) {
  const LpShape sh = lp_shape(p);
  CostExpr out;
  switch (method) {
    case CostMethod::IPM:
      // sqrt(s) (nnz + s^2), dominated by s^{2.5}
      out = detail::pow(sh.s, Fraction(5, 2));
      out.notes = {"log(1/eps) dependence"};
      break;
    case CostMethod::SIPM:
      out = detail::pow(sh.s, Fraction(119, 50));  // s^omega, omega ~ 2.38
      out.notes = {"log(1/eps) dependence"};
      break;
    case CostMethod::QIPM:
      out = detail::pow(sh.s, Fraction(2));
      out.mul(CostSymbol::kappa_newt, dim_const(3));
      out.mul(CostSymbol::inv_delta, dim_const(2));
      out.notes = {"kappa_Newt bound to be determined", "delta is the tomography precision"};
      break;
    case CostMethod::QZSG:
      out = detail::mul(detail::pow(sh.s_M, Fraction(1, 2)), detail::pow(sh.R1, Fraction(7, 2)));
      out.mul(CostSymbol::inv_eps, dim_const(Fraction(7, 2)));
      out.notes = {"assuming inf ||lambda||_1 ~ O~(1)"};
      break;
    case CostMethod::QCP_query:
      // sqrt(r+s) R1 / eps, with r+s dominated by s
      out = detail::mul(detail::pow(sh.s, Fraction(1, 2)), sh.R1);
      out.mul(CostSymbol::inv_eps, dim_const(1));
      break;
    case CostMethod::QCP_gate:
      out = detail::mul(detail::mul(detail::pow(sh.s, Fraction(1, 2)), sh.R1), sh.nnz);
      out.mul(CostSymbol::inv_eps, dim_const(1));
      break;
    case CostMethod::QSDP:
      out = detail::mul(detail::mul(sh.r, detail::pow(sh.R1, Fraction(2))), sh.s);
      out.mul(CostSymbol::inv_eps, dim_const(2));
      out.notes = {"outputs the density matrix rho_F, preparation cost not included"};
      break;
    case CostMethod::direct_classical:
      out.mul(CostSymbol::N_t, dim_const(1)).mul(CostSymbol::N_x, dim_d());
      out.notes = {"x n (number of equations)"};
      break;
    case CostMethod::direct_collocation:
      if (!p.random)
        throw std::invalid_argument("cost: direct_collocation applies to random problems");
      out.mul(CostSymbol::N_t, dim_const(1)).mul(CostSymbol::N_x, dim_d());
      out.mul(CostSymbol::N_omega, dim_m());
      out.notes = {"x n (number of equations)"};
      break;
  }
  return out;
}

/// Evaluation point for numeric cost comparison; missing required values
/// raise a config error.
inline double evaluate_cost(const CostExpr& e, const CostParams& p) {
  double prod = 1.0;
  auto need = [&](const std::optional<double>& v, const char* what) {
    if (!v) throw std::invalid_argument(std::string("evaluate_cost: missing parameter ") + what);
    return *v;
  };
  for (const auto& [sym, ex] : e.exponents) {
    const double expo = ex.at(p.d, p.n, p.m).value();
    double base = 1.0;
    switch (sym) {
      case CostSymbol::N_t: base = need(p.N_t, "N_t"); break;
      case CostSymbol::N_x: base = need(p.N_x, "N_x"); break;
      case CostSymbol::N_xi: base = need(p.N_xi, "N_xi"); break;
      case CostSymbol::N_omega: base = need(p.N_omega, "N_omega"); break;
      case CostSymbol::inv_eps: base = 1.0 / need(p.epsilon, "epsilon"); break;
      case CostSymbol::inv_delta: base = 1.0 / need(p.delta, "delta"); break;
      case CostSymbol::kappa_newt: base = need(p.kappa_newt, "kappa_newt"); break;
    }
    prod *= std::pow(base, expo);
  }
  return prod;
}

/// Total N-exponent of a cost under N = N_t = N_x = N_xi = N_omega = 1/eps.
/// kappa and 1/delta do not scale with N and are reported separately.
inline DimExpr n_exponent(const CostExpr& e) {
  DimExpr total;
  for (const auto& [sym, ex] : e.exponents) {
    if (sym == CostSymbol::kappa_newt || sym == CostSymbol::inv_delta) continue;
    total = total + ex;
  }
  return total;
}

struct AdvantageReport {
  DimExpr exponent_a, exponent_b;
  DimExpr difference;  // exponent_b - exponent_a: positive means a wins
  std::string crossover;  // inequality on m when the difference depends on m
};

/// Symbolic comparison of two costs under the common-resolution scaling.
inline AdvantageReport advantage(CostMethod a, CostMethod b, const CostParams& p) {
  AdvantageReport rep;
  rep.exponent_a = n_exponent(cost(a, p));
  rep.exponent_b = n_exponent(cost(b, p));
  rep.difference = rep.exponent_b - rep.exponent_a;
  if (!rep.difference.cm.is_zero()) {
    // difference > 0  <=>  m {>,<} (threshold linear in d, n)
    const Fraction cm = rep.difference.cm;
    DimExpr threshold{-(rep.difference.c0) / cm, -(rep.difference.cd) / cm,
                      -(rep.difference.cn) / cm, Fraction(0)};
    rep.crossover = std::string("m ") + (Fraction(0) < cm ? ">" : "<") + " " + threshold.str();
  }
  return rep;
}

}  // namespace ymlp
