#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ymlp/model.hpp"

namespace ymlp {

enum class Bc { periodic, outflow };

inline std::string to_string(Bc bc) { return bc == Bc::periodic ? "periodic" : "outflow"; }

/// Row-major flatten of a multi-index over `dims` (first index outermost).
inline long flatten_multi(std::span<const int> idx, std::span<const int> dims) {
  long flat = 0;
  for (size_t ax = 0; ax < dims.size(); ++ax) {
    if (idx[ax] < 0 || idx[ax] >= dims[ax]) throw std::out_of_range("flatten_multi: index out of range");
    flat = flat * dims[ax] + idx[ax];
  }
  return flat;
}

inline void unflatten_multi(long flat, std::span<const int> dims, std::span<int> idx) {
  for (int ax = static_cast<int>(dims.size()) - 1; ax >= 0; --ax) {
    idx[ax] = static_cast<int>(flat % dims[ax]);
    flat /= dims[ax];
  }
}

/// Uniform time/space/phase discretization geometry.
///
/// Index ordering contract for flattened fields: time level j outermost,
/// then the spatial multi-index k (first axis outermost), then -- when a
/// random axis exists -- the collocation index q, then the phase
/// multi-index l (first component outermost).
struct GridSpec {
  double T = 1.0;
  int nt = 1;
  std::vector<double> x_lower, x_upper;  // size d
  std::vector<int> nx;                   // size d
  PhaseBox phase;
  Bc bc = Bc::periodic;

  int d() const { return static_cast<int>(nx.size()); }
  int n() const { return phase.dim(); }
  double dt() const { return T / nt; }
  double hx(int axis) const { return (x_upper[axis] - x_lower[axis]) / nx[axis]; }
  double hxi(int comp) const { return phase.spacing(comp); }

  long space_cells() const {
    long s = 1;
    for (int c : nx) s *= c;
    return s;
  }
  long phase_cells() const { return phase.cell_count(); }
  /// variables per time level (deterministic problem)
  long step_size() const { return space_cells() * phase_cells(); }

  void validate() const {
    if (!(T > 0) || nt < 1) throw std::invalid_argument("GridSpec: need T > 0 and nt >= 1");
    if (x_lower.size() != x_upper.size() || x_lower.size() != nx.size() || nx.empty())
      throw std::invalid_argument("GridSpec: inconsistent spatial axes");
    for (size_t ax = 0; ax < nx.size(); ++ax) {
      if (nx[ax] < 1) throw std::invalid_argument("GridSpec: nx must be >= 1");
      if (!(x_lower[ax] < x_upper[ax])) throw std::invalid_argument("GridSpec: empty spatial axis");
    }
    phase.validate();
  }

  double x_center(int axis, int k) const {
    if (k < 0 || k >= nx[axis]) throw std::out_of_range("GridSpec: spatial index out of range");
    return x_lower[axis] + (k + 0.5) * hx(axis);
  }
  double xi_center(int comp, int l) const {
    if (l < 0 || l >= phase.cells[comp]) throw std::out_of_range("GridSpec: phase index out of range");
    return phase.lower[comp] + (l + 0.5) * hxi(comp);
  }
  /// time of level j; step j covers (j*dt, (j+1)*dt]
  double time_of_level(int j) const {
    if (j < 0 || j > nt) throw std::out_of_range("GridSpec: time level out of range");
    return j * dt();
  }

  /// phase cell bounds for flat phase index l
  void phase_cell_bounds(long l, std::span<double> lo, std::span<double> hi) const {
    std::vector<int> li(n());
    unflatten_multi(l, phase.cells, li);
    for (int c = 0; c < n(); ++c) {
      lo[c] = phase.lower[c] + li[c] * hxi(c);
      hi[c] = lo[c] + hxi(c);
    }
  }

  void phase_cell_center(long l, std::span<double> out) const {
    std::vector<int> li(n());
    unflatten_multi(l, phase.cells, li);
    for (int c = 0; c < n(); ++c) out[c] = xi_center(c, li[c]);
  }

  void space_cell_center(long k, std::span<double> out) const {
    std::vector<int> ki(d());
    unflatten_multi(k, nx, ki);
    for (int ax = 0; ax < d(); ++ax) out[ax] = x_center(ax, ki[ax]);
  }

  /// flat index into a (j,k,l) field, deterministic ordering
  long flatten(int j, long k, long l) const {
    if (j < 0 || j > nt || k < 0 || k >= space_cells() || l < 0 || l >= phase_cells())
      throw std::out_of_range("GridSpec::flatten: index out of range");
    return (static_cast<long>(j) * space_cells() + k) * phase_cells() + l;
  }
  /// flat index with a collocation axis q of size n_omega between k and l
  long flatten(int j, long k, long q, long n_omega, long l) const {
    if (q < 0 || q >= n_omega) throw std::out_of_range("GridSpec::flatten: collocation index out of range");
    if (j < 0 || j > nt || k < 0 || k >= space_cells() || l < 0 || l >= phase_cells())
      throw std::out_of_range("GridSpec::flatten: index out of range");
    return ((static_cast<long>(j) * space_cells() + k) * n_omega + q) * phase_cells() + l;
  }
};

/// Discrete Young-measure density over one or more stored time levels.
/// values[(j*K + k)*L + l] is the mass of phase cell l at (level j, cell k);
/// nonnegative, summing to 1 over l for each (j, k).
struct YoungMeasureField {
  GridSpec grid;
  int levels = 0;  // stored time levels
  std::vector<double> values;

  std::span<double> level(int j) {
    const long s = grid.step_size();
    return {values.data() + j * s, static_cast<size_t>(s)};
  }
  std::span<const double> level(int j) const {
    const long s = grid.step_size();
    return {values.data() + j * s, static_cast<size_t>(s)};
  }
};

enum class DiracMode {
  nearest,          // all mass on the phase cell containing the value
  mean_preserving,  // split across the bracketing cells so the mean is exact
};

namespace detail {

/// Per-axis placement: cell indices and weights putting mass at value v.
/// At most two entries; weights sum to 1.
struct AxisPlacement {
  int idx[2];
  double w[2];
  int count;
};

inline AxisPlacement place_on_axis(double v, double lo, double hi, int cells, DiracMode mode) {
  const double h = (hi - lo) / cells;
  // containing cell, ties at internal boundaries resolved to the lower index
  double rel = (v - lo) / h;
  int cell = static_cast<int>(std::floor(rel));
  if (rel == std::floor(rel) && cell > 0) cell -= 1;  // boundary tie -> lower
  cell = std::min(std::max(cell, 0), cells - 1);
  if (mode == DiracMode::nearest) return {{cell, 0}, {1.0, 0.0}, 1};

  const double center = lo + (cell + 0.5) * h;
  int lo_cell, hi_cell;
  if (v >= center) {
    lo_cell = cell;
    hi_cell = cell + 1;
  } else {
    lo_cell = cell - 1;
    hi_cell = cell;
  }
  if (lo_cell < 0 || hi_cell > cells - 1) return {{cell, 0}, {1.0, 0.0}, 1};  // outer half-cell
  const double c_lo = lo + (lo_cell + 0.5) * h;
  const double w_hi = (v - c_lo) / h;
  if (w_hi <= 0.0) return {{lo_cell, 0}, {1.0, 0.0}, 1};
  if (w_hi >= 1.0) return {{hi_cell, 0}, {1.0, 0.0}, 1};
  return {{lo_cell, hi_cell}, {1.0 - w_hi, w_hi}, 2};
}

/// Tensor-product Dirac placement of an n-vector into the phase grid,
/// accumulated into the phase block `f` (size phase_cells) with total `mass`.
inline void scatter_dirac(std::span<const double> value, const GridSpec& grid, DiracMode mode,
                          double mass, std::span<double> f) {
  const int n = grid.n();
  std::vector<AxisPlacement> per_axis(n);
  for (int c = 0; c < n; ++c) {
    if (value[c] < grid.phase.lower[c] || value[c] > grid.phase.upper[c]) {
      std::ostringstream msg;
      msg << "dirac_init: component " << c << " value " << value[c] << " outside phase box ["
          << grid.phase.lower[c] << ", " << grid.phase.upper[c] << "]";
      throw std::invalid_argument(msg.str());
    }
    per_axis[c] = place_on_axis(value[c], grid.phase.lower[c], grid.phase.upper[c],
                                grid.phase.cells[c], mode);
  }
  std::vector<int> pick(n, 0), li(n);
  while (true) {
    double w = mass;
    for (int c = 0; c < n; ++c) {
      w *= per_axis[c].w[pick[c]];
      li[c] = per_axis[c].idx[pick[c]];
    }
    f[flatten_multi(li, grid.phase.cells)] += w;
    int c = n - 1;
    while (c >= 0 && ++pick[c] == per_axis[c].count) pick[c--] = 0;
    if (c < 0) break;
  }
}

}  // namespace detail

/// Initial measure: per spatial cell, a projected Dirac at u0(x_k).
/// Returns the level-0 field of size space_cells * phase_cells.
inline std::vector<double> dirac_init(
    const std::function<void(std::span<const double>, double*)>& u0, const GridSpec& grid,
    DiracMode mode = DiracMode::mean_preserving) {
  const long K = grid.space_cells(), L = grid.phase_cells();
  const int n = grid.n();
  std::vector<double> f(K * L, 0.0);
  std::vector<double> x(grid.d()), v(n);
  for (long k = 0; k < K; ++k) {
    grid.space_cell_center(k, x);
    u0(x, v.data());
    try {
      detail::scatter_dirac(v, grid, mode, 1.0, std::span<double>(f.data() + k * L, L));
    } catch (const std::invalid_argument& e) {
      std::ostringstream msg;
      msg << e.what() << " at spatial cell " << k;
      throw std::invalid_argument(msg.str());
    }
  }
  return f;
}

}  // namespace ymlp
