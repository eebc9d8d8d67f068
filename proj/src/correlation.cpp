#include "ahls/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ahls/parallel.hpp"
#include "ahls/specfun.hpp"

namespace ahls::corr {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// 2-point Gauss-Legendre, exact through cubics; panels are chosen so the
// piecewise-linear integrands are quadratic on each panel.
constexpr double gl2_x[2] = {-0.5773502691896258, 0.5773502691896258};

// 8-point Gauss-Legendre for the angular quadratures.
constexpr int gl8 = 8;
constexpr double gl8_x[gl8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double gl8_w[gl8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

void check_direction(const grid::Vec& u, int n) {
  double norm2 = 0.0;
  for (int d = 0; d < n; ++d) norm2 += u[d] * u[d];
  if (std::fabs(norm2 - 1.0) > 1e-12)
    throw std::invalid_argument("correlation: direction must be unit length");
}

void check_t_grid(const std::vector<double>& t) {
  if (t.empty() || t[0] != 0.0)
    throw std::invalid_argument("correlation: t_grid must start at 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] <= t[i - 1])
      throw std::invalid_argument("correlation: t_grid must increase");
}

// integer lattice shift when t*u is a whole number of cells along one axis
bool aligned_shift(const grid::GridFunction& f, const grid::Vec& u, double t,
                   int shift[3]) {
  const double h = f.spacing();
  for (int d = 0; d < f.n; ++d) {
    const double steps = t * u[d] / h;
    const double rounded = std::round(steps);
    if (std::fabs(steps - rounded) > 1e-9) return false;
    shift[d] = int(rounded);
  }
  return true;
}

double grid_g_aligned(const grid::GridFunction& f, const int shift[3]) {
  const int m = f.m;
  double acc = 0.0;
  if (f.n == 1) {
    for (int i = 0; i < m; ++i) {
      const int j = i + shift[0];
      if (j < 0 || j >= m) continue;
      acc += f.values[std::size_t(i)] * f.values[std::size_t(j)];
    }
  } else if (f.n == 2) {
    for (int i = 0; i < m; ++i) {
      const int i2 = i + shift[0];
      if (i2 < 0 || i2 >= m) continue;
      for (int j = 0; j < m; ++j) {
        const int j2 = j + shift[1];
        if (j2 < 0 || j2 >= m) continue;
        acc += f.values[f.index(i, j)] * f.values[f.index(i2, j2)];
      }
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const int i2 = i + shift[0];
      if (i2 < 0 || i2 >= m) continue;
      for (int j = 0; j < m; ++j) {
        const int j2 = j + shift[1];
        if (j2 < 0 || j2 >= m) continue;
        for (int k = 0; k < m; ++k) {
          const int k2 = k + shift[2];
          if (k2 < 0 || k2 >= m) continue;
          acc += f.values[f.index(i, j, k)] * f.values[f.index(i2, j2, k2)];
        }
      }
    }
  }
  return acc * f.cell_volume();
}

double grid_g_interp(const grid::GridFunction& f, const grid::Vec& u,
                     double t) {
  double acc = 0.0;
  grid::Vec shift{t * u[0], t * u[1], t * u[2]};
  for (std::size_t c = 0; c < f.values.size(); ++c) {
    const double fc = f.values[c];
    if (fc == 0.0) continue;
    grid::Vec x = f.cell_center(c);
    for (int d = 0; d < f.n; ++d) x[d] += shift[d];
    acc += fc * f.eval(x);
  }
  return acc * f.cell_volume();
}

double grid_d_aligned(const grid::GridFunction& f, const int shift[3]) {
  // sum over the union of the box and the shifted-back box; values outside
  // the box are zero
  const int m = f.m;
  auto value_at = [&](int i, int j, int k) -> double {
    if (i < 0 || i >= m) return 0.0;
    if (f.n >= 2 && (j < 0 || j >= m)) return 0.0;
    if (f.n >= 3 && (k < 0 || k >= m)) return 0.0;
    return f.values[f.index(i, j, k)];
  };
  int lo[3] = {0, 0, 0}, hi[3] = {m, 1, 1};
  for (int d = 0; d < f.n; ++d) {
    lo[d] = std::min(0, -shift[d]);
    hi[d] = std::max(m, m - shift[d]);
  }
  double acc = 0.0;
  for (int i = lo[0]; i < hi[0]; ++i)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int k = lo[2]; k < hi[2]; ++k) {
        const double a = value_at(i, j, k);
        const double b = value_at(i + shift[0], j + (f.n >= 2 ? shift[1] : 0),
                                  k + (f.n >= 3 ? shift[2] : 0));
        const double diff = b - a;
        acc += diff * diff;
      }
  return acc * f.cell_volume();
}

double grid_d_interp(const grid::GridFunction& f, const grid::Vec& u,
                     double t) {
  const double h = f.spacing();
  const int m = f.m;
  int lo[3] = {0, 0, 0}, hi[3] = {m, 1, 1};
  for (int d = 0; d < f.n; ++d) {
    const int pad = int(std::ceil(std::fabs(t * u[d]) / h)) + 1;
    lo[d] = t * u[d] > 0.0 ? -pad : 0;
    hi[d] = t * u[d] > 0.0 ? m : m + pad;
    // the shifted evaluation point is x + t u, so cells below the box matter
    // when the shift is positive
  }
  for (int d = f.n; d < 3; ++d) {
    lo[d] = 0;
    hi[d] = 1;
  }
  double acc = 0.0;
  grid::Vec shift{t * u[0], t * u[1], t * u[2]};
  for (int i = lo[0]; i < hi[0]; ++i)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int k = lo[2]; k < hi[2]; ++k) {
        const bool inside = i >= 0 && i < m && (f.n < 2 || (j >= 0 && j < m)) &&
                            (f.n < 3 || (k >= 0 && k < m));
        const double a = inside ? f.values[f.index(i, j, k)] : 0.0;
        grid::Vec x{
            -f.half_width + (i + 0.5) * h,
            f.n >= 2 ? -f.half_width + (j + 0.5) * h : 0.0,
            f.n >= 3 ? -f.half_width + (k + 0.5) * h : 0.0};
        for (int d = 0; d < f.n; ++d) x[d] += shift[d];
        const double b = f.eval(x);
        const double diff = b - a;
        acc += diff * diff;
      }
  return acc * f.cell_volume();
}

// ---- radial paths ------------------------------------------------------------

// 1-D: integrate f(|x|) f(|x - t|) exactly on the piecewise-linear profile by
// splitting at every breakpoint of either factor.
double radial_g_1d(const grid::RadialProfile& f, double t) {
  const double L = f.r_max();
  const double lo = std::max(-L, t - L);
  const double hi = std::min(L, t + L);
  if (hi <= lo) return 0.0;
  std::vector<double> cuts;
  cuts.reserve(4 * f.radii.size() + 2);
  cuts.push_back(lo);
  cuts.push_back(hi);
  for (double r : f.radii) {
    for (double c : {r, -r, t + r, t - r})
      if (c > lo && c < hi) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (b - a < 1e-15) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double panel = 0.0;
    for (double q : gl2_x) {
      const double x = mid + half * q;
      panel += f.eval(std::fabs(x)) * f.eval(std::fabs(x - t));
    }
    acc += panel * half; // 2-pt GL weights are 1
  }
  return acc;
}

// radii where the profile jumps by a sizable fraction of its range; panel
// edges are aligned with them so Gauss panels never straddle a jump
std::vector<double> kink_radii(const grid::RadialProfile& f) {
  double vmax = 0.0;
  for (double v : f.values) vmax = std::max(vmax, v);
  std::vector<double> kinks;
  for (std::size_t j = 0; j + 1 < f.values.size(); ++j) {
    if (std::fabs(f.values[j + 1] - f.values[j]) > 0.2 * vmax) {
      kinks.push_back(f.radii[j]);
      kinks.push_back(f.radii[j + 1]);
    }
  }
  return kinks;
}

// n = 2: g(t) = int_0^inf f(r) r A(r,t) dr with the angular average
// A(r,t) = 2 int_0^pi f(sqrt(r^2 + t^2 - 2 r t cos th)) dth.
double radial_angular_avg_2d(const grid::RadialProfile& f, double r, double t,
                             int panels, const std::vector<double>& kinks) {
  std::vector<double> edges;
  edges.reserve(std::size_t(panels) + kinks.size() + 1);
  for (int p = 0; p <= panels; ++p)
    edges.push_back(specfun::pi * double(p) / panels);
  // w(th) = sqrt(r^2 + t^2 - 2 r t cos th) is increasing; split where it
  // crosses a jump radius of the profile
  if (r > 0.0 && t > 0.0) {
    for (double rk : kinks) {
      const double c = (r * r + t * t - rk * rk) / (2.0 * r * t);
      if (c > -1.0 && c < 1.0) edges.push_back(std::acos(c));
    }
    std::sort(edges.begin(), edges.end());
  }
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    if (b - a < 1e-14) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double panel = 0.0;
    for (int q = 0; q < gl8; ++q) {
      const double th = mid + half * gl8_x[q];
      const double w2 = r * r + t * t - 2.0 * r * t * std::cos(th);
      panel += gl8_w[q] * f.eval(std::sqrt(std::max(w2, 0.0)));
    }
    acc += panel * half;
  }
  return 2.0 * acc;
}

// quadrature abscissas in r for the radial outer integral: uniform core then
// geometric panels out to the profile end, with edges at profile jumps
std::vector<std::pair<double, double>> radial_outer_nodes(
    const grid::RadialProfile& f) {
  std::vector<std::pair<double, double>> nodes; // (r, weight)
  const double rmax = f.r_max();
  const double core = std::min(rmax, std::max(f.radii[1] * 64.0, rmax * 1e-3));
  const int core_panels = 96;
  const int geo_panels = 160;
  std::vector<double> edges;
  edges.reserve(core_panels + geo_panels + 8);
  for (int i = 0; i <= core_panels; ++i)
    edges.push_back(core * double(i) / core_panels);
  if (rmax > core) {
    const double ratio = std::pow(rmax / core, 1.0 / geo_panels);
    double r = core;
    for (int i = 1; i <= geo_panels; ++i) {
      r *= ratio;
      edges.push_back(std::min(r, rmax));
    }
  }
  for (double rk : kink_radii(f))
    if (rk > 0.0 && rk < rmax) edges.push_back(rk);
  std::sort(edges.begin(), edges.end());
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s], b = edges[s + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < gl8; ++q)
      nodes.emplace_back(mid + half * gl8_x[q], half * gl8_w[q]);
  }
  return nodes;
}

double radial_g_2d(const grid::RadialProfile& f, double t,
                   const std::vector<std::pair<double, double>>& rnodes,
                   const std::vector<double>& kinks) {
  double acc = 0.0;
  for (const auto& [r, w] : rnodes) {
    const double fr = f.eval(r);
    if (fr == 0.0) continue;
    acc += w * fr * r * radial_angular_avg_2d(f, r, t, 24, kinks);
  }
  return acc;
}

// n = 3: the angular average has a closed form through the cumulative first
// moment M1(r) = int_0^r f(w) w dw of the piecewise-linear profile.
struct CumulativeMoment {
  std::vector<double> at_node; // M1 at profile radii
  const grid::RadialProfile* f;

  explicit CumulativeMoment(const grid::RadialProfile& prof) : f(&prof) {
    at_node.resize(prof.radii.size(), 0.0);
    for (std::size_t s = 0; s + 1 < prof.radii.size(); ++s) {
      const double a = prof.radii[s], b = prof.radii[s + 1];
      const double va = prof.values[s], vb = prof.values[s + 1];
      // int_a^b (va + (vb-va)(w-a)/(b-a)) w dw
      const double slope = (vb - va) / (b - a);
      const double c0 = va - slope * a;
      const double seg = c0 * 0.5 * (b * b - a * a) +
                         slope * (b * b * b - a * a * a) / 3.0;
      at_node[s + 1] = at_node[s] + seg;
    }
  }

  double operator()(double r) const {
    if (r <= 0.0) return 0.0;
    const auto& radii = f->radii;
    if (r >= radii.back()) return at_node.back();
    auto it = std::upper_bound(radii.begin(), radii.end(), r);
    std::size_t hi = std::size_t(it - radii.begin());
    const double a = radii[hi - 1], b = radii[hi];
    const double va = f->values[hi - 1], vb = f->values[hi];
    const double slope = (vb - va) / (b - a);
    const double c0 = va - slope * a;
    const double seg =
        c0 * 0.5 * (r * r - a * a) + slope * (r * r * r - a * a * a) / 3.0;
    return at_node[hi - 1] + seg;
  }
};

double radial_g_3d(const grid::RadialProfile& f, double t,
                   const CumulativeMoment& m1,
                   const std::vector<std::pair<double, double>>& rnodes) {
  double acc = 0.0;
  for (const auto& [r, w] : rnodes) {
    const double fr = f.eval(r);
    if (fr == 0.0) continue;
    // t = 0 limit of the shell average is 4 pi f(r)
    const double avg =
        t == 0.0 ? 4.0 * specfun::pi * fr
                 : 2.0 * specfun::pi / (r * t) *
                       (m1(r + t) - m1(std::fabs(r - t)));
    acc += w * fr * r * r * avg;
  }
  return acc;
}

void fit_tail(DirectionalCorrelation& c) {
  // fit g ~ coeff * t^{-rate} over the last decade of positive values
  const std::size_t count = c.t.size();
  if (count < 8) return;
  std::size_t hi = count - 1;
  while (hi > 0 && c.g[hi] <= 0.0) --hi;
  if (hi < 4 || c.t[hi] <= 0.0) return;
  std::size_t lo = hi;
  while (lo > 1 && c.t[lo - 1] > 0.1 * c.t[hi] && c.g[lo - 1] > 0.0) --lo;
  if (hi - lo < 3) return;
  // least squares on log-log
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double x = std::log(c.t[i]), y = std::log(c.g[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  const double denom = k * sxx - sx * sx;
  if (std::fabs(denom) < 1e-30) return;
  const double slope = (k * sxy - sx * sy) / denom;
  const double inter = (sy - slope * sx) / k;
  c.tail.fitted = true;
  c.tail.rate = -slope;
  c.tail.coeff = std::exp(inter);
}

} // namespace

std::vector<double> default_t_grid(double t_max, double t_min, int log_count,
                                   int linear_count) {
  std::vector<double> t;
  t.push_back(0.0);
  const double log_top = std::min(1.0, t_max);
  if (t_min < log_top) {
    const double ratio = std::log(log_top / t_min) / (log_count - 1);
    for (int i = 0; i < log_count; ++i)
      t.push_back(t_min * std::exp(ratio * i));
  }
  if (t_max > 1.0) {
    const double lin_top = std::min(8.0, t_max);
    for (int i = 1; i <= linear_count; ++i)
      t.push_back(1.0 + (lin_top - 1.0) * double(i) / linear_count);
    if (t_max > lin_top) {
      const int extra = 96;
      const double ratio = std::log(t_max / lin_top) / extra;
      for (int i = 1; i <= extra; ++i)
        t.push_back(lin_top * std::exp(ratio * i));
    }
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::vector<double> aligned_t_grid(double h, double t_max) {
  std::vector<double> t;
  const int count = int(std::floor(t_max / h)) + 1;
  t.reserve(std::size_t(count) + 1);
  for (int i = 0; i <= count; ++i) t.push_back(i * h);
  return t;
}

std::vector<double> t_grid_for(const grid::GridFunction& f,
                               const grid::Vec& u) {
  const double diam = 2.0 * f.half_width * std::sqrt(double(f.n));
  // axis-aligned directions snap to the lattice: exact shifts, and kinks of
  // indicator-type data land on grid points
  for (int d = 0; d < f.n; ++d) {
    if (std::fabs(std::fabs(u[d]) - 1.0) < 1e-12)
      return aligned_t_grid(f.spacing(), diam);
  }
  return default_t_grid(diam);
}

std::vector<double> t_grid_for(const grid::RadialProfile& f) {
  const double bound = f.tail.kind == grid::RadialTail::Kind::Zero
                           ? 2.0 * f.r_max()
                           : 0.5 * f.r_max();
  return default_t_grid(bound);
}

DirectionalCorrelation autocorrelation(const grid::GridFunction& f,
                                       const grid::Vec& u,
                                       const std::vector<double>& t_grid) {
  check_direction(u, f.n);
  check_t_grid(t_grid);
  DirectionalCorrelation c;
  c.u = u;
  c.t = t_grid;
  c.g.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    int shift[3] = {0, 0, 0};
    c.g[i] = aligned_shift(f, u, t_grid[i], shift)
                 ? grid_g_aligned(f, shift)
                 : grid_g_interp(f, u, t_grid[i]);
  }
  c.l2sq = c.g[0];
  c.support_bound = 2.0 * f.half_width * std::sqrt(double(f.n));
  return c;
}

DirectionalCorrelation autocorrelation(const grid::RadialProfile& f,
                                       const std::vector<double>& t_grid) {
  check_t_grid(t_grid);
  DirectionalCorrelation c;
  c.u = grid::Vec{1.0, 0.0, 0.0};
  c.t = t_grid;
  c.g.resize(t_grid.size());
  // g(0) comes from the same quadrature as g(t): downstream differences
  // (g(0) - g(t)) then cancel the systematic quadrature bias
  if (f.n == 1) {
    parallel_for(t_grid.size(),
                 [&](std::size_t i) { c.g[i] = radial_g_1d(f, t_grid[i]); });
  } else if (f.n == 2) {
    const auto rnodes = radial_outer_nodes(f);
    const auto kinks = kink_radii(f);
    parallel_for(t_grid.size(), [&](std::size_t i) {
      c.g[i] = radial_g_2d(f, t_grid[i], rnodes, kinks);
    });
  } else {
    const auto rnodes = radial_outer_nodes(f);
    const CumulativeMoment m1(f);
    parallel_for(t_grid.size(), [&](std::size_t i) {
      c.g[i] = radial_g_3d(f, t_grid[i], m1, rnodes);
    });
  }
  c.l2sq = c.g[0];
  c.support_bound =
      f.tail.kind == grid::RadialTail::Kind::Zero ? 2.0 * f.r_max() : inf;
  if (f.tail.kind != grid::RadialTail::Kind::Zero) fit_tail(c);
  return c;
}

DifferenceCurve difference_correlation(const grid::GridFunction& f,
                                       const grid::Vec& u,
                                       const std::vector<double>& t_grid) {
  check_direction(u, f.n);
  check_t_grid(t_grid);
  DifferenceCurve d;
  d.u = u;
  d.t = t_grid;
  d.d_direct.resize(t_grid.size());
  d.d_from_g.resize(t_grid.size());
  const auto c = autocorrelation(f, u, t_grid);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    int shift[3] = {0, 0, 0};
    d.d_direct[i] = aligned_shift(f, u, t_grid[i], shift)
                        ? grid_d_aligned(f, shift)
                        : grid_d_interp(f, u, t_grid[i]);
    d.d_from_g[i] = std::max(0.0, 2.0 * (c.l2sq - c.g[i]));
  }
  d.l2sq = c.l2sq;
  d.support_bound = c.support_bound;
  return d;
}

DifferenceCurve difference_correlation(const grid::RadialProfile& f,
                                       const std::vector<double>& t_grid) {
  const auto c = autocorrelation(f, t_grid);
  DifferenceCurve d;
  d.u = c.u;
  d.t = t_grid;
  d.d_direct.resize(t_grid.size());
  d.d_from_g.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double v = std::max(0.0, 2.0 * (c.l2sq - c.g[i]));
    d.d_direct[i] = v; // profiles have no independent direct path
    d.d_from_g[i] = v;
  }
  d.l2sq = c.l2sq;
  d.support_bound = c.support_bound;
  return d;
}

void write_csv(const DirectionalCorrelation& g, const DifferenceCurve* d,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << (d ? "t,g,d\n" : "t,g\n");
  char line[120];
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    if (d)
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", g.t[i], g.g[i],
                    d->d_direct[i]);
    else
      std::snprintf(line, sizeof(line), "%.17g,%.17g\n", g.t[i], g.g[i]);
    out << line;
  }
}

} // namespace ahls::corr
