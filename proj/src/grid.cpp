#include "ahls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ahls/specfun.hpp"

namespace ahls::grid {

namespace {

// 8-point Gauss-Legendre on [-1, 1]
constexpr int gl_count = 8;
constexpr double gl_x[gl_count] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double gl_w[gl_count] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }
double x2logx(double v) { return v > 0.0 ? v * v * std::log(v) : 0.0; }

// int_seg w(f(r)) r^{n-1} dr over the piecewise-linear profile
double profile_integral(const RadialProfile& f,
                        const std::function<double(double)>& w) {
  const int n = f.n;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < f.radii.size(); ++s) {
    const double a = f.radii[s], b = f.radii[s + 1];
    if (b <= a) continue;
    const double va = f.values[s], vb = f.values[s + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < gl_count; ++q) {
      const double r = mid + half * gl_x[q];
      const double fr = va + (vb - va) * (r - a) / (b - a);
      acc += gl_w[q] * w(fr) * std::pow(r, n - 1);
    }
    total += half * acc;
  }
  return total;
}

} // namespace

// ---- small linear algebra ----------------------------------------------------

Mat identity() {
  return Mat{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
}

Mat diag(double a, double b, double c) {
  return Mat{{{a, 0.0, 0.0}, {0.0, b, 0.0}, {0.0, 0.0, c}}};
}

Mat rotation2d(double t) {
  Mat r = identity();
  r[0][0] = std::cos(t);
  r[0][1] = -std::sin(t);
  r[1][0] = std::sin(t);
  r[1][1] = std::cos(t);
  return r;
}

double det(const Mat& m, int n) {
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat inverse(const Mat& m, int n) {
  const double d = det(m, n);
  if (std::fabs(d) < 1e-300)
    throw std::invalid_argument("inverse: singular matrix");
  Mat r = identity();
  if (n == 1) {
    r[0][0] = 1.0 / d;
  } else if (n == 2) {
    r[0][0] = m[1][1] / d;
    r[0][1] = -m[0][1] / d;
    r[1][0] = -m[1][0] / d;
    r[1][1] = m[0][0] / d;
  } else {
    r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / d;
    r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / d;
    r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / d;
    r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / d;
    r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / d;
    r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / d;
    r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / d;
    r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / d;
    r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / d;
  }
  return r;
}

Vec apply(const Mat& m, const Vec& v, int n) {
  Vec out{0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i] += m[i][j] * v[j];
  return out;
}

// ---- GridFunction -------------------------------------------------------------

double GridFunction::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < n; ++i) v *= spacing();
  return v;
}

std::size_t GridFunction::index(int i, int j, int k) const {
  std::size_t idx = std::size_t(i);
  if (n >= 2) idx = idx * m + j;
  if (n >= 3) idx = idx * m + k;
  return idx;
}

Vec GridFunction::cell_center(std::size_t flat) const {
  Vec x{0.0, 0.0, 0.0};
  if (n == 1) {
    x[0] = coord(int(flat));
  } else if (n == 2) {
    x[0] = coord(int(flat / m));
    x[1] = coord(int(flat % m));
  } else {
    x[0] = coord(int(flat / (std::size_t(m) * m)));
    x[1] = coord(int((flat / m) % m));
    x[2] = coord(int(flat % m));
  }
  return x;
}

double GridFunction::eval(const Vec& x) const {
  const double h = spacing();
  // fractional cell coordinates; cell centers sit at s + 0.5
  double fc[3] = {0.0, 0.0, 0.0};
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int d = 0; d < n; ++d) {
    fc[d] = (x[d] + half_width) / h - 0.5;
    base[d] = int(std::floor(fc[d]));
    frac[d] = fc[d] - base[d];
  }
  auto value_at = [&](int i, int j, int k) -> double {
    if (i < 0 || i >= m) return 0.0;
    if (n >= 2 && (j < 0 || j >= m)) return 0.0;
    if (n >= 3 && (k < 0 || k >= m)) return 0.0;
    return values[index(i, j, k)];
  };
  if (n == 1) {
    return (1.0 - frac[0]) * value_at(base[0], 0, 0) +
           frac[0] * value_at(base[0] + 1, 0, 0);
  }
  if (n == 2) {
    double out = 0.0;
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b)
        out += (a ? frac[0] : 1.0 - frac[0]) * (b ? frac[1] : 1.0 - frac[1]) *
               value_at(base[0] + a, base[1] + b, 0);
    return out;
  }
  double out = 0.0;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      for (int c = 0; c <= 1; ++c)
        out += (a ? frac[0] : 1.0 - frac[0]) * (b ? frac[1] : 1.0 - frac[1]) *
               (c ? frac[2] : 1.0 - frac[2]) *
               value_at(base[0] + a, base[1] + b, base[2] + c);
  return out;
}

double GridFunction::integral() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * cell_volume();
}

double GridFunction::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

void GridFunction::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("GridFunction: n in {1,2,3}");
  if (m < 2) throw std::invalid_argument("GridFunction: m >= 2");
  std::size_t expect = 1;
  for (int i = 0; i < n; ++i) expect *= std::size_t(m);
  if (values.size() != expect)
    throw std::invalid_argument("GridFunction: value count mismatch");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("GridFunction: negative or non-finite value");
}

GridFunction GridFunction::sample(int n, double half_width, int m,
                                  const std::function<double(const Vec&)>& fn) {
  GridFunction f;
  f.n = n;
  f.half_width = half_width;
  f.m = m;
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= std::size_t(m);
  f.values.resize(count);
  for (std::size_t c = 0; c < count; ++c) f.values[c] = fn(f.cell_center(c));
  f.validate();
  return f;
}

// ---- RadialProfile -------------------------------------------------------------

double RadialProfile::eval(double r) const {
  if (r < 0.0) r = -r;
  if (r >= radii.back()) {
    if (tail.kind == RadialTail::Kind::Zero) return 0.0;
    return values.back() * std::pow(r / radii.back(), -tail.exponent);
  }
  auto it = std::upper_bound(radii.begin(), radii.end(), r);
  std::size_t hi = std::size_t(it - radii.begin());
  if (hi == 0) return values.front();
  const double a = radii[hi - 1], b = radii[hi];
  const double t = (r - a) / (b - a);
  return values[hi - 1] * (1.0 - t) + values[hi] * t;
}

void RadialProfile::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("RadialProfile: n in {1,2,3}");
  if (radii.size() < 2 || radii.size() != values.size())
    throw std::invalid_argument("RadialProfile: node count mismatch");
  if (radii.front() != 0.0)
    throw std::invalid_argument("RadialProfile: radii must start at 0");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1])
      throw std::invalid_argument("RadialProfile: radii must increase");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("RadialProfile: bad value");
}

RadialProfile RadialProfile::sample(int n,
                                    const std::function<double(double)>& fn,
                                    double core_radius, double outer_radius,
                                    int core_count, int outer_count,
                                    RadialTail tail) {
  RadialProfile f;
  f.n = n;
  f.tail = tail;
  f.radii.reserve(std::size_t(core_count + outer_count) + 1);
  for (int i = 0; i <= core_count; ++i)
    f.radii.push_back(core_radius * double(i) / core_count);
  if (outer_radius > core_radius && outer_count > 0) {
    const double ratio =
        std::pow(outer_radius / core_radius, 1.0 / outer_count);
    double r = core_radius;
    for (int i = 1; i <= outer_count; ++i) {
      r *= ratio;
      f.radii.push_back(r);
    }
  }
  f.values.reserve(f.radii.size());
  for (double r : f.radii) f.values.push_back(fn(r));
  f.validate();
  return f;
}

// ---- norms, entropies -----------------------------------------------------------

double lp_norm(const GridFunction& f, double p) {
  if (p < 1.0) throw std::domain_error("lp_norm: p >= 1 required");
  double s = 0.0;
  for (double v : f.values) s += std::pow(v, p);
  return std::pow(s * f.cell_volume(), 1.0 / p);
}

namespace {

// analytic tail of int w(f) r^{n-1} dr for f = c (r/rk)^{-q} beyond rk;
// `power` is the power of f inside w, `with_log` adds the log f factor.
double power_tail(const RadialProfile& f, double power, bool with_log) {
  if (f.tail.kind == RadialTail::Kind::Zero) return 0.0;
  const double q = f.tail.exponent;
  const double rk = f.r_max();
  const double c = f.values.back();
  if (c <= 0.0) return 0.0;
  const double s = power * q - f.n; // decay exponent beyond rk
  if (s <= 0.0)
    throw std::domain_error("RadialProfile: non-integrable power-law tail");
  const double cp = std::pow(c, power);
  const double rn = std::pow(rk, double(f.n));
  if (!with_log) return cp * rn / s;
  // int_1^inf u^{-s-1+...}: c^p rk^n [ log c / s - q / s^2 ]
  return cp * rn * (std::log(c) / s - q / (s * s));
}

} // namespace

double lp_norm(const RadialProfile& f, double p) {
  if (p < 1.0) throw std::domain_error("lp_norm: p >= 1 required");
  const double body =
      profile_integral(f, [p](double v) { return std::pow(v, p); });
  const double tail = power_tail(f, p, false);
  return std::pow(specfun::sphere_surface_area(f.n) * (body + tail), 1.0 / p);
}

double entropy_l1(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values) s += xlogx(v);
  return s * f.cell_volume();
}

double entropy_l1(const RadialProfile& f) {
  const double body = profile_integral(f, xlogx);
  const double tail = power_tail(f, 1.0, true);
  return specfun::sphere_surface_area(f.n) * (body + tail);
}

double entropy_l2(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values) s += x2logx(v);
  return s * f.cell_volume();
}

double entropy_l2(const RadialProfile& f) {
  const double body = profile_integral(f, x2logx);
  const double tail = power_tail(f, 2.0, true);
  return specfun::sphere_surface_area(f.n) * (body + tail);
}

// ---- symmetrization ---------------------------------------------------------------

RadialProfile schwarz_symmetrize(const GridFunction& f) {
  f.validate();
  const std::size_t count = f.values.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  // largest value first; ties broken by cell index via stable sort
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return f.values[a] > f.values[b];
  });

  const double cell = f.cell_volume();
  const double wn = specfun::unit_ball_volume(f.n);
  RadialProfile out;
  out.n = f.n;
  out.tail.kind = RadialTail::Kind::Zero;
  out.radii.reserve(count + 2);
  out.values.reserve(count + 2);
  out.radii.push_back(0.0);
  out.values.push_back(f.values[order[0]]);
  for (std::size_t j = 0; j < count; ++j) {
    const double ball = (double(j) + 0.5) * cell;
    out.radii.push_back(std::pow(ball / wn, 1.0 / f.n));
    out.values.push_back(f.values[order[j]]);
  }
  out.radii.push_back(std::pow((double(count) + 0.5) * cell / wn, 1.0 / f.n));
  out.values.push_back(0.0);
  out.validate();
  return out;
}

GridFunction rasterize(const RadialProfile& f, double half_width, int m) {
  return GridFunction::sample(f.n, half_width, m, [&](const Vec& x) {
    return f.eval(
        std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  });
}

// ---- extremizers -----------------------------------------------------------------

double ExtremizerSpec::exponent() const {
  switch (family) {
    case ExtremizerFamily::Hls: return 0.5 * (n + alpha);
    case ExtremizerFamily::LogHls: return double(n);
    case ExtremizerFamily::LogSobolev: return 0.5 * n;
  }
  return double(n);
}

GridFunction make_extremizer(const ExtremizerSpec& spec, double half_width,
                             int m) {
  if (std::fabs(det(spec.phi, spec.n)) < 1e-300)
    throw std::invalid_argument("make_extremizer: singular phi");
  const double p = spec.exponent();
  GridFunction f = GridFunction::sample(
      spec.n, half_width, m, [&](const Vec& x) {
        Vec y{0.0, 0.0, 0.0};
        for (int d = 0; d < spec.n; ++d) y[d] = x[d] - spec.x0[d];
        const Vec z = apply(spec.phi, y, spec.n);
        const double r2 = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
        return std::pow(1.0 + r2, -p);
      });
  const double norm =
      lp_norm(f, spec.target == NormTarget::L1 ? 1.0 : 2.0);
  for (double& v : f.values) v /= norm;
  return f;
}

RadialProfile make_extremizer_profile(const ExtremizerSpec& spec,
                                      double outer_radius, int core_count,
                                      int outer_count) {
  // requires an isotropic phi = lambda I and centered x0
  const double lambda = spec.phi[0][0];
  for (int i = 0; i < spec.n; ++i) {
    if (spec.x0[i] != 0.0)
      throw std::invalid_argument("make_extremizer_profile: x0 must be 0");
    for (int j = 0; j < spec.n; ++j) {
      const double expect = i == j ? lambda : 0.0;
      if (spec.phi[i][j] != expect)
        throw std::invalid_argument(
            "make_extremizer_profile: phi must be lambda * I");
    }
  }
  if (lambda <= 0.0)
    throw std::invalid_argument("make_extremizer_profile: lambda > 0 required");
  const double p = spec.exponent();
  RadialTail tail{RadialTail::Kind::PowerLaw, 2.0 * p};
  RadialProfile f = RadialProfile::sample(
      spec.n,
      [&](double r) {
        const double s = lambda * r;
        return std::pow(1.0 + s * s, -p);
      },
      2.0 / lambda, outer_radius, core_count, outer_count, tail);
  const double norm =
      lp_norm(f, spec.target == NormTarget::L1 ? 1.0 : 2.0);
  for (double& v : f.values) v /= norm;
  return f;
}

// ---- affine images -----------------------------------------------------------------

AffineResult apply_affine(const GridFunction& f, const Mat& phi,
                          const Vec& x0) {
  return apply_affine(f, phi, x0, f.half_width, f.m);
}

AffineResult apply_affine(const GridFunction& f, const Mat& phi, const Vec& x0,
                          double out_half_width, int out_m) {
  const Mat inv = inverse(phi, f.n);
  AffineResult res;
  res.f = GridFunction::sample(f.n, out_half_width, out_m, [&](const Vec& x) {
    Vec y = apply(inv, x, f.n);
    for (int d = 0; d < f.n; ++d) y[d] -= x0[d];
    return f.eval(y);
  });
  const double expected = std::fabs(det(phi, f.n)) * f.integral();
  res.mass_ratio = expected > 0.0 ? res.f.integral() / expected : 1.0;
  res.mass_leak_warning = std::fabs(1.0 - res.mass_ratio) > 0.01;
  return res;
}

// ---- serialization -----------------------------------------------------------------

namespace {
constexpr char magic[8] = {'A', 'H', 'L', 'S', 'G', 'R', 'I', 'D'};
}

void save_binary(const GridFunction& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_binary: cannot open " + path);
  out.write(magic, 8);
  const std::int32_t n = f.n, m = f.m;
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&f.half_width), 8);
  out.write(reinterpret_cast<const char*>(&m), 4);
  out.write(reinterpret_cast<const char*>(f.values.data()),
            std::streamsize(f.values.size() * 8));
  if (!out) throw std::runtime_error("save_binary: write failed: " + path);
}

GridFunction load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_binary: cannot open " + path);
  char head[8];
  in.read(head, 8);
  if (!in || std::memcmp(head, magic, 8) != 0)
    throw std::runtime_error("load_binary: bad header in " + path);
  std::int32_t n = 0, m = 0;
  GridFunction f;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&f.half_width), 8);
  in.read(reinterpret_cast<char*>(&m), 4);
  if (!in || n < 1 || n > 3 || m < 2)
    throw std::runtime_error("load_binary: bad dimensions in " + path);
  f.n = n;
  f.m = m;
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) count *= std::size_t(m);
  f.values.resize(count);
  in.read(reinterpret_cast<char*>(f.values.data()), std::streamsize(count * 8));
  if (!in) throw std::runtime_error("load_binary: truncated payload in " + path);
  f.validate();
  return f;
}

void save_csv(const GridFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_csv: cannot open " + path);
  const char* headers[] = {"x,value\n", "x,y,value\n", "x,y,z,value\n"};
  out << headers[f.n - 1];
  char line[160];
  for (std::size_t c = 0; c < f.values.size(); ++c) {
    const Vec x = f.cell_center(c);
    int len = 0;
    for (int d = 0; d < f.n; ++d)
      len += std::snprintf(line + len, sizeof(line) - len, "%.17g,", x[d]);
    std::snprintf(line + len, sizeof(line) - len, "%.17g\n", f.values[c]);
    out << line;
  }
}

} // namespace ahls::grid
