#include "ahls/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ahls/parallel.hpp"
#include "ahls/specfun.hpp"

namespace ahls::bodies {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void legendre_rule(int count, std::vector<double>& x, std::vector<double>& w) {
  x.resize(count);
  w.resize(count);
  for (int k = 0; k < count; ++k) {
    double xi = std::cos(specfun::pi * (k + 0.75) / (count + 0.5));
    double p0 = 0.0, p1 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      p0 = 1.0;
      p1 = xi;
      for (int j = 2; j <= count; ++j) {
        const double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = count * (xi * p1 - p0) / (xi * xi - 1.0);
      const double step = p1 / dp;
      xi -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    x[std::size_t(count - 1 - k)] = xi;
    w[std::size_t(count - 1 - k)] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

// int_a^b t^{p-1} (c0 + c1 t) dt, a >= 0
double segment_power(double a, double b, double p, double c0, double c1) {
  double term0;
  if (p == 0.0)
    term0 = c0 * std::log(b / a);
  else
    term0 = c0 * (std::pow(b, p) - std::pow(a, p)) / p;
  double term1;
  if (p == -1.0)
    term1 = c1 * std::log(b / a);
  else
    term1 = c1 * (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
  return term0 + term1;
}

// integral over the piecewise-linear curve (t_i, y_i), i in `idx`, of
// t^{p-1} y(t), starting from the segment [t_idx0, ...]; the [0, t_idx0]
// head is handled by the callers
double curve_power_integral(const std::vector<double>& t,
                            const std::vector<double>& y,
                            const std::vector<std::size_t>& idx, double p) {
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < idx.size(); ++s) {
    const double a = t[idx[s]], b = t[idx[s + 1]];
    if (b <= a) continue;
    const double ya = y[idx[s]], yb = y[idx[s + 1]];
    const double slope = (yb - ya) / (b - a);
    acc += segment_power(a, b, p, ya - slope * a, slope);
  }
  return acc;
}

std::vector<std::size_t> all_indices(std::size_t count) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  return idx;
}

std::vector<std::size_t> half_indices(std::size_t count) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < count; i += 2) idx.push_back(i);
  if (idx.back() != count - 1) idx.push_back(count - 1);
  return idx;
}

} // namespace

// ---- sphere quadratures ----------------------------------------------------------

std::shared_ptr<const SphereQuadrature> SphereQuadrature::make(int n, int count,
                                                               int count_phi) {
  auto quad = std::make_shared<SphereQuadrature>();
  quad->n = n;
  if (n == 1) {
    quad->nodes = {grid::Vec{1.0, 0.0, 0.0}, grid::Vec{-1.0, 0.0, 0.0}};
    quad->weights = {1.0, 1.0};
  } else if (n == 2) {
    if (count <= 0) count = 256;
    const double w = 2.0 * specfun::pi / count;
    quad->nodes.reserve(std::size_t(count));
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * specfun::pi * i / count;
      quad->nodes.push_back(grid::Vec{std::cos(th), std::sin(th), 0.0});
      quad->weights.push_back(w);
    }
  } else if (n == 3) {
    if (count <= 0) count = 32;
    if (count_phi <= 0) count_phi = 64;
    std::vector<double> gx, gw;
    legendre_rule(count, gx, gw);
    const double wphi = 2.0 * specfun::pi / count_phi;
    for (int i = 0; i < count; ++i) {
      const double cth = gx[std::size_t(i)];
      const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
      for (int j = 0; j < count_phi; ++j) {
        const double ph = 2.0 * specfun::pi * j / count_phi;
        quad->nodes.push_back(
            grid::Vec{sth * std::cos(ph), sth * std::sin(ph), cth});
        quad->weights.push_back(gw[std::size_t(i)] * wphi);
      }
    }
  } else {
    throw std::invalid_argument("SphereQuadrature: n in {1,2,3}");
  }
  return quad;
}

bool StarBody::any_degenerate() const {
  return std::find(degenerate.begin(), degenerate.end(), char(1)) !=
         degenerate.end();
}

void StarBody::validate() const {
  if (!quad) throw std::invalid_argument("StarBody: missing quadrature");
  if (rho.size() != quad->size() || degenerate.size() != quad->size())
    throw std::invalid_argument("StarBody: node count mismatch");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (degenerate[i]) continue;
    if (!(rho[i] > 0.0) || !std::isfinite(rho[i]))
      throw std::invalid_argument("StarBody: radial function must be positive");
  }
}

StarBody make_ball(std::shared_ptr<const SphereQuadrature> quad, double radius,
                   const std::string& label) {
  StarBody b;
  b.quad = std::move(quad);
  b.rho.assign(b.quad->size(), radius);
  b.degenerate.assign(b.quad->size(), 0);
  b.label = label;
  b.validate();
  return b;
}

StarBody make_body(std::shared_ptr<const SphereQuadrature> quad,
                   const std::function<double(const grid::Vec&)>& rho_fn,
                   const std::string& label) {
  StarBody b;
  b.quad = std::move(quad);
  b.rho.reserve(b.quad->size());
  for (const auto& u : b.quad->nodes) b.rho.push_back(rho_fn(u));
  b.degenerate.assign(b.quad->size(), 0);
  b.label = label;
  b.validate();
  return b;
}

StarBody scale_body(const StarBody& body, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scale_body: c > 0 required");
  StarBody out = body;
  for (double& r : out.rho) r *= c;
  return out;
}

StarBody scale_to_volume(const StarBody& body, double volume) {
  const double v = star_volume(body);
  if (!(v > 0.0))
    throw std::invalid_argument("scale_to_volume: degenerate body");
  return scale_body(body, std::pow(volume / v, 1.0 / body.quad->n));
}

// ---- weighted curve integrals ------------------------------------------------------

WeightedIntegral weighted_g_integral(const corr::DirectionalCorrelation& c,
                                     double p) {
  if (!(p > 0.0))
    throw std::domain_error("weighted_g_integral: requires p > 0");
  WeightedIntegral out;
  auto evaluate = [&](const std::vector<std::size_t>& idx) {
    // head [0, t_1]: linear between g(0) and the first positive node
    const double t1 = c.t[idx[1]];
    const double slope = (c.g[idx[1]] - c.g[0]) / t1;
    double acc = c.g[0] * std::pow(t1, p) / p +
                 slope * std::pow(t1, p + 1.0) / (p + 1.0);
    std::vector<std::size_t> rest(idx.begin() + 1, idx.end());
    acc += curve_power_integral(c.t, c.g, rest, p);
    return acc;
  };
  const auto idx = all_indices(c.t.size());
  out.value = evaluate(idx);
  out.error_estimate = std::fabs(out.value - evaluate(half_indices(c.t.size()))) / 3.0;
  if (c.tail.fitted) {
    const double T = c.t.back();
    if (c.tail.rate > p) {
      out.tail = c.tail.coeff * std::pow(T, p - c.tail.rate) /
                 (c.tail.rate - p);
      out.tail_uncertain = std::fabs(out.tail);
      out.value += out.tail;
    } else {
      out.divergent = true; // the weighted tail does not converge
    }
    if (out.value > 0.0 && std::fabs(out.tail) > 0.01 * out.value)
      out.divergent = true;
  }
  return out;
}

WeightedIntegral weighted_d_integral(const corr::DifferenceCurve& d, double p,
                                     const corr::TailFit& gtail,
                                     double resolution_floor) {
  if (!(p > -1.0) || !(p < 0.0))
    throw std::domain_error("weighted_d_integral: requires p in (-1, 0)");
  WeightedIntegral out;
  const auto& t = d.t;
  // the identity route 2(g(0) - g(t)) touches the interpolant only linearly
  // and shares the exact t = 0 lattice sum, so its bias is an order of h
  // smaller than the direct square sum on non-aligned shifts
  const auto& y = d.d_from_g;

  auto evaluate = [&](const std::vector<std::size_t>& idx, bool* diverges) {
    // first usable node: strictly positive value at or beyond the floor
    std::size_t first = 1;
    while (first < idx.size() &&
           (y[idx[first]] <= 0.0 || t[idx[first]] < resolution_floor))
      ++first;
    if (first + 1 >= idx.size()) return 0.0;
    // head [0, t_first]: power model y ~ y_first (t/t_first)^kappa fitted
    // from the first two usable nodes; the fit doubles as the
    // integrability test near zero
    const double ta = t[idx[first]], ya = y[idx[first]];
    const double tb = t[idx[first + 1]], yb = y[idx[first + 1]];
    double kappa = 1.0;
    if (ya > 0.0 && yb > 0.0 && tb > ta)
      kappa = std::clamp(std::log(yb / ya) / std::log(tb / ta), 0.125, 6.0);
    double acc;
    if (p + kappa <= 0.05) {
      if (diverges) *diverges = true;
      acc = p + kappa > 0.0 ? ya * std::pow(ta, p) / (p + kappa) : 0.0;
    } else {
      acc = ya * std::pow(ta, p) / (p + kappa);
    }
    std::vector<std::size_t> rest(idx.begin() + std::ptrdiff_t(first),
                                  idx.end());
    acc += curve_power_integral(t, y, rest, p);
    return acc;
  };

  bool div = false;
  out.value = evaluate(all_indices(t.size()), &div);
  out.error_estimate =
      std::fabs(out.value - evaluate(half_indices(t.size()), nullptr)) / 3.0;

  // beyond the grid, d tends to 2 ||f||_2^2; the constant part integrates in
  // closed form (exact for compactly supported f), the remaining -2g
  // correction uses the fitted model
  const double T = t.back();
  double tail = 2.0 * d.l2sq * std::pow(T, p) / (-p);
  double uncertain = 0.0;
  if (gtail.fitted) {
    uncertain = 2.0 * gtail.coeff * std::pow(T, p - gtail.rate) /
                (gtail.rate - p);
    tail -= uncertain;
  }
  out.tail = tail;
  out.tail_uncertain = std::fabs(uncertain);
  out.value += tail;
  if (out.value > 0.0 && std::fabs(uncertain) > 0.01 * out.value) div = true;
  out.divergent = div;
  return out;
}

WeightedIntegral r_zero_log_integral(const corr::DirectionalCorrelation& c,
                                     double resolution_floor) {
  WeightedIntegral out;
  const double g0 = c.g[0];
  if (!(g0 > 0.0))
    throw std::domain_error("r_zero_log_integral: vanishing L2 norm");

  auto evaluate = [&](const std::vector<std::size_t>& idx, bool* diverges) {
    // part A: int_0^1 (g^ - 1)/t dt; part B: int_1^inf g^/t dt.
    // Head [0, t_first]: 1 - g^ ~ c t^kappa fitted from the first two
    // usable nodes; contributes z(t_first)/kappa and tests integrability.
    double acc = 0.0;
    std::size_t first = 1;
    while (first < idx.size() && (c.t[idx[first]] < resolution_floor ||
                                  c.g[idx[first]] >= g0))
      ++first;
    if (first + 1 >= idx.size()) first = 1;
    {
      const double ta = c.t[idx[first]];
      const double za = c.g[idx[first]] / g0 - 1.0;
      double kappa = 1.0;
      if (first + 1 < idx.size()) {
        const double tb = c.t[idx[first + 1]];
        const double zb = c.g[idx[first + 1]] / g0 - 1.0;
        if (za < 0.0 && zb < 0.0 && tb > ta)
          kappa = std::clamp(std::log(zb / za) / std::log(tb / ta), 0.125, 6.0);
      }
      if (diverges && kappa <= 0.05) *diverges = true;
      acc += za / kappa;
    }
    for (std::size_t s = first; s + 1 < idx.size(); ++s) {
      double a = c.t[idx[s]], b = c.t[idx[s + 1]];
      if (b <= a) continue;
      double ya = c.g[idx[s]] / g0, yb = c.g[idx[s + 1]] / g0;
      if (a >= 1.0) {
        // part B segment
        const double slope = (yb - ya) / (b - a);
        acc += segment_power(a, b, 0.0, ya - slope * a, slope);
        continue;
      }
      double yb_split = yb;
      double b_split = b;
      if (b > 1.0) {
        // straddles the split: cut at t = 1 with the interpolated value
        const double y1 = ya + (yb - ya) * (1.0 - a) / (b - a);
        // part B piece [1, b]
        const double slope = (yb - y1) / (b - 1.0);
        acc += segment_power(1.0, b, 0.0, y1 - slope * 1.0, slope);
        yb_split = y1;
        b_split = 1.0;
      }
      // part A piece [a, b_split] with integrand (g^ - 1)/t
      const double za = ya - 1.0, zb = yb_split - 1.0;
      const double slope = (zb - za) / (b_split - a);
      acc += segment_power(a, b_split, 0.0, za - slope * a, slope);
    }
    return acc;
  };

  bool div = false;
  out.value = evaluate(all_indices(c.t.size()), &div);
  out.error_estimate =
      std::fabs(out.value - evaluate(half_indices(c.t.size()), nullptr)) / 3.0;
  if (c.tail.fitted) {
    const double T = c.t.back();
    if (c.tail.rate > 0.0) {
      out.tail = c.tail.coeff / g0 * std::pow(T, -c.tail.rate) / c.tail.rate;
      out.tail_uncertain = std::fabs(out.tail);
      out.value += out.tail;
    } else {
      div = true;
    }
    if (std::fabs(out.tail) > 0.01 * std::max(1.0, std::fabs(out.value)))
      div = true;
  }
  out.divergent = div;
  return out;
}

// ---- body constructors ----------------------------------------------------------

namespace {

struct NodeAccumulator {
  std::vector<double> rho;
  std::vector<char> degenerate;
  std::vector<double> err;
  std::vector<double> tailfrac;
  std::vector<char> div;

  explicit NodeAccumulator(std::size_t count)
      : rho(count, 0.0),
        degenerate(count, 0),
        err(count, 0.0),
        tailfrac(count, 0.0),
        div(count, 0) {}

  BodyResult finish(std::shared_ptr<const SphereQuadrature> quad,
                    std::string label) {
    BodyResult res;
    res.body.quad = std::move(quad);
    res.body.rho = std::move(rho);
    res.body.degenerate = std::move(degenerate);
    res.body.label = std::move(label);
    for (std::size_t i = 0; i < res.body.rho.size(); ++i) {
      res.diag.error_estimate = std::max(res.diag.error_estimate, err[i]);
      res.diag.tail_fraction = std::max(res.diag.tail_fraction, tailfrac[i]);
      if (div[i]) res.diag.divergence_flag = true;
    }
    res.body.validate();
    return res;
  }
};

void store_power_value(NodeAccumulator& acc, std::size_t i, double value,
                       double exponent, const WeightedIntegral& w) {
  if (value <= 0.0 || !std::isfinite(value)) {
    acc.rho[i] = 0.0;
    acc.degenerate[i] = 1;
  } else {
    acc.rho[i] = std::pow(value, 1.0 / exponent);
    acc.err[i] = w.error_estimate / value;
    acc.tailfrac[i] = w.tail_uncertain / value;
  }
  if (w.divergent) acc.div[i] = 1;
}

// interpolated shifts distort difference curves below one cell; aligned
// lattice shifts are exact
double interp_floor(const grid::GridFunction& f, const grid::Vec& u) {
  for (int d = 0; d < f.n; ++d)
    if (std::fabs(std::fabs(u[d]) - 1.0) < 1e-12) return 0.0;
  return 1.5 * f.spacing();
}

} // namespace

BodyResult s_alpha_body(const grid::GridFunction& f, double alpha,
                        std::shared_ptr<const SphereQuadrature> quad) {
  if (!(alpha > 0.0)) throw std::domain_error("s_alpha_body: alpha > 0");
  if (quad->n != f.n) throw std::invalid_argument("s_alpha_body: dim mismatch");
  NodeAccumulator acc(quad->size());
  parallel_for(quad->size(), [&](std::size_t i) {
    const auto t = corr::t_grid_for(f, quad->nodes[i]);
    const auto c = corr::autocorrelation(f, quad->nodes[i], t);
    const auto w = weighted_g_integral(c, alpha);
    store_power_value(acc, i, w.value, alpha, w);
  });
  return acc.finish(std::move(quad), "S_alpha");
}

BodyResult s_alpha_body(const grid::RadialProfile& f, double alpha,
                        std::shared_ptr<const SphereQuadrature> quad) {
  if (!(alpha > 0.0)) throw std::domain_error("s_alpha_body: alpha > 0");
  if (quad->n != f.n) throw std::invalid_argument("s_alpha_body: dim mismatch");
  const auto c = corr::autocorrelation(f, corr::t_grid_for(f));
  const auto w = weighted_g_integral(c, alpha);
  NodeAccumulator acc(quad->size());
  for (std::size_t i = 0; i < quad->size(); ++i)
    store_power_value(acc, i, w.value, alpha, w);
  return acc.finish(std::move(quad), "S_alpha");
}

BodyResult polar_projection_body(const grid::GridFunction& f, double alpha,
                                 std::shared_ptr<const SphereQuadrature> quad) {
  if (!(alpha > -1.0) || !(alpha < 0.0))
    throw std::domain_error("polar_projection_body: alpha in (-1,0)");
  if (quad->n != f.n)
    throw std::invalid_argument("polar_projection_body: dim mismatch");
  NodeAccumulator acc(quad->size());
  const double p = 2.0 * alpha;
  parallel_for(quad->size(), [&](std::size_t i) {
    const auto t = corr::t_grid_for(f, quad->nodes[i]);
    const auto d = corr::difference_correlation(f, quad->nodes[i], t);
    const auto w = weighted_d_integral(d, p, corr::TailFit{},
                                       interp_floor(f, quad->nodes[i]));
    store_power_value(acc, i, w.value, p, w);
  });
  return acc.finish(std::move(quad), "Pi2_polar");
}

BodyResult polar_projection_body(const grid::RadialProfile& f, double alpha,
                                 std::shared_ptr<const SphereQuadrature> quad) {
  if (!(alpha > -1.0) || !(alpha < 0.0))
    throw std::domain_error("polar_projection_body: alpha in (-1,0)");
  if (quad->n != f.n)
    throw std::invalid_argument("polar_projection_body: dim mismatch");
  const auto tg = corr::t_grid_for(f);
  const auto c = corr::autocorrelation(f, tg);
  corr::DifferenceCurve d;
  d.u = c.u;
  d.t = tg;
  d.l2sq = c.l2sq;
  d.support_bound = c.support_bound;
  d.d_direct.resize(tg.size());
  d.d_from_g.resize(tg.size());
  for (std::size_t i = 0; i < tg.size(); ++i) {
    const double v = std::max(0.0, 2.0 * (c.l2sq - c.g[i]));
    d.d_direct[i] = v;
    d.d_from_g[i] = v;
  }
  const auto w = weighted_d_integral(d, 2.0 * alpha, c.tail);
  NodeAccumulator acc(quad->size());
  for (std::size_t i = 0; i < quad->size(); ++i)
    store_power_value(acc, i, w.value, 2.0 * alpha, w);
  return acc.finish(std::move(quad), "Pi2_polar");
}

namespace {

// shared radial-mean assembly once the defining integral value I and the
// consistent ||f||_2^2 are known:
//   alpha > 0:        rho^alpha = (alpha / l2sq) I with I = int t^{a-1} g
//   -1 < alpha < 0:   rho^alpha = (-alpha / (2 l2sq)) I with I = int t^{a-1} d
// The alpha < 0 normalization follows the Gardner-Zhang bridge and the
// continuity of rho_{R_alpha} at alpha = 0.
double radial_mean_value(double alpha, double integral, double l2sq) {
  return alpha > 0.0 ? alpha / l2sq * integral
                     : -alpha / (2.0 * l2sq) * integral;
}

} // namespace

BodyResult radial_mean_body(const grid::GridFunction& f, double alpha,
                            std::shared_ptr<const SphereQuadrature> quad) {
  if (!(alpha > -1.0) || alpha == 0.0)
    throw std::domain_error("radial_mean_body: alpha > -1, alpha != 0");
  if (quad->n != f.n)
    throw std::invalid_argument("radial_mean_body: dim mismatch");
  NodeAccumulator acc(quad->size());
  parallel_for(quad->size(), [&](std::size_t i) {
    const auto t = corr::t_grid_for(f, quad->nodes[i]);
    if (alpha > 0.0) {
      const auto c = corr::autocorrelation(f, quad->nodes[i], t);
      const auto w = weighted_g_integral(c, alpha);
      store_power_value(acc, i, radial_mean_value(alpha, w.value, c.l2sq),
                        alpha, w);
    } else {
      const auto d = corr::difference_correlation(f, quad->nodes[i], t);
      const auto w = weighted_d_integral(d, alpha, corr::TailFit{},
                                         interp_floor(f, quad->nodes[i]));
      store_power_value(acc, i, radial_mean_value(alpha, w.value, d.l2sq),
                        alpha, w);
    }
  });
  return acc.finish(std::move(quad), "R_alpha");
}

BodyResult radial_mean_body(const grid::RadialProfile& f, double alpha,
                            std::shared_ptr<const SphereQuadrature> quad) {
  if (!(alpha > -1.0) || alpha == 0.0)
    throw std::domain_error("radial_mean_body: alpha > -1, alpha != 0");
  if (quad->n != f.n)
    throw std::invalid_argument("radial_mean_body: dim mismatch");
  const auto tg = corr::t_grid_for(f);
  const auto c = corr::autocorrelation(f, tg);
  WeightedIntegral w;
  double value = 0.0;
  if (alpha > 0.0) {
    w = weighted_g_integral(c, alpha);
    value = radial_mean_value(alpha, w.value, c.l2sq);
  } else {
    corr::DifferenceCurve d;
    d.t = tg;
    d.l2sq = c.l2sq;
    d.support_bound = c.support_bound;
    d.d_direct.resize(tg.size());
    for (std::size_t i = 0; i < tg.size(); ++i)
      d.d_direct[i] = std::max(0.0, 2.0 * (c.l2sq - c.g[i]));
    d.d_from_g = d.d_direct;
    w = weighted_d_integral(d, alpha, c.tail);
    value = radial_mean_value(alpha, w.value, c.l2sq);
  }
  NodeAccumulator acc(quad->size());
  for (std::size_t i = 0; i < quad->size(); ++i)
    store_power_value(acc, i, value, alpha, w);
  return acc.finish(std::move(quad), "R_alpha");
}

BodyResult r_zero_body(const grid::GridFunction& f,
                       std::shared_ptr<const SphereQuadrature> quad) {
  if (quad->n != f.n) throw std::invalid_argument("r_zero_body: dim mismatch");
  NodeAccumulator acc(quad->size());
  parallel_for(quad->size(), [&](std::size_t i) {
    const auto t = corr::t_grid_for(f, quad->nodes[i]);
    const auto c = corr::autocorrelation(f, quad->nodes[i], t);
    const auto w = r_zero_log_integral(c, interp_floor(f, quad->nodes[i]));
    acc.rho[i] = std::exp(w.value);
    acc.err[i] = w.error_estimate;
    acc.tailfrac[i] = w.tail_uncertain;
    acc.div[i] = w.divergent ? 1 : 0;
  });
  return acc.finish(std::move(quad), "R_0");
}

BodyResult r_zero_body(const grid::RadialProfile& f,
                       std::shared_ptr<const SphereQuadrature> quad) {
  if (quad->n != f.n) throw std::invalid_argument("r_zero_body: dim mismatch");
  const auto c = corr::autocorrelation(f, corr::t_grid_for(f));
  const auto w = r_zero_log_integral(c);
  NodeAccumulator acc(quad->size());
  for (std::size_t i = 0; i < quad->size(); ++i) {
    acc.rho[i] = std::exp(w.value);
    acc.err[i] = w.error_estimate;
    acc.tailfrac[i] = w.tail_uncertain;
    acc.div[i] = w.divergent ? 1 : 0;
  }
  return acc.finish(std::move(quad), "R_0");
}

// ---- geometry -------------------------------------------------------------------

double radial_function(const StarBody& body, const grid::Vec& u) {
  const auto& quad = *body.quad;
  if (quad.n == 1) {
    return u[0] > 0.0 ? body.rho[0] : body.rho[1];
  }
  if (quad.n == 2) {
    const std::size_t count = quad.size();
    double th = std::atan2(u[1], u[0]);
    if (th < 0.0) th += 2.0 * specfun::pi;
    const double pos = th / (2.0 * specfun::pi) * double(count);
    const std::size_t i0 = std::size_t(pos) % count;
    const std::size_t i1 = (i0 + 1) % count;
    const double frac = pos - std::floor(pos);
    return (1.0 - frac) * body.rho[i0] + frac * body.rho[i1];
  }
  // n = 3: inverse-distance over the 3 nearest nodes
  double best[3] = {inf, inf, inf};
  std::size_t bi[3] = {0, 0, 0};
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const auto& v = quad.nodes[i];
    const double dx = v[0] - u[0], dy = v[1] - u[1], dz = v[2] - u[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best[0]) {
      best[2] = best[1];
      bi[2] = bi[1];
      best[1] = best[0];
      bi[1] = bi[0];
      best[0] = d2;
      bi[0] = i;
    } else if (d2 < best[1]) {
      best[2] = best[1];
      bi[2] = bi[1];
      best[1] = d2;
      bi[1] = i;
    } else if (d2 < best[2]) {
      best[2] = d2;
      bi[2] = i;
    }
  }
  double wsum = 0.0, acc = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double w = 1.0 / (std::sqrt(best[k]) + 1e-12);
    wsum += w;
    acc += w * body.rho[bi[k]];
  }
  return acc / wsum;
}

double gauge(const StarBody& body, const grid::Vec& z) {
  const int n = body.quad->n;
  double norm2 = 0.0;
  for (int d = 0; d < n; ++d) norm2 += z[d] * z[d];
  if (norm2 == 0.0) return 0.0;
  const double norm = std::sqrt(norm2);
  grid::Vec u{0.0, 0.0, 0.0};
  for (int d = 0; d < n; ++d) u[d] = z[d] / norm;
  const double r = radial_function(body, u);
  if (!(r > 0.0)) return inf;
  return norm / r;
}

double star_volume(const StarBody& body) {
  const int n = body.quad->n;
  double acc = 0.0;
  for (std::size_t i = 0; i < body.rho.size(); ++i)
    acc += body.quad->weights[i] * std::pow(body.rho[i], double(n));
  return acc / n;
}

void write_csv(const StarBody& body, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  const int n = body.quad->n;
  out << (n == 1 ? "u0,weight,rho\n"
                 : (n == 2 ? "u0,u1,weight,rho\n" : "u0,u1,u2,weight,rho\n"));
  char line[200];
  for (std::size_t i = 0; i < body.rho.size(); ++i) {
    int len = 0;
    for (int d = 0; d < n; ++d)
      len += std::snprintf(line + len, sizeof(line) - len, "%.17g,",
                           body.quad->nodes[i][d]);
    std::snprintf(line + len, sizeof(line) - len, "%.17g,%.17g\n",
                  body.quad->weights[i], body.rho[i]);
    out << line;
  }
}

} // namespace ahls::bodies
