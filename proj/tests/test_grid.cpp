#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "ahls/grid.hpp"
#include "ahls/specfun.hpp"
#include "oracles.hpp"

using namespace ahls;
using grid::GridFunction;
using grid::RadialProfile;
using grid::Vec;

namespace {

GridFunction chi_unit_interval(int m = 256, double R = 2.0) {
  return GridFunction::sample(1, R, m, [](const Vec& x) {
    return (x[0] > 0.0 && x[0] < 1.0) ? 1.0 : 0.0;
  });
}

GridFunction gaussian_1d(int m = 512, double R = 8.0) {
  const double a = std::pow(2.0 / specfun::pi, 0.25);
  return GridFunction::sample(
      1, R, m, [a](const Vec& x) { return a * std::exp(-x[0] * x[0]); });
}

} // namespace

TEST_CASE("lp_norm on grids") {
  auto chi = chi_unit_interval();
  CHECK(lp_norm(chi, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lp_norm(chi, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  auto g = gaussian_1d();
  CHECK(lp_norm(g, 2.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("lp_norm on profiles with power tail") {
  // f(r) = (1+r^2)^{-1} in n=1: ||f||_2^2 = pi/2
  auto f = RadialProfile::sample(
      1, [](double r) { return 1.0 / (1.0 + r * r); }, 2.0, 1e5, 20000, 100000,
      {grid::RadialTail::Kind::PowerLaw, 2.0});
  const double l2 = lp_norm(f, 2.0);
  CHECK(l2 * l2 == doctest::Approx(specfun::pi / 2.0).epsilon(1e-8));
  // n=2 LogSobolev extremizer norm: int (1+r^2)^{-2} = pi
  auto f2 = RadialProfile::sample(
      2, [](double r) { return 1.0 / ((1.0 + r * r) * (1.0 + r * r)); }, 2.0,
      1e5, 20000, 100000, {grid::RadialTail::Kind::PowerLaw, 4.0});
  const double l1 = lp_norm(f2, 1.0);
  CHECK(l1 == doctest::Approx(specfun::pi).epsilon(1e-8));
}

TEST_CASE("entropy basics") {
  auto chi = chi_unit_interval();
  CHECK(entropy_l1(chi) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(entropy_l2(chi) == doctest::Approx(0.0).epsilon(1e-14));
  auto half = GridFunction::sample(1, 2.0, 256, [](const Vec& x) {
    return (x[0] > 0.0 && x[0] < 2.0) ? 0.5 : 0.0;
  });
  CHECK(entropy_l1(half) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
  // c * chi_[0,1] -> c^2 log c
  auto scaled = GridFunction::sample(1, 2.0, 256, [](const Vec& x) {
    return (x[0] > 0.0 && x[0] < 1.0) ? 3.0 : 0.0;
  });
  CHECK(entropy_l2(scaled) ==
        doctest::Approx(9.0 * std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("entropy of the Carlen-Loss optimizer matches the quadrature oracle") {
  // n=1, f = a (1 + x^2)^{-1} with a = 1/pi so ||f||_1 = 1
  const double a = 1.0 / specfun::pi;
  auto f = RadialProfile::sample(
      1, [a](double r) { return a / (1.0 + r * r); }, 2.0, 2e4, 40000, 300000,
      {grid::RadialTail::Kind::PowerLaw, 2.0});
  CHECK(lp_norm(f, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  auto w = [a](double r) {
    const double v = a / (1.0 + r * r);
    return v * std::log(v);
  };
  const double oracle_val =
      2.0 * (oracle::integrate(w, 0.0, 50.0, 1e-13) +
             oracle::integrate_to_inf(w, 50.0, 1e-14));
  CHECK(std::fabs(entropy_l1(f) - oracle_val) < 1e-8);
}

TEST_CASE("entropy_l2 of the n=2 log-Sobolev optimizer matches the oracle") {
  const double a = std::pow(specfun::pi, -0.5);
  auto f = RadialProfile::sample(
      2, [a](double r) { return a / (1.0 + r * r); }, 2.0, 2e4, 40000, 300000,
      {grid::RadialTail::Kind::PowerLaw, 2.0});
  CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-10));
  auto w = [a](double r) {
    const double v = a / (1.0 + r * r);
    return v * v * std::log(v) * r; // n=2 radial weight
  };
  const double oracle_val =
      2.0 * specfun::pi *
      (oracle::integrate(w, 0.0, 50.0, 1e-13) +
       oracle::integrate_to_inf(w, 50.0, 1e-14));
  CHECK(std::fabs(entropy_l2(f) - oracle_val) < 1e-8);
}

TEST_CASE("schwarz symmetrization of an indicator") {
  auto chi = chi_unit_interval();
  auto sym = grid::schwarz_symmetrize(chi);
  // centered interval of length 1: f* = chi_[-1/2,1/2]
  CHECK(sym.eval(0.0) == doctest::Approx(1.0));
  CHECK(sym.eval(0.45) == doctest::Approx(1.0));
  CHECK(sym.eval(0.6) == doctest::Approx(0.0));
  CHECK(lp_norm(sym, 1.0) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("symmetrization fixes radial nonincreasing functions") {
  auto g = GridFunction::sample(2, 6.0, 96, [](const Vec& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  auto sym = grid::schwarz_symmetrize(g);
  const double h = g.spacing();
  double worst = 0.0;
  for (double r = 0.1; r < 4.0; r += 0.13) {
    worst = std::max(worst, std::fabs(sym.eval(r) - std::exp(-r * r)));
  }
  CHECK(worst < h);
}

TEST_CASE("symmetrization: two disjoint squares against the level-set oracle") {
  // heights 2 and 1 on two unit squares (n=2)
  auto f = GridFunction::sample(2, 4.0, 128, [](const Vec& x) {
    const bool in1 = x[0] > -3.0 && x[0] < -2.0 && x[1] > -0.5 && x[1] < 0.5;
    const bool in2 = x[0] > 1.5 && x[0] < 2.5 && x[1] > -0.5 && x[1] < 0.5;
    return in1 ? 2.0 : (in2 ? 1.0 : 0.0);
  });
  auto sym = grid::schwarz_symmetrize(f);
  const double cell = f.cell_volume();
  // superlevel measures at t = 1.5 and t = 0.5: areas 1 and 2
  auto level_measure = [&](double t) {
    // bisect the nonincreasing profile for the crossing radius
    double lo = 0.0, hi = sym.r_max();
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (sym.eval(mid) > t ? lo : hi) = mid;
    }
    return specfun::unit_ball_volume(2) * lo * lo;
  };
  CHECK(std::fabs(level_measure(1.5) - 1.0) <= cell + 1e-12);
  CHECK(std::fabs(level_measure(0.5) - 2.0) <= cell + 1e-12);
}

TEST_CASE("equimeasurability at random thresholds") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto f = GridFunction::sample(2, 2.0, 64, [&](const Vec&) {
    return unif(rng);
  });
  auto sym = grid::schwarz_symmetrize(f);
  const double cell = f.cell_volume();
  std::mt19937_64 rng2(999);
  for (int k = 0; k < 20; ++k) {
    const double t = unif(rng2);
    std::size_t above = 0;
    for (double v : f.values)
      if (v > t) ++above;
    // crossing radius of the nonincreasing profile
    double lo = 0.0, hi = sym.r_max();
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      (sym.eval(mid) > t ? lo : hi) = mid;
    }
    const double measure = specfun::unit_ball_volume(2) * lo * lo;
    CHECK(std::fabs(measure - double(above) * cell) <= cell + 1e-12);
  }
  // entropy is preserved under rearrangement
  CHECK(std::fabs(entropy_l1(f) - entropy_l1(sym)) < 1e-3);
  CHECK(std::fabs(lp_norm(f, 2.0) - lp_norm(sym, 2.0)) < 1e-3);
}

TEST_CASE("extremizer normalization") {
  // LogSobolev, n=2: f0 = pi^{-1/2} (1+|x|^2)^{-1}
  grid::ExtremizerSpec spec;
  spec.n = 2;
  spec.family = grid::ExtremizerFamily::LogSobolev;
  spec.target = grid::NormTarget::L2;
  auto f = grid::make_extremizer_profile(spec);
  CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
  const double a = std::pow(specfun::pi, -0.5);
  CHECK(f.eval(0.0) == doctest::Approx(a).epsilon(1e-6));
  CHECK(f.eval(1.0) == doctest::Approx(0.5 * a).epsilon(1e-6));

  // LogHls, n=1: f = a (1+x^2)^{-1} with a = 1/pi
  grid::ExtremizerSpec cl;
  cl.n = 1;
  cl.family = grid::ExtremizerFamily::LogHls;
  cl.target = grid::NormTarget::L1;
  auto fcl = grid::make_extremizer_profile(cl);
  CHECK(lp_norm(fcl, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fcl.eval(0.0) == doctest::Approx(1.0 / specfun::pi).epsilon(1e-6));

  grid::ExtremizerSpec bad = cl;
  bad.phi = grid::diag(0.0, 1.0);
  CHECK_THROWS_AS((void)grid::make_extremizer(bad, 4.0, 64),
                  std::invalid_argument);
}

TEST_CASE("SL(n) change of variables preserves norms") {
  // normalized extremizer with anisotropic phi: the declared norm is exact
  grid::ExtremizerSpec spec;
  spec.n = 2;
  spec.family = grid::ExtremizerFamily::LogHls;
  spec.target = grid::NormTarget::L1;
  spec.phi = grid::diag(2.0, 0.5);
  auto f = grid::make_extremizer(spec, 12.0, 256);
  CHECK(lp_norm(f, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // raw SL(2) composition of a Gaussian: box tails are negligible, so the
  // grid integrals agree to near machine precision
  auto raw = [&](const grid::Mat& phi) {
    return GridFunction::sample(2, 12.0, 256, [&](const Vec& x) {
      const Vec z = grid::apply(phi, x, 2);
      return std::exp(-(z[0] * z[0] + z[1] * z[1]));
    });
  };
  const double i1 = lp_norm(raw(grid::identity()), 2.0);
  const double i2 = lp_norm(raw(grid::diag(2.0, 0.5)), 2.0);
  const double i3 = lp_norm(raw(grid::rotation2d(0.7)), 2.0);
  CHECK(std::fabs(i1 - i2) / i1 < 1e-6);
  CHECK(std::fabs(i1 - i3) / i1 < 1e-6);
}

TEST_CASE("apply_affine identity and translation") {
  auto g = gaussian_1d(256, 8.0);
  auto id = grid::apply_affine(g, grid::identity(), Vec{0.0, 0.0, 0.0});
  CHECK(id.mass_ratio == doctest::Approx(1.0).epsilon(1e-12));
  double worst = 0.0;
  for (std::size_t c = 0; c < g.values.size(); ++c)
    worst = std::max(worst, std::fabs(id.f.values[c] - g.values[c]));
  CHECK(worst < 1e-12);

  auto shifted = grid::apply_affine(g, grid::identity(), Vec{1.25, 0.0, 0.0});
  CHECK_FALSE(shifted.mass_leak_warning);
  CHECK(std::fabs(lp_norm(shifted.f, 1.0) - lp_norm(g, 1.0)) < 1e-3);
  CHECK(std::fabs(lp_norm(shifted.f, 2.0) - lp_norm(g, 2.0)) < 1e-3);
}

TEST_CASE("apply_affine volume-preserving stretch keeps the L2 norm") {
  auto g = GridFunction::sample(2, 8.0, 256, [](const Vec& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  auto stretched =
      grid::apply_affine(g, grid::diag(2.0, 0.5), Vec{0.0, 0.0, 0.0}, 16.0, 256);
  CHECK_FALSE(stretched.mass_leak_warning);
  CHECK(std::fabs(lp_norm(stretched.f, 2.0) - lp_norm(g, 2.0)) /
            lp_norm(g, 2.0) <
        1e-3);
}

TEST_CASE("apply_affine warns when mass leaves the box") {
  auto g = gaussian_1d(256, 8.0);
  auto pushed = grid::apply_affine(g, grid::identity(), Vec{7.5, 0.0, 0.0});
  CHECK(pushed.mass_leak_warning);
}

TEST_CASE("binary and csv round trip") {
  auto g = GridFunction::sample(2, 3.0, 32, [](const Vec& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1])) + 0.001 * x[0] * x[0];
  });
  const std::string path = "/tmp/ahls_grid_roundtrip.bin";
  grid::save_binary(g, path);
  auto back = grid::load_binary(path);
  CHECK(back.n == g.n);
  CHECK(back.m == g.m);
  CHECK(back.half_width == g.half_width);
  REQUIRE(back.values.size() == g.values.size());
  for (std::size_t i = 0; i < g.values.size(); ++i)
    CHECK(back.values[i] == g.values[i]);
  grid::save_csv(g, "/tmp/ahls_grid_roundtrip.csv");
  std::remove(path.c_str());
  std::remove("/tmp/ahls_grid_roundtrip.csv");
}

TEST_CASE("refinement convergence of grid integrals") {
  for (int m : {64, 128, 256}) {
    auto f = gaussian_1d(m, 8.0);
    CHECK(std::fabs(lp_norm(f, 2.0) - 1.0) < 1.0 / (m * m));
  }
}
