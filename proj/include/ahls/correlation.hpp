#pragma once

#include <vector>

#include "ahls/grid.hpp"

namespace ahls::corr {

/// Fitted power-law model g(t) ~ coeff * t^{-rate} past the last grid point;
/// only meaningful when `fitted` is set.
struct TailFit {
  bool fitted = false;
  double coeff = 0.0;
  double rate = 0.0;
};

/// Per-direction curve t -> g_u(t) = int f(x) f(x+tu) dx, stored unnormalized.
struct DirectionalCorrelation {
  grid::Vec u{1.0, 0.0, 0.0};
  std::vector<double> t; // increasing, t[0] == 0
  std::vector<double> g;
  double l2sq = 0.0;          // g(0) = ||f||_2^2
  double support_bound = 0.0; // g == 0 beyond this t; +inf when only decaying
  TailFit tail;

  double normalized(std::size_t i) const { return g[i] / l2sq; }
};

/// Difference curve d_u(t) = int |f(x+tu) - f(x)|^2 dx.  On grids the direct
/// sum and the algebraic identity 2(g(0) - g(t)) differ by interpolation
/// bias; both are retained.
struct DifferenceCurve {
  grid::Vec u{1.0, 0.0, 0.0};
  std::vector<double> t;
  std::vector<double> d_direct;
  std::vector<double> d_from_g;
  double l2sq = 0.0;
  double support_bound = 0.0;
};

/// t-grid template: {0}, log-spaced points on [t_min, 1], linear points on
/// (1, min(t_max, 8)], then log-spaced out to t_max when it exceeds 8.
/// Always contains 1 exactly when t_max >= 1 (the split point of the
/// logarithmic bodies).
std::vector<double> default_t_grid(double t_max, double t_min = 1e-4,
                                   int log_count = 64, int linear_count = 64);

/// Multiples of the cell spacing h up to t_max (plus 0); the aligned-shift
/// path is exact for lattice-aligned shifts.
std::vector<double> aligned_t_grid(double h, double t_max);

/// Grid-sampled f along a unit direction u.  Uses exact lattice shifts when
/// t*u lands on the lattice, multilinear interpolation otherwise.
DirectionalCorrelation autocorrelation(const grid::GridFunction& f,
                                       const grid::Vec& u,
                                       const std::vector<double>& t_grid);

/// Radially symmetric fast path; the curve is direction-independent.
DirectionalCorrelation autocorrelation(const grid::RadialProfile& f,
                                       const std::vector<double>& t_grid);

DifferenceCurve difference_correlation(const grid::GridFunction& f,
                                       const grid::Vec& u,
                                       const std::vector<double>& t_grid);

DifferenceCurve difference_correlation(const grid::RadialProfile& f,
                                       const std::vector<double>& t_grid);

/// Default t-grid choice for a function/direction pair.
std::vector<double> t_grid_for(const grid::GridFunction& f, const grid::Vec& u);
std::vector<double> t_grid_for(const grid::RadialProfile& f);

void write_csv(const DirectionalCorrelation& g, const DifferenceCurve* d,
               const std::string& path);

} // namespace ahls::corr
