#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace ahls::grid {

// Small fixed-size linear algebra for n <= 3; only the first n entries of a
// Vec / leading n x n block of a Mat are meaningful.
using Vec = std::array<double, 3>;
using Mat = std::array<std::array<double, 3>, 3>;

Mat identity();
Mat diag(double a, double b, double c = 1.0);
double det(const Mat& m, int n);
Mat inverse(const Mat& m, int n);
Vec apply(const Mat& m, const Vec& v, int n);
Mat rotation2d(double angle);

/// Nonnegative samples of a function on a cell-centered tensor grid over
/// [-R, R]^n, n in {1,2,3}.
struct GridFunction {
  int n = 1;
  double half_width = 1.0;
  int m = 0;
  std::vector<double> values; // row-major, m^n entries

  double spacing() const { return 2.0 * half_width / m; }
  double cell_volume() const;
  double coord(int i) const { return -half_width + (i + 0.5) * spacing(); }
  std::size_t index(int i, int j = 0, int k = 0) const;
  Vec cell_center(std::size_t flat) const;

  /// Multilinear interpolation; zero outside the box.
  double eval(const Vec& x) const;
  double integral() const;
  double max_value() const;

  void validate() const; // throws on negative or non-finite samples

  static GridFunction sample(int n, double half_width, int m,
                             const std::function<double(const Vec&)>& fn);
};

struct RadialTail {
  enum class Kind { Zero, PowerLaw };
  Kind kind = Kind::Zero;
  double exponent = 0.0; // f(r) ~ v_k (r/r_k)^{-exponent} beyond r_k
};

/// Piecewise-linear samples of a radial profile r -> f(r), the fast path for
/// radially symmetric functions.
struct RadialProfile {
  int n = 1;
  std::vector<double> radii;  // increasing, radii[0] == 0
  std::vector<double> values; // nonnegative
  RadialTail tail;

  double r_max() const { return radii.back(); }
  double eval(double r) const;
  void validate() const;

  /// Nodes: `core_count` uniform on [0, core_radius], then geometric up to
  /// `outer_radius` with `outer_count` points.
  static RadialProfile sample(int n, const std::function<double(double)>& fn,
                              double core_radius, double outer_radius,
                              int core_count, int outer_count,
                              RadialTail tail = {});
};

// ---- norms and entropies ---------------------------------------------------

double lp_norm(const GridFunction& f, double p);
double lp_norm(const RadialProfile& f, double p);

/// int f log f with the convention 0 log 0 = 0.
double entropy_l1(const GridFunction& f);
double entropy_l1(const RadialProfile& f);

/// int f^2 log f.
double entropy_l2(const GridFunction& f);
double entropy_l2(const RadialProfile& f);

// ---- symmetrization --------------------------------------------------------

/// Symmetric decreasing rearrangement: global sort of cell values, refilled
/// in increasing-radius order.  Exactly equimeasurable at the cell level.
RadialProfile schwarz_symmetrize(const GridFunction& f);

/// Rasterize a profile back onto a centered grid.
GridFunction rasterize(const RadialProfile& f, double half_width, int m);

// ---- extremizer families ---------------------------------------------------

enum class ExtremizerFamily {
  Hls,        // (1 + |phi(x-x0)|^2)^{-(n+alpha)/2}
  LogHls,     // (1 + |phi(x-x0)|^2)^{-n}
  LogSobolev, // (1 + |phi(x-x0)|^2)^{-n/2}
};

enum class NormTarget { L1, L2 };

struct ExtremizerSpec {
  int n = 1;
  ExtremizerFamily family = ExtremizerFamily::LogHls;
  double alpha = 1.0; // HLS order, used by the Hls family only
  Mat phi = identity();
  Vec x0 = {0.0, 0.0, 0.0};
  NormTarget target = NormTarget::L1;

  double exponent() const; // the decay power p of (1+|.|^2)^{-p}
};

/// Sampled extremizer, rescaled so the declared norm is exactly the target
/// on the chosen representation.
GridFunction make_extremizer(const ExtremizerSpec& spec, double half_width,
                             int m);

/// Radial fast path; requires phi = lambda * I and x0 = 0.
RadialProfile make_extremizer_profile(const ExtremizerSpec& spec,
                                      double outer_radius = 1e4,
                                      int core_count = 2000,
                                      int outer_count = 6000);

// ---- affine images ----------------------------------------------------------

struct AffineResult {
  GridFunction f;             // samples of x -> f(phi^{-1} x - x0)
  double mass_ratio = 1.0;    // grid mass of image / (|det phi| * mass of f)
  bool mass_leak_warning = false; // set when > 1% leaves the box
};

AffineResult apply_affine(const GridFunction& f, const Mat& phi, const Vec& x0);
AffineResult apply_affine(const GridFunction& f, const Mat& phi, const Vec& x0,
                          double out_half_width, int out_m);

// ---- serialization ----------------------------------------------------------

void save_binary(const GridFunction& f, const std::string& path);
GridFunction load_binary(const std::string& path);
void save_csv(const GridFunction& f, const std::string& path);

} // namespace ahls::grid
