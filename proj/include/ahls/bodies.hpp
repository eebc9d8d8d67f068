#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ahls/correlation.hpp"
#include "ahls/grid.hpp"

namespace ahls::bodies {

/// Quadrature rule on S^{n-1}.  n=1: the two points; n=2: equally spaced
/// angles; n=3: Gauss-Legendre in cos(theta) times uniform phi.  Weights sum
/// to the surface area n * omega_n exactly.
struct SphereQuadrature {
  int n = 1;
  std::vector<grid::Vec> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  static std::shared_ptr<const SphereQuadrature> make(int n, int count = 0,
                                                      int count_phi = 0);
};

struct StarBody {
  std::shared_ptr<const SphereQuadrature> quad;
  std::vector<double> rho;      // radial function at the nodes; > 0 unless flagged
  std::vector<char> degenerate; // nodes where the defining quadrature vanished
  std::string label;

  bool any_degenerate() const;
  void validate() const;
};

struct BodyDiagnostics {
  double error_estimate = 0.0; // max relative error estimate of the node values
  double tail_fraction = 0.0;  // max estimated tail / partial integral
  bool divergence_flag = false;
};

struct BodyResult {
  StarBody body;
  BodyDiagnostics diag;
};

// ---- constructors -----------------------------------------------------------

StarBody make_ball(std::shared_ptr<const SphereQuadrature> quad, double radius,
                   const std::string& label = "ball");
StarBody make_body(std::shared_ptr<const SphereQuadrature> quad,
                   const std::function<double(const grid::Vec&)>& rho_fn,
                   const std::string& label = "body");
StarBody scale_body(const StarBody& body, double c);
/// Dilate so the star volume becomes `volume`.
StarBody scale_to_volume(const StarBody& body, double volume);

// ---- the bodies of the theory -------------------------------------------------

/// rho_{S_alpha f}(u)^alpha = int_0^inf t^{alpha-1} int f(x) f(x+tu) dx dt.
BodyResult s_alpha_body(const grid::GridFunction& f, double alpha,
                        std::shared_ptr<const SphereQuadrature> quad);
BodyResult s_alpha_body(const grid::RadialProfile& f, double alpha,
                        std::shared_ptr<const SphereQuadrature> quad);

/// rho_{Pi_2^{*,-alpha} f}(u)^{2 alpha}
///   = int_0^inf t^{2 alpha - 1} int |f(x+tu) - f(x)|^2 dx dt,
/// for alpha in (-1, 0).
BodyResult polar_projection_body(const grid::GridFunction& f, double alpha,
                                 std::shared_ptr<const SphereQuadrature> quad);
BodyResult polar_projection_body(const grid::RadialProfile& f, double alpha,
                                 std::shared_ptr<const SphereQuadrature> quad);

/// Radial mean body: for alpha > 0 a normalization of S_alpha f, for
/// alpha in (-1,0) a normalization of the fractional polar projection body.
BodyResult radial_mean_body(const grid::GridFunction& f, double alpha,
                            std::shared_ptr<const SphereQuadrature> quad);
BodyResult radial_mean_body(const grid::RadialProfile& f, double alpha,
                            std::shared_ptr<const SphereQuadrature> quad);

/// log rho_{R_0 f}(u) = int_0^1 (g^(t)-1)/t dt + int_1^inf g^(t)/t dt with
/// g^ = g_u / ||f||_2^2; the additive constant of the split form is zero.
BodyResult r_zero_body(const grid::GridFunction& f,
                       std::shared_ptr<const SphereQuadrature> quad);
BodyResult r_zero_body(const grid::RadialProfile& f,
                       std::shared_ptr<const SphereQuadrature> quad);

// ---- geometry ------------------------------------------------------------------

/// Gauge ||z||_L = |z| / rho_L(z/|z|); gauge(0) = 0.  Angular interpolation:
/// exact node lookup (n=1), circular linear interpolation (n=2),
/// inverse-distance over the 3 nearest nodes (n=3).
double gauge(const StarBody& body, const grid::Vec& z);

/// Interpolated radial function in direction u (|u| = 1).
double radial_function(const StarBody& body, const grid::Vec& u);

/// |L| = (1/n) sum w_i rho_i^n; degenerate nodes contribute zero.
double star_volume(const StarBody& body);

void write_csv(const StarBody& body, const std::string& path);

// ---- weighted curve integrals (exposed for the energy module) -------------------

struct WeightedIntegral {
  double value = 0.0;
  double tail = 0.0;           // analytic or fitted tail added to value
  double tail_uncertain = 0.0; // the estimated (non-exact) part of the tail
  double error_estimate = 0.0; // |full - half-resolution| / 3
  bool divergent = false;
};

/// int t^{p-1} g(t) dt over a correlation curve, closed form per linear
/// segment, with the tail model from the curve metadata.  Requires p > 0.
WeightedIntegral weighted_g_integral(const corr::DirectionalCorrelation& c,
                                     double p);

/// int t^{p-1} d(t) dt for a difference curve, p = 2 alpha in (-1, 0); the
/// constant level 2 ||f||_2^2 beyond the grid is integrated in closed form.
/// Curve values below `resolution_floor` are replaced by the power model
/// fitted at the floor (grid interpolation distorts d below one cell).
WeightedIntegral weighted_d_integral(const corr::DifferenceCurve& d, double p,
                                     const corr::TailFit& gtail,
                                     double resolution_floor = 0.0);

/// The split logarithmic integral of the zeroth radial mean body.
WeightedIntegral r_zero_log_integral(const corr::DirectionalCorrelation& c,
                                     double resolution_floor = 0.0);

} // namespace ahls::bodies
