#pragma once

namespace ahls::specfun {

inline constexpr double euler_gamma = 0.57721566490153286060651209;
inline constexpr double pi = 3.14159265358979323846264338;

/// Gamma function on x > -1, x not in {0,-1}.  Positive arguments use a
/// Lanczos approximation; (-1,0) uses the recurrence Gamma(x) = Gamma(x+1)/x,
/// which agrees with the analytic continuation by the integral of
/// t^{x-1}(e^{-t}-1).
double gamma_fn(double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Digamma psi(x) = Gamma'(x)/Gamma(x) for x > 0; recurrence up to a large
/// argument followed by the asymptotic Bernoulli series.
double digamma(double x);

double beta_fn(double a, double b);

/// Volume of the n-dimensional unit ball, pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);

/// Surface area of S^{n-1}, equal to n * unit_ball_volume(n).
double sphere_surface_area(int n);

/// Sharp HLS constant gamma_{n,alpha}
///   = pi^{(n-alpha)/2} |Gamma(alpha/2)| / Gamma((n+alpha)/2)
///     * (Gamma(n)/Gamma(n/2))^{alpha/n}.
/// Defined for alpha in (0, n] and, through the continued Gamma, for
/// alpha in (-2, 0) as needed by the fractional L2 chain.
double hls_constant(int n, double alpha);

/// Sharp logarithmic HLS constant
///   gamma_n = 1/2 log pi + (1/n) log(Gamma(n/2)/Gamma(n))
///             + 1/2 (psi(n) - psi(n/2)).
double log_hls_constant(int n);

/// Sharp logarithmic Sobolev constant
///   gamma_0 = -1/2 log pi + (1/n) log(Gamma(n)/Gamma(n/2))
///             + 1/2 (psi(1) - psi(n/2)).
double log_sobolev_constant(int n);

} // namespace ahls::specfun
