#pragma once

#include "ahls/bodies.hpp"

namespace ahls::dualmix {

/// Dual mixed volume V~_alpha(K, L) = (1/n) sum w_i rho_K^{n-alpha} rho_L^alpha
/// for alpha not in {0, n}.  K and L must share a quadrature rule.
double dual_mixed_volume(const bodies::StarBody& K, const bodies::StarBody& L,
                         double alpha);

/// Logarithmic dual mixed volume
///   V~_log(K, L) = (1/(n|K|)) sum w_i rho_K^n log(rho_L / rho_K),
/// the orientation fixed by the limit
///   V~_log(K, L) = lim_{alpha->0} (1/alpha) log(V~_alpha(K,L)/|K|)
/// and by V~_log(K, L) <= (1/n) log(|L|/|K|) with equality for dilates.
double dual_mixed_volume_log(const bodies::StarBody& K,
                             const bodies::StarBody& L);

} // namespace ahls::dualmix
