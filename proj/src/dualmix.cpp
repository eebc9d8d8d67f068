#include "ahls/dualmix.hpp"

#include <cmath>
#include <stdexcept>

namespace ahls::dualmix {

namespace {

void check_shared_rule(const bodies::StarBody& K, const bodies::StarBody& L) {
  if (!K.quad || !L.quad)
    throw std::invalid_argument("dual mixed volume: missing quadrature");
  if (K.quad == L.quad) return;
  if (K.quad->n != L.quad->n || K.quad->size() != L.quad->size())
    throw std::invalid_argument("dual mixed volume: quadrature mismatch");
  for (std::size_t i = 0; i < K.quad->size(); ++i)
    for (int d = 0; d < K.quad->n; ++d)
      if (std::fabs(K.quad->nodes[i][d] - L.quad->nodes[i][d]) > 1e-12)
        throw std::invalid_argument("dual mixed volume: quadrature mismatch");
}

} // namespace

double dual_mixed_volume(const bodies::StarBody& K, const bodies::StarBody& L,
                         double alpha) {
  check_shared_rule(K, L);
  const int n = K.quad->n;
  if (alpha == 0.0 || alpha == double(n))
    throw std::domain_error("dual_mixed_volume: alpha not in {0, n}");
  double acc = 0.0;
  for (std::size_t i = 0; i < K.rho.size(); ++i) {
    if (K.degenerate[i] || L.degenerate[i]) continue;
    acc += K.quad->weights[i] * std::pow(K.rho[i], double(n) - alpha) *
           std::pow(L.rho[i], alpha);
  }
  return acc / n;
}

double dual_mixed_volume_log(const bodies::StarBody& K,
                             const bodies::StarBody& L) {
  check_shared_rule(K, L);
  const int n = K.quad->n;
  double acc = 0.0;
  double volK = 0.0;
  for (std::size_t i = 0; i < K.rho.size(); ++i) {
    if (K.degenerate[i] || L.degenerate[i])
      throw std::domain_error("dual_mixed_volume_log: nonpositive rho");
    if (!(K.rho[i] > 0.0) || !(L.rho[i] > 0.0))
      throw std::domain_error("dual_mixed_volume_log: nonpositive rho");
    const double kn = std::pow(K.rho[i], double(n));
    acc += K.quad->weights[i] * kn * std::log(L.rho[i] / K.rho[i]);
    volK += K.quad->weights[i] * kn;
  }
  return acc / volK; // = (1/(n|K|)) integral, since volK = n|K|
}

} // namespace ahls::dualmix
