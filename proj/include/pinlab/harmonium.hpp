#pragma once

// Model parameters of N harmonically coupled fermions in a harmonic trap.
// Natural units throughout: hbar = m = omega = 1, so the trap length l = 1
// and every derived length is measured in units of l.

#include "pinlab/types.hpp"

#include <stdexcept>
#include <vector>

namespace pinlab {

template <class S>
struct HarmoniumParams {
  int n = 0;        // particle count
  S kappa{};        // dimensionless coupling; negative only on the dual branch
  S delta{};        // ln(1 + kappa) / 4
  S scale_ratio{};  // l / l~ = e^delta
  S q{};            // geometric decay factor, in [0, 1)
  S basis_scale{};  // L, the natural scale of the one-particle basis
};

// L^4 = (a + N - 1) / (a ((N-1) a + 1)) with a = (l/l~)^2. Symmetric under
// a -> 1/a, which is the duality of the spectrum.
template <class S>
S basis_scale_from(int n, const S& a) {
  using std::pow;
  const S num = a + S(n - 1);
  const S den = a * (S(n - 1) * a + S(1));
  return pow(num / den, S(0.25));
}

template <class S>
HarmoniumParams<S> params_from_delta(int n, const S& delta) {
  using std::exp;
  using std::sinh;
  using std::sqrt;
  if (n < 2) throw std::invalid_argument("harmonium needs at least 2 particles");
  HarmoniumParams<S> p;
  p.n = n;
  p.delta = delta;
  p.scale_ratio = exp(delta);
  p.kappa = exp(S(4) * delta) - S(1);
  const S sh = sinh(delta);
  // Decay factor of the geometric occupation hierarchy. Even in delta, so
  // dual parameter pairs share one q.
  p.q = S(1) - S(2 * n) / (S(n) + sqrt(S(n) * S(n) + S(4 * (n - 1)) * sh * sh));
  const S a = exp(S(2) * delta);
  p.basis_scale = basis_scale_from(n, a);
  return p;
}

template <class S>
HarmoniumParams<S> params_from_kappa(int n, const S& kappa) {
  using std::log;
  if (kappa < 0)
    throw std::domain_error("repulsive coupling (kappa < 0) is out of scope");
  if (n < 2) throw std::invalid_argument("harmonium needs at least 2 particles");
  return params_from_delta(n, log(S(1) + kappa) / S(4));
}

// Same spectrum, inverted length ratio.
template <class S>
HarmoniumParams<S> duality_pair(const HarmoniumParams<S>& p) {
  return params_from_delta(p.n, S(-p.delta));
}

// Leading terms of q as kappa -> 0: ((N-1) / (16 N^2)) (kappa^2 - kappa^3).
// Cross-check oracle only; validity documented for kappa <~ 0.3.
template <class S>
S q_weak_expansion(int n, const S& kappa) {
  if (n < 2) throw std::invalid_argument("harmonium needs at least 2 particles");
  const S pref = S(n - 1) / (S(16) * S(n) * S(n));
  return pref * (kappa * kappa - kappa * kappa * kappa);
}

// Occupations of the bosonic reference system: N (1-q) q^k, k = 0..k_max.
template <class S>
std::vector<S> bosonic_spectrum(const HarmoniumParams<S>& p, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(k_max) + 1);
  S w = S(p.n) * (S(1) - p.q);
  for (int k = 0; k <= k_max; ++k) {
    out.push_back(w);
    w *= p.q;
  }
  return out;
}

}  // namespace pinlab
