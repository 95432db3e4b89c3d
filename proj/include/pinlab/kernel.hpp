#pragma once

// Marginal kernel of the ground state: integrating out N-1 coordinates of
// |Psi|-squared leaves rho(x,y) = F(x,y) exp(-alpha (x^2+y^2) + beta x y)
// with F a symmetric polynomial of degree 2(N-1) per variable. The moment
// algebra below evaluates that integral exactly; floating point enters only
// when Gaussian moments are combined.

#include "pinlab/harmonium.hpp"
#include "pinlab/types.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <mutex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pinlab {

// (n-1)!! for even n, 0 for odd n: central moments of the standard normal.
inline long long normal_moment(int n) {
  if (n % 2 == 1) return 0;
  long long r = 1;
  for (int k = n; k > 1; k -= 2) r *= k - 1;
  return r;
}

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Signed monomial table of the squared Vandermonde determinant of m iid
// variables: sorted exponent multiset -> sum of sign products over all
// permutation pairs. Exact integers; cached per m.
inline const std::vector<std::pair<std::vector<int>, long long>>& vsq_table(int m) {
  static std::map<int, std::vector<std::pair<std::vector<int>, long long>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;

  std::vector<std::vector<int>> perms;
  std::vector<int> signs;
  {
    std::vector<int> p(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = i;
    do {
      int s = 1;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)]) s = -s;
      perms.push_back(p);
      signs.push_back(s);
    } while (std::next_permutation(p.begin(), p.end()));
  }

  std::map<std::uint64_t, long long> acc;
  std::vector<int> key(static_cast<std::size_t>(m));
  for (std::size_t a = 0; a < perms.size(); ++a) {
    for (std::size_t b = 0; b < perms.size(); ++b) {
      for (int j = 0; j < m; ++j)
        key[static_cast<std::size_t>(j)] =
            perms[a][static_cast<std::size_t>(j)] + perms[b][static_cast<std::size_t>(j)];
      std::sort(key.begin(), key.end());
      std::uint64_t packed = 0;
      for (int j = 0; j < m; ++j)
        packed = (packed << 5) | static_cast<std::uint64_t>(key[static_cast<std::size_t>(j)]);
      acc[packed] += signs[a] * signs[b];
    }
  }

  std::vector<std::pair<std::vector<int>, long long>> table;
  for (const auto& [packed, count] : acc) {
    if (count == 0) continue;
    std::vector<int> k(static_cast<std::size_t>(m));
    std::uint64_t v = packed;
    for (int j = m - 1; j >= 0; --j) {
      k[static_cast<std::size_t>(j)] = static_cast<int>(v & 31u);
      v >>= 5;
    }
    table.emplace_back(std::move(k), count);
  }
  return cache.emplace(m, std::move(table)).first->second;
}

template <class S>
struct KernelPolynomial {
  int n = 0;
  int degree = 0;  // max power per variable, 2(N-1) for the fermionic kernel
  Mat<S> f;        // (degree+1)^2 coefficients of F(x,y)
  S alpha{};
  S beta{};
};

template <class S>
S ipow(S base, int e) {
  S r = S(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

namespace detail {

// Shared implementation; with_vandermonde = false drops the antisymmetry
// polynomial entirely, leaving the bosonic Gaussian marginal.
template <class S>
KernelPolynomial<S> kernel_impl(const HarmoniumParams<S>& params,
                                bool with_vandermonde) {
  using std::abs;
  using std::exp;
  using std::sqrt;
  const int n = params.n;
  const int m = n - 1;

  const S a = exp(S(2) * params.delta);  // (l/l~)^2
  const S b = (a - S(1)) / S(n);
  const S amb = a - S(m) * b;
  if (!(a > 0) || !(amb > 0))
    throw std::runtime_error("kernel elimination lost positive-definiteness");
  const S tau2 = S(1) / (S(2) * a);
  const S tau = sqrt(tau2);
  const S sig_o = b / (S(2) * a * amb);
  const S c0 = b / (S(2) * amb);
  const S s_par = S(m) / (S(2) * amb);
  const S beta_k = b * b * s_par;
  const S alpha_k = (a - b) / S(2) - beta_k / S(2);

  // W[i][o]: coefficient of q^i p^o, where q and p stand for the symmetric
  // combinations s t and s + t of the kernel arguments before centering.
  std::vector<std::vector<S>> W(static_cast<std::size_t>(m) + 1,
                                std::vector<S>(static_cast<std::size_t>(m) + 1, S(0)));
  if (with_vandermonde) {
    for (const auto& [key, count] : vsq_table(m)) {
      std::vector<int> odds, evens;
      for (int x : key) (x % 2 == 1 ? odds : evens).push_back(x);
      const int o = static_cast<int>(odds.size());
      S fac = S(static_cast<double>(count)) * ipow(S(-1), o) * ipow(tau, o);
      for (int x : odds) fac *= S(static_cast<double>(normal_moment(x + 1)));
      // Each even exponent contributes mu_x q + tau^2 mu_{x+2}.
      std::vector<S> poly{S(1)};
      for (int x : evens) {
        std::vector<S> np(poly.size() + 1, S(0));
        const S cterm = tau2 * S(static_cast<double>(normal_moment(x + 2)));
        const S qterm = S(static_cast<double>(normal_moment(x)));
        for (std::size_t i = 0; i < poly.size(); ++i) {
          np[i] += poly[i] * cterm;
          np[i + 1] += poly[i] * qterm;
        }
        poly = std::move(np);
      }
      for (std::size_t i = 0; i < poly.size() && i <= static_cast<std::size_t>(m); ++i)
        W[i][static_cast<std::size_t>(o)] += fac * poly[i];
    }
  } else {
    W[0][0] = S(1);
  }

  // Average over the shared center w: q -> Q - w P + w^2, p -> P - 2w, with
  // E[w^j] = sig_o^(j/2) mu_j. Odd moments vanish; even powers keep the
  // expression valid on the dual branch where sig_o < 0.
  std::vector<std::vector<S>> G(static_cast<std::size_t>(m) + 1,
                                std::vector<S>(2 * static_cast<std::size_t>(m) + 1, S(0)));
  std::vector<long long> fact(static_cast<std::size_t>(m) + 1, 1);
  for (int i = 1; i <= m; ++i)
    fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i) - 1] * i;
  for (int i = 0; i <= m; ++i) {
    for (int o = 0; o <= m; ++o) {
      const S c = W[static_cast<std::size_t>(i)][static_cast<std::size_t>(o)];
      if (c == 0) continue;
      for (int i1 = 0; i1 <= i; ++i1) {
        for (int i2 = 0; i2 + i1 <= i; ++i2) {
          const int i3 = i - i1 - i2;
          const long long mult = fact[static_cast<std::size_t>(i)] /
                                 (fact[static_cast<std::size_t>(i1)] *
                                  fact[static_cast<std::size_t>(i2)] *
                                  fact[static_cast<std::size_t>(i3)]);
          for (int k = 0; k <= o; ++k) {
            const int nw = i2 + 2 * i3 + k;
            if (nw % 2 == 1) continue;
            S coeff = c * S(static_cast<double>(mult)) * ipow(S(-1), i2) *
                      S(static_cast<double>(binomial(o, k))) * ipow(S(-2), k);
            coeff *= ipow(sig_o, nw / 2) * S(static_cast<double>(normal_moment(nw)));
            G[static_cast<std::size_t>(i1)][static_cast<std::size_t>(i2 + o - k)] += coeff;
          }
        }
      }
    }
  }

  // Substitute Q = Y - c0(1-c0) X^2 and P = (1-2c0) X, where X = x + y and
  // Y = x y in the final variables.
  const S g0 = c0 * (S(1) - c0);
  std::vector<std::vector<S>> Fxy(4 * static_cast<std::size_t>(m) + 1,
                                  std::vector<S>(static_cast<std::size_t>(m) + 1, S(0)));
  for (int A = 0; A <= m; ++A) {
    for (int B = 0; B <= 2 * m; ++B) {
      const S c = G[static_cast<std::size_t>(A)][static_cast<std::size_t>(B)];
      if (c == 0) continue;
      const S pb = ipow(S(1) - S(2) * c0, B);
      for (int j = 0; j <= A; ++j) {
        Fxy[static_cast<std::size_t>(2 * j + B)][static_cast<std::size_t>(A - j)] +=
            c * S(static_cast<double>(binomial(A, j))) * ipow(-g0, j) * pb;
      }
    }
  }

  // Expand into monomials x^aa y^bb over the full grid; in exact arithmetic
  // everything above degree 2(N-1) per variable cancels.
  const int full = 4 * m;
  Mat<S> fgrid = Mat<S>::Zero(full + 1, full + 1);
  S max_term = S(0);
  for (int r = 0; r <= 4 * m; ++r) {
    for (int sy = 0; sy <= m; ++sy) {
      const S c = Fxy[static_cast<std::size_t>(r)][static_cast<std::size_t>(sy)];
      if (c == 0) continue;
      for (int axy = 0; axy <= r; ++axy) {
        const int aa = axy + sy;
        const int bb = (r - axy) + sy;
        const S term = c * S(static_cast<double>(binomial(r, axy)));
        fgrid(aa, bb) += term;
        if (abs(term) > max_term) max_term = abs(term);
      }
    }
  }

  const int degree = with_vandermonde ? 2 * m : 0;
  const S cleanup_tol = S(4096) * scalar_eps<S>() * (max_term + S(1));
  KernelPolynomial<S> out;
  out.n = n;
  out.degree = degree;
  out.alpha = alpha_k;
  out.beta = beta_k;
  out.f = Mat<S>::Zero(degree + 1, degree + 1);
  for (int aa = 0; aa <= full; ++aa) {
    for (int bb = 0; bb <= full; ++bb) {
      const S v = fgrid(aa, bb);
      const bool in_range = aa <= degree && bb <= degree && (aa + bb) % 2 == 0;
      if (in_range) {
        out.f(aa, bb) = v;
      } else if (abs(v) > cleanup_tol) {
        throw std::runtime_error("kernel expansion lost precision: residue off the degree/parity lattice");
      }
    }
  }
  // Enforce the exact symmetry so downstream zeros are exact.
  for (int aa = 0; aa <= degree; ++aa) {
    for (int bb = aa + 1; bb <= degree; ++bb) {
      if (abs(out.f(aa, bb) - out.f(bb, aa)) > cleanup_tol)
        throw std::runtime_error("kernel expansion lost precision: asymmetric coefficients");
      const S avg = (out.f(aa, bb) + out.f(bb, aa)) / S(2);
      out.f(aa, bb) = avg;
      out.f(bb, aa) = avg;
    }
  }

  // Normalize so that trace rho = integral of F(x,x) e^{-(2 alpha - beta) x^2}
  // equals the particle count.
  const S gam = S(2) * alpha_k - beta_k;
  if (!(gam > 0)) throw std::runtime_error("kernel trace Gaussian not integrable");
  const S pi = boost::math::constants::pi<S>();
  S tr = S(0);
  for (int aa = 0; aa <= degree; ++aa) {
    for (int bb = 0; bb <= degree; ++bb) {
      const S c = out.f(aa, bb);
      if (c == 0) continue;
      const int k2 = aa + bb;
      if (k2 % 2 == 1) continue;
      tr += c * S(static_cast<double>(normal_moment(k2))) / ipow(S(2) * gam, k2 / 2) *
            sqrt(pi / gam);
    }
  }
  if (!(tr > 0)) throw std::runtime_error("kernel trace not positive");
  out.f *= S(n) / tr;
  return out;
}

}  // namespace detail

template <class S>
KernelPolynomial<S> marginal_kernel(const HarmoniumParams<S>& params) {
  if (params.n < 2) throw std::invalid_argument("kernel needs at least 2 particles");
  return detail::kernel_impl(params, true);
}

// Reference variant without the antisymmetry polynomial; its spectrum must
// come out exactly geometric, which pins down alpha, beta, L, and q jointly.
template <class S>
KernelPolynomial<S> marginal_kernel_bosonic(const HarmoniumParams<S>& params) {
  if (params.n < 2) throw std::invalid_argument("kernel needs at least 2 particles");
  return detail::kernel_impl(params, false);
}

// Mehler parameters of the Gaussian factor: basis scale L and decay q with
// exp(-alpha(x^2+y^2) + beta x y) proportional to the q-weighted projector
// series over Hermite functions of scale L.
template <class S>
std::pair<S, S> mehler_q_scale(const S& alpha, const S& beta) {
  using std::pow;
  const S disc = S(4) * alpha * alpha - beta * beta;
  if (!(disc > 0)) throw std::runtime_error("kernel Gaussian is not a trace-class Mehler form");
  const S L = pow(disc, S(-0.25));
  const S V = (S(2) * alpha + beta) * L * L;
  return {(V - S(1)) / (V + S(1)), L};
}

}  // namespace pinlab
