#pragma once

// Matrix elements of the marginal kernel in the Hermite-function basis of
// scale L. The Gaussian factor is expanded through its Mehler series, so an
// entry is a finite sum over ladder-operator matrix elements of monomials;
// band and parity zeros hold exactly by construction.

#include "pinlab/harmonium.hpp"
#include "pinlab/kernel.hpp"
#include "pinlab/types.hpp"

#include <Eigen/Eigenvalues>

#include <stdexcept>
#include <vector>

namespace pinlab {

template <class S>
struct RdmMatrix {
  Mat<S> rho;
  int n = 0;          // trace target
  int bandwidth = 0;  // 2(N-1)
  S element_error_bound{};
};

// Matrices of <k| xi^a |mu> for a = 0..amax on a square window of size
// dim + amax + 1, from the ladder recurrence
// xi |j> = sqrt(j/2) |j-1> + sqrt((j+1)/2) |j+1>.
template <class S>
std::vector<Mat<S>> ladder_powers(int amax, int dim) {
  using std::sqrt;
  const int sz = dim + amax + 1;
  std::vector<Mat<S>> xs;
  xs.reserve(static_cast<std::size_t>(amax) + 1);
  xs.push_back(Mat<S>::Identity(sz, sz));
  for (int a = 0; a < amax; ++a) {
    const Mat<S>& prev = xs.back();
    Mat<S> next = Mat<S>::Zero(sz, sz);
    for (int mu = 0; mu < sz; ++mu) {
      for (int i = 0; i < sz; ++i) {
        const S v = prev(i, mu);
        if (v == 0) continue;
        if (i + 1 < sz) next(i + 1, mu) += sqrt(S(i + 1) / S(2)) * v;
        if (i - 1 >= 0) next(i - 1, mu) += sqrt(S(i) / S(2)) * v;
      }
    }
    xs.push_back(std::move(next));
  }
  return xs;
}

template <class S>
RdmMatrix<S> matrix_elements(const KernelPolynomial<S>& kernel,
                             const HarmoniumParams<S>& params, int R) {
  using std::abs;
  using std::sqrt;
  const int dmax = kernel.degree;
  const int band = 2 * (params.n - 1);
  if (R < params.n || R < dmax + 1)
    throw std::invalid_argument("matrix dimension R too small for the bandwidth");

  const auto [q, L] = mehler_q_scale(kernel.alpha, kernel.beta);
  const auto xs = ladder_powers<S>(dmax, R + dmax);

  std::vector<S> qpow(static_cast<std::size_t>(R + dmax) + 1);
  qpow[0] = S(1);
  for (std::size_t i = 1; i < qpow.size(); ++i) qpow[i] = qpow[i - 1] * q;
  std::vector<S> lpow(static_cast<std::size_t>(2 * dmax) + 1);
  lpow[0] = S(1);
  for (std::size_t i = 1; i < lpow.size(); ++i) lpow[i] = lpow[i - 1] * L;

  const S pi = boost::math::constants::pi<S>();
  const S pref = L * sqrt(pi * (S(1) - q * q));

  RdmMatrix<S> out;
  out.n = params.n;
  out.bandwidth = band;
  out.rho = Mat<S>::Zero(R, R);
  S max_abs_acc = S(0);
  for (int k = 0; k < R; ++k) {
    for (int n2 = k; n2 < R; ++n2) {
      if ((k + n2) % 2 == 1) continue;
      if (n2 - k > dmax) continue;
      S val = S(0);
      S absval = S(0);
      for (int aa = 0; aa <= dmax; ++aa) {
        for (int bb = 0; bb <= dmax; ++bb) {
          const S c = kernel.f(aa, bb);
          if (c == 0) continue;
          const int lo = std::max({0, k - aa, n2 - bb});
          const int hi = std::min(k + aa, n2 + bb);
          S ssum = S(0);
          S asum = S(0);
          for (int mu = lo; mu <= hi; ++mu) {
            const S t = qpow[static_cast<std::size_t>(mu)] * xs[static_cast<std::size_t>(aa)](k, mu) *
                        xs[static_cast<std::size_t>(bb)](mu, n2);
            ssum += t;
            asum += abs(t);
          }
          val += c * lpow[static_cast<std::size_t>(aa + bb)] * ssum;
          absval += abs(c) * lpow[static_cast<std::size_t>(aa + bb)] * asum;
        }
      }
      out.rho(k, n2) = pref * val;
      out.rho(n2, k) = out.rho(k, n2);
      if (absval > max_abs_acc) max_abs_acc = absval;
    }
  }
  const S nterms = S((dmax + 1) * (dmax + 1) * (2 * dmax + 1));
  out.element_error_bound = nterms * scalar_eps<S>() * pref * max_abs_acc;
  return out;
}

// Gauss-Hermite nodes and weights for weight exp(-t^2), by diagonalizing the
// Jacobi matrix of the Hermite recurrence.
template <class S>
std::pair<Vec<S>, Vec<S>> gauss_hermite(int m) {
  using std::sqrt;
  Mat<S> jac = Mat<S>::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) {
    const S off = sqrt(S(i + 1) / S(2));
    jac(i, i + 1) = off;
    jac(i + 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Mat<S>> es(jac);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Gauss-Hermite node computation failed");
  const S pi = boost::math::constants::pi<S>();
  Vec<S> nodes = es.eigenvalues();
  Vec<S> weights(m);
  for (int j = 0; j < m; ++j) {
    const S v0 = es.eigenvectors()(0, j);
    weights[j] = sqrt(pi) * v0 * v0;
  }
  return {std::move(nodes), std::move(weights)};
}

namespace detail {

// Hermite functions with the Gaussian stripped: psi_j(xi) = phi_j(xi)
// e^{xi^2/2}, evaluated for all j <= jmax.
template <class S>
std::vector<S> hermite_bare(int jmax, const S& xi, const S& pi) {
  using std::pow;
  using std::sqrt;
  std::vector<S> psi(static_cast<std::size_t>(jmax) + 1);
  psi[0] = pow(pi, S(-0.25));
  if (jmax >= 1) psi[1] = sqrt(S(2)) * xi * psi[0];
  for (int j = 1; j < jmax; ++j) {
    psi[static_cast<std::size_t>(j) + 1] =
        sqrt(S(2) / S(j + 1)) * xi * psi[static_cast<std::size_t>(j)] -
        sqrt(S(j) / S(j + 1)) * psi[static_cast<std::size_t>(j) - 1];
  }
  return psi;
}

template <class S>
S quadrature_pass(const KernelPolynomial<S>& kernel, const S& L, const S& g1,
                  const S& g2, int k, int n, int m) {
  using std::sqrt;
  const S pi = boost::math::constants::pi<S>();
  const auto [t, w] = gauss_hermite<S>(m);
  const S s1 = S(1) / sqrt(g1);
  const S s2 = S(1) / sqrt(g2);
  const S r2 = sqrt(S(2));
  S acc = S(0);
  for (int i = 0; i < m; ++i) {
    const S w1 = t[i] * s1;
    for (int j = 0; j < m; ++j) {
      const S w2 = t[j] * s2;
      const S x = (w1 + w2) / r2;
      const S y = (w1 - w2) / r2;
      S fxy = S(0);
      {
        // Horner over y inside x powers.
        S xp = S(1);
        for (int aa = 0; aa <= kernel.degree; ++aa) {
          S row = S(0);
          for (int bb = kernel.degree; bb >= 0; --bb) row = row * y + kernel.f(aa, bb);
          fxy += xp * row;
          xp *= x;
        }
      }
      const auto pk = hermite_bare(k, S(x / L), pi);
      const auto pn = hermite_bare(n, S(y / L), pi);
      acc += w[i] * w[j] * pk[static_cast<std::size_t>(k)] *
             pn[static_cast<std::size_t>(n)] * fxy;
    }
  }
  return acc / (L * sqrt(g1 * g2));
}

}  // namespace detail

// Independent evaluation of a single matrix element by two-dimensional
// quadrature against the explicit kernel, refined until two successive node
// counts agree within abs_tol.
template <class S>
S quadrature_oracle(const KernelPolynomial<S>& kernel,
                    const HarmoniumParams<S>& params, int k, int n,
                    const S& abs_tol) {
  if (k < 0 || n < 0) throw std::invalid_argument("negative basis index");
  const auto [q, L] = mehler_q_scale(kernel.alpha, kernel.beta);
  (void)q;
  const S inv2l2 = S(1) / (S(2) * L * L);
  const S g1 = kernel.alpha - kernel.beta / S(2) + inv2l2;
  const S g2 = kernel.alpha + kernel.beta / S(2) + inv2l2;
  if (!(g1 > 0) || !(g2 > 0))
    throw std::runtime_error("quadrature weight is not integrable");

  int m = std::max(8, (k + n + 4 * (params.n - 1)) / 2 + 2);
  S prev = detail::quadrature_pass(kernel, L, g1, g2, k, n, m);
  for (int iter = 0; iter < 40; ++iter) {
    m += 8;
    if (m > 400) break;
    const S cur = detail::quadrature_pass(kernel, L, g1, g2, k, n, m);
    using std::abs;
    if (abs(cur - prev) <= abs_tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("quadrature did not converge at maximum node count");
}

}  // namespace pinlab
