#pragma once

// Natural occupation numbers: parity-blocked eigensolve of the truncated
// matrix, negative round-off control, and the geometric tail bound that
// fixes the truncation dimension R.

#include "pinlab/harmonium.hpp"
#include "pinlab/kernel.hpp"
#include "pinlab/rdm.hpp"
#include "pinlab/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pinlab {

struct SpectrumRequest {
  double target_tail = 1e-12;  // required l1 bound on omitted occupations
  int max_R = 400;
  int precision_bits = 53;
};

template <class S>
struct OccupationSpectrum {
  Vec<S> values;  // decreasing
  int n_particles = 0;
  double tail_bound = 0;  // l1 bound on everything beyond values
  int precision_bits = 53;
};

// Smallest R with (N / (1-q)) q^(R+1) below the tail target, clamped from
// below so the matrix always contains the full band structure.
template <class S>
int choose_R(const HarmoniumParams<S>& params, double target_tail,
             int max_R = 400) {
  if (!(target_tail > 0))
    throw std::invalid_argument("target_tail must be positive");
  const double q = to_double(params.q);
  const int clamp = params.n + 4 * (params.n - 1);
  int r = 0;
  double tail = params.n / (1.0 - q) * q;
  while (tail >= target_tail) {
    ++r;
    tail *= q;
    if (r > max_R)
      throw std::runtime_error("tail target unreachable below max_R");
  }
  const int chosen = std::max(r, clamp);
  if (chosen > max_R)
    throw std::runtime_error("required matrix dimension exceeds max_R");
  return chosen;
}

namespace detail {

template <class S>
Vec<S> parity_block_eigenvalues(const Mat<S>& rho) {
  const int R = static_cast<int>(rho.rows());
  Vec<S> all(R);
  int pos = 0;
  for (int par = 0; par <= 1; ++par) {
    std::vector<int> idx;
    for (int i = par; i < R; i += 2) idx.push_back(i);
    const int b = static_cast<int>(idx.size());
    if (b == 0) continue;
    Mat<S> blk(b, b);
    for (int i = 0; i < b; ++i)
      for (int j = 0; j < b; ++j)
        blk(i, j) = rho(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Mat<S>> es(blk);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolve failed on a parity block");
    for (int i = 0; i < b; ++i) all[pos++] = es.eigenvalues()[i];
  }
  std::sort(all.data(), all.data() + R, std::greater<S>());
  return all;
}

template <class S>
Vec<S> clipped_eigenvalues(const RdmMatrix<S>& m) {
  Vec<S> vals = parity_block_eigenvalues(m.rho);
  const S thr = S(10) * m.element_error_bound;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] < 0) {
      if (-vals[i] <= thr) {
        vals[i] = S(0);
      } else {
        throw std::runtime_error(
            "negative eigenvalue beyond round-off tolerance; matrix assembly is broken");
      }
    }
  }
  return vals;
}

template <class S>
struct ConvergenceProbe {
  RdmMatrix<S> bigger;  // assembled at R + 4, reusable for escalation
  Vec<S> bigger_vals;
  S diff{};         // l1 gap between the R and R + 4 spectra
  double budget = 0;  // tail target plus eigensolve round-off allowance
};

template <class S>
ConvergenceProbe<S> probe_convergence(const Vec<S>& vals,
                                      const RdmMatrix<S>& matrix,
                                      const KernelPolynomial<S>& kernel,
                                      const HarmoniumParams<S>& params,
                                      const SpectrumRequest& req) {
  using std::abs;
  const int R = static_cast<int>(vals.size());
  ConvergenceProbe<S> out;
  out.bigger = matrix_elements(kernel, params, R + 4);
  out.bigger_vals = clipped_eigenvalues(out.bigger);
  S diff = S(0);
  for (int i = 0; i < R; ++i) diff += abs(vals[i] - out.bigger_vals[i]);
  for (int i = R; i < R + 4; ++i) diff += out.bigger_vals[i];
  out.diff = diff;
  // Round-off in the two eigensolves is not part of the geometric tail; give
  // it its own allowance on top of the requested target.
  out.budget =
      req.target_tail + 10.0 * (R + 4) * to_double(matrix.element_error_bound);
  return out;
}

// The geometric tail model has no prefactor, so the measured R vs R+4 gap
// backs it up: the remaining mass beyond R is bounded by gap summed over all
// further doublings, a geometric series with ratio q^4.
template <class S>
OccupationSpectrum<S> package_spectrum(Vec<S> vals, const RdmMatrix<S>& matrix,
                                       const HarmoniumParams<S>& params,
                                       const SpectrumRequest& req,
                                       const S& diff) {
  const int R = static_cast<int>(vals.size());
  OccupationSpectrum<S> out;
  out.values = std::move(vals);
  out.n_particles = params.n;
  const double q = to_double(params.q);
  double tail = params.n / (1.0 - q);
  for (int i = 0; i <= R; ++i) tail *= q;
  const double q4 = q * q * q * q;
  const double measured = to_double(diff) / (1.0 - q4);
  out.tail_bound = std::max(tail, measured) +
                   10.0 * R * to_double(matrix.element_error_bound);
  out.precision_bits = req.precision_bits;
  return out;
}

}  // namespace detail

// Diagonalizes the assembled matrix and verifies convergence by re-solving
// four dimensions higher; the two spectra must agree in l1 within the tail
// target at this fixed R.
template <class S>
OccupationSpectrum<S> eigen_spectrum(const RdmMatrix<S>& matrix,
                                     const KernelPolynomial<S>& kernel,
                                     const HarmoniumParams<S>& params,
                                     const SpectrumRequest& req) {
  Vec<S> vals = detail::clipped_eigenvalues(matrix);
  const auto probe = detail::probe_convergence(vals, matrix, kernel, params, req);
  if (to_double(probe.diff) > probe.budget)
    throw std::runtime_error("spectrum not converged: R and R+4 disagree beyond the tail target");
  return detail::package_spectrum(std::move(vals), matrix, params, req,
                                  probe.diff);
}

// Full pipeline for one parameter point. The geometric window estimate lacks
// the spectrum's prefactor and can start too small, so the window grows by
// four until the cross-check closes, reusing each probe's larger solve.
template <class S>
OccupationSpectrum<S> solve_nons(const HarmoniumParams<S>& params,
                                 const SpectrumRequest& req) {
  const KernelPolynomial<S> kern = marginal_kernel(params);
  int R = choose_R(params, req.target_tail, req.max_R);
  RdmMatrix<S> mat = matrix_elements(kern, params, R);
  Vec<S> vals = detail::clipped_eigenvalues(mat);
  for (;;) {
    auto probe = detail::probe_convergence(vals, mat, kern, params, req);
    if (to_double(probe.diff) <= probe.budget)
      return detail::package_spectrum(std::move(vals), mat, params, req,
                                      probe.diff);
    if (R + 8 > req.max_R)
      throw std::runtime_error(
          "spectrum not converged below max_R: R and R+4 disagree beyond the tail target");
    R += 4;
    mat = std::move(probe.bigger);
    vals = std::move(probe.bigger_vals);
  }
}

}  // namespace pinlab
