#pragma once

// Weak-coupling asymptotics: polynomial least squares on sampled curves to
// identify leading exponents and coefficients, plus log-log slope fits.

#include "pinlab/scalar.hpp"
#include "pinlab/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pinlab {

struct FitResult {
  int exponent = 0;          // leading power with a non-negligible coefficient
  double coefficient = 0;    // its coefficient in the original variable
  double residual = 0;       // max |fit - sample| over the grid
  std::vector<int> orders;   // basis powers used
  std::vector<double> coefficients;  // per-order coefficients, same index
};

// Least-squares fit of value ~= sum_p c_p x^p over the requested powers.
// Conditioning is kept in check by rescaling x to x/x_max before solving, so
// each solved coefficient is that order's contribution at the largest sample;
// a coefficient is treated as zero when it is 1e-3 times smaller than the
// largest higher-order contribution.
template <class S>
FitResult fit_leading(const std::vector<std::pair<S, S>>& samples,
                      int max_order, bool even_only = true) {
  std::vector<int> orders;
  for (int p = 0; p <= max_order; p += even_only ? 2 : 1) orders.push_back(p);
  const int terms = static_cast<int>(orders.size());
  const int n = static_cast<int>(samples.size());
  if (n < terms + 1)
    throw std::invalid_argument("fit needs at least " +
                                std::to_string(terms + 1) + " samples");
  std::set<double> seen;
  S xmax = S(0);
  for (const auto& [x, y] : samples) {
    if (!(x > 0)) throw std::invalid_argument("fit samples must be positive");
    if (!seen.insert(to_double(x)).second)
      throw std::invalid_argument("fit samples must be distinct");
    if (x > xmax) xmax = x;
  }

  Mat<S> a(n, terms);
  Vec<S> b(n);
  for (int i = 0; i < n; ++i) {
    const S u = samples[static_cast<std::size_t>(i)].first / xmax;
    for (int j = 0; j < terms; ++j) {
      S pw = S(1);
      for (int k = 0; k < orders[static_cast<std::size_t>(j)]; ++k) pw *= u;
      a(i, j) = pw;
    }
    b[i] = samples[static_cast<std::size_t>(i)].second;
  }
  Vec<S> c = a.colPivHouseholderQr().solve(b);

  FitResult out;
  out.orders = orders;
  std::vector<double> contrib(static_cast<std::size_t>(terms));
  for (int j = 0; j < terms; ++j)
    contrib[static_cast<std::size_t>(j)] = std::abs(to_double(c[j]));
  for (int j = 0; j < terms; ++j) {
    S scale = S(1);
    for (int k = 0; k < orders[static_cast<std::size_t>(j)]; ++k)
      scale *= xmax;
    out.coefficients.push_back(to_double(c[j] / scale));
  }
  int lead = -1;
  for (int j = 0; j < terms && lead < 0; ++j) {
    double higher = 0;
    for (int k = j + 1; k < terms; ++k)
      if (contrib[static_cast<std::size_t>(k)] > higher)
        higher = contrib[static_cast<std::size_t>(k)];
    if (contrib[static_cast<std::size_t>(j)] >= 1e-3 * higher) lead = j;
  }
  if (lead < 0) {
    out.exponent = 0;
    out.coefficient = 0;
  } else {
    out.exponent = orders[static_cast<std::size_t>(lead)];
    out.coefficient = out.coefficients[static_cast<std::size_t>(lead)];
  }
  Vec<S> r = a * c - b;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    worst = std::max(worst, std::abs(to_double(r[i])));
  out.residual = worst;
  return out;
}

// Log-log slope of y against x, by ordinary least squares.
template <class S>
double scaling_exponent(const std::vector<std::pair<S, S>>& samples) {
  const int n = static_cast<int>(samples.size());
  if (n < 2) throw std::invalid_argument("slope fit needs two samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : samples) {
    if (!(x > 0) || !(y > 0))
      throw std::invalid_argument("slope fit samples must be positive");
    const double lx = std::log(to_double(x));
    const double ly = std::log(to_double(y));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("slope fit grid is degenerate");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace pinlab
