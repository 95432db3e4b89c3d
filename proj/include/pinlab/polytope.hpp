#pragma once

// Quasipinning measures on occupation spectra: constraint values, facet
// distances, Pauli-simplex diagnostics, the truncation engine with its
// additive error budget, and the support-restricted Q surrogate.

#include "pinlab/gpc.hpp"
#include "pinlab/spectrum.hpp"
#include "pinlab/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pinlab {

struct TruncationPlan {
  int r = 0;  // leading occupations fixed to 1
  int s = 0;  // trailing occupations dropped as 0
  Setting target{1, 1};
  double error_bound = 0;  // conservative additive budget, includes the tail
};

template <class S>
struct PinningReport {
  Setting setting{1, 1};
  std::vector<std::pair<std::string, S>> d_values;
  S d_min_value{};
  std::string argmin_label;
  std::vector<std::pair<std::string, double>> q_values;
  double q_overall = 0;
  TruncationPlan plan;
  S hf_distance_value{};
  std::string verdict;
};

struct SimplexCheckReport {
  bool pass = true;
  std::vector<std::string> violations;
};

template <class S>
S evaluate(const GpcConstraint& c, const OccupationSpectrum<S>& spec) {
  return evaluate_constraint(c, spec.values);
}

// l1 distance to the constraint's hyperplane is twice the constraint value.
template <class S>
S l1_plane_distance(const GpcConstraint& c, const OccupationSpectrum<S>& spec) {
  using std::abs;
  return S(2) * abs(evaluate(c, spec));
}

// Minimum over the proper (non-structural) constraints, first label on ties.
template <class S>
std::pair<S, std::string> d_min(const GpcCatalog& catalog,
                                const OccupationSpectrum<S>& spec) {
  bool found = false;
  S best{};
  std::string label;
  for (const auto& c : catalog.constraints) {
    if (c.structural) continue;
    const S v = evaluate(c, spec);
    if (!found || v < best) {
      found = true;
      best = v;
      label = c.label;
    }
  }
  if (!found)
    throw std::invalid_argument("catalog has no proper inequality constraints");
  return {best, label};
}

// Default membership tolerance, scaled with the scalar's resolution so that
// tighter precisions tighten the check.
template <class S>
double default_simplex_tol() {
  return 1e-10 * to_double(scalar_eps<S>()) / 2.220446049250313e-16;
}

template <class S>
SimplexCheckReport pauli_simplex_check(const OccupationSpectrum<S>& spec,
                                       double tol) {
  SimplexCheckReport rep;
  const int d = static_cast<int>(spec.values.size());
  S sum = S(0);
  for (int i = 0; i < d; ++i) {
    const double v = to_double(spec.values[i]);
    if (v < -tol)
      rep.violations.push_back("lambda_" + std::to_string(i + 1) + " below 0");
    if (v > 1 + tol)
      rep.violations.push_back("lambda_" + std::to_string(i + 1) + " above 1");
    if (i + 1 < d && to_double(spec.values[i + 1]) - v > tol)
      rep.violations.push_back("ordering violated at index " + std::to_string(i + 1));
    sum += spec.values[i];
  }
  const double gap = std::abs(to_double(sum) - spec.n_particles);
  if (gap > spec.tail_bound + tol)
    rep.violations.push_back("normalization off by " + std::to_string(gap));
  rep.pass = rep.violations.empty();
  return rep;
}

// l1 distance to the Hartree-Fock vertex (1,...,1,0,...).
template <class S>
S hf_distance(const OccupationSpectrum<S>& spec) {
  const int d = static_cast<int>(spec.values.size());
  if (d < spec.n_particles)
    throw std::invalid_argument("spectrum shorter than its particle number");
  S acc = S(0);
  for (int i = 0; i < spec.n_particles; ++i) acc += S(1) - spec.values[i];
  for (int i = spec.n_particles; i < d; ++i) acc += spec.values[i];
  return acc;
}

// Drops r leading values as exact 1s and s trailing values as exact 0s,
// without renormalizing; the discrepancy goes into the additive error bound.
template <class S>
std::pair<OccupationSpectrum<S>, TruncationPlan> truncate(
    const OccupationSpectrum<S>& spec, const Setting& target) {
  const int d = static_cast<int>(spec.values.size());
  const int r = spec.n_particles - target.particles;
  const int s = d - r - target.dim;
  if (r < 0 || s < 0)
    throw std::invalid_argument("spectrum cannot be truncated to setting " +
                                target.str());
  S err = S(0);
  for (int i = 0; i < r; ++i) err += S(1) - spec.values[i];
  for (int i = r + target.dim; i < d; ++i) err += spec.values[i];

  TruncationPlan plan;
  plan.r = r;
  plan.s = s;
  plan.target = target;
  plan.error_bound = to_double(err) + spec.tail_bound;

  OccupationSpectrum<S> out;
  out.values = spec.values.segment(r, target.dim);
  out.n_particles = target.particles;
  out.tail_bound = plan.error_bound;
  out.precision_bits = spec.precision_bits;
  return {std::move(out), plan};
}

// Support-restricted surrogate: each constraint's quasipinning is compared
// against the Pauli exclusion slack min(lambda_i, 1 - lambda_i) over the
// indices the constraint actually touches. Exactly pinned constraints get a
// +infinity sentinel.
template <class S>
std::pair<std::vector<std::pair<std::string, double>>, double> q_parameter(
    const GpcCatalog& catalog, const OccupationSpectrum<S>& spec) {
  using std::abs;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::string, double>> qs;
  double best_pos = -inf;
  bool any_pos = false;
  double best_nonzero = -inf;
  bool any_nonzero = false;
  bool any_pinned = false;
  for (const auto& c : catalog.constraints) {
    if (c.structural) continue;
    const S dval = evaluate(c, spec);
    S ximin = S(1);
    for (int i = 0; i < c.dim(); ++i) {
      if (c.coeffs[static_cast<std::size_t>(i)] == 0) continue;
      S xi = spec.values[i] < S(1) - spec.values[i] ? spec.values[i]
                                                    : S(1) - spec.values[i];
      if (xi < 0) xi = S(0);
      if (xi < ximin) ximin = xi;
    }
    double qj;
    if (dval == 0) {
      qj = inf;
      any_pinned = true;
    } else if (ximin == 0) {
      qj = -inf;
    } else {
      qj = std::log10(to_double(ximin / abs(dval)));
    }
    qs.emplace_back(c.label, qj);
    if (dval > 0) {
      any_pos = true;
      if (qj > best_pos) best_pos = qj;
    }
    if (dval != 0) {
      any_nonzero = true;
      if (qj > best_nonzero) best_nonzero = qj;
    }
  }
  double overall;
  if (any_pos)
    overall = best_pos;
  else if (any_nonzero)
    overall = best_nonzero;
  else
    overall = any_pinned ? inf : -inf;
  return {std::move(qs), overall};
}

// Orchestration: truncate, evaluate everything, attach the error budget and
// a verdict on whether this setting can decide quasipinning at all.
template <class S>
PinningReport<S> pinning_report(const GpcCatalog& catalog,
                                const OccupationSpectrum<S>& spec,
                                const Setting& target) {
  if (!(catalog.setting == target))
    throw std::invalid_argument("catalog setting does not match target");
  auto [small, plan] = truncate(spec, target);

  PinningReport<S> rep;
  rep.setting = target;
  rep.plan = plan;
  for (const auto& c : catalog.constraints)
    rep.d_values.emplace_back(c.label, evaluate(c, small));
  auto [dm, label] = d_min(catalog, small);
  rep.d_min_value = dm;
  rep.argmin_label = label;
  auto [qs, overall] = q_parameter(catalog, small);
  rep.q_values = std::move(qs);
  rep.q_overall = overall;
  rep.hf_distance_value = hf_distance(spec);
  rep.verdict = plan.error_bound <= 0.1 * std::abs(to_double(dm))
                    ? "conclusive"
                    : "inconclusive at this setting";
  return rep;
}

}  // namespace pinlab
