#include "pinlab/gpc.hpp"

#include "pinlab/simplex.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pinlab {
namespace {

using json = nlohmann::json;

GpcConstraint make(const char* label, std::int64_t kappa0,
                   std::initializer_list<std::int64_t> coeffs,
                   bool structural = false) {
  GpcConstraint c;
  c.label = label;
  c.kappa0 = kappa0;
  c.coeffs = coeffs;
  c.structural = structural;
  return c;
}

std::int64_t hf_value(const GpcConstraint& c, int n_particles) {
  std::int64_t v = c.kappa0;
  for (int i = 0; i < n_particles && i < c.dim(); ++i)
    v += c.coeffs[static_cast<std::size_t>(i)];
  return v;
}

std::vector<Rational> as_rational(const GpcConstraint& c) {
  std::vector<Rational> v;
  v.reserve(static_cast<std::size_t>(c.dim()) + 1);
  v.emplace_back(c.kappa0);
  for (auto x : c.coeffs) v.emplace_back(x);
  return v;
}

// Echelonized rational span with on-line insertion, used to compare
// constraints modulo the structural equalities.
class RationalSpan {
 public:
  std::vector<Rational> reduce(std::vector<Rational> v) const {
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const Rational& lead = v[pivots_[k]];
      if (lead == 0) continue;
      const Rational f = lead;  // rows are pivot-normalized
      for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * rows_[k][j];
    }
    return v;
  }

  void add(std::vector<Rational> v) {
    v = reduce(std::move(v));
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] == 0) continue;
      const Rational p = v[j];
      for (auto& x : v) x /= p;
      rows_.push_back(std::move(v));
      pivots_.push_back(j);
      return;
    }
  }

 private:
  std::vector<std::vector<Rational>> rows_;
  std::vector<std::size_t> pivots_;
};

// True when rd == t * rm for some rational t > 0. Both vectors must already
// be reduced against the same span.
bool positive_multiple(const std::vector<Rational>& rd,
                       const std::vector<Rational>& rm) {
  std::size_t lead = rm.size();
  for (std::size_t j = 0; j < rm.size(); ++j)
    if (rm[j] != 0) { lead = j; break; }
  if (lead == rm.size()) {
    return std::all_of(rd.begin(), rd.end(),
                       [](const Rational& x) { return x == 0; });
  }
  const Rational t = rd[lead] / rm[lead];
  if (t <= 0) return false;
  for (std::size_t j = 0; j < rm.size(); ++j)
    if (rd[j] != t * rm[j]) return false;
  return true;
}

json catalog_to_json(const GpcCatalog& cat) {
  json doc;
  doc["setting"] = {{"n_particles", cat.setting.particles},
                    {"dim", cat.setting.dim}};
  json list = json::array();
  for (const auto& c : cat.constraints) {
    json jc;
    jc["label"] = c.label;
    jc["kappa0"] = c.kappa0;
    jc["coeffs"] = c.coeffs;
    jc["structural"] = c.structural;
    list.push_back(std::move(jc));
  }
  doc["constraints"] = std::move(list);
  return doc;
}

}  // namespace

const GpcConstraint* GpcCatalog::find(const std::string& label) const {
  for (const auto& c : constraints)
    if (c.label == label) return &c;
  return nullptr;
}

GpcConstraint canonicalize(const GpcConstraint& c) {
  std::int64_t g = std::abs(c.kappa0);
  for (auto x : c.coeffs) g = std::gcd(g, std::abs(x));
  if (g == 0) throw std::invalid_argument("zero constraint has no canonical form");
  GpcConstraint out = c;
  out.kappa0 /= g;
  for (auto& x : out.coeffs) x /= g;
  return out;
}

GpcCatalog builtin_catalog(const Setting& setting) {
  GpcCatalog cat;
  cat.setting = setting;
  cat.origin = CatalogOrigin::Builtin;
  if (setting.particles <= 2) {
    throw std::invalid_argument(
        "trivial setting " + setting.str() +
        ": occupations are fixed by degeneracy, no proper inequalities exist");
  }
  if (setting == Setting(3, 6)) {
    // One proper inequality plus three spectral sum rules, each sum rule
    // stored as an opposing pair so all consumers handle one object kind.
    cat.constraints = {
        make("D1", 2, {-1, -1, 0, -1, 0, 0}),
        make("E1+", 1, {-1, 0, 0, 0, 0, -1}, true),
        make("E1-", -1, {1, 0, 0, 0, 0, 1}, true),
        make("E2+", 1, {0, -1, 0, 0, -1, 0}, true),
        make("E2-", -1, {0, 1, 0, 0, 1, 0}, true),
        make("E3+", 1, {0, 0, -1, -1, 0, 0}, true),
        make("E3-", -1, {0, 0, 1, 1, 0, 0}, true),
    };
    return cat;
  }
  if (setting == Setting(4, 8)) {
    // The source list labels two consecutive constraints identically; they
    // are relabeled here in listed order.
    cat.constraints = {
        make("D1", 0, {0, 0, 0, 0, -1, 1, 1, 1}),
        make("D2", 0, {-1, 1, 0, 0, 0, 0, 1, 1}),
        make("D3", 0, {-1, 0, 1, 0, 0, 1, 0, 1}),
        make("D4", 0, {-1, 0, 0, 1, 0, 1, 1, 0}),
        make("D5", 0, {-1, 0, 0, 1, 1, 0, 0, 1}),
        make("D6", 0, {0, 0, -1, 1, 0, 0, 1, 1}),
        make("D7", 0, {0, -1, 0, 1, 0, 1, 0, 1}),
        make("D8", 2, {0, -1, -1, 0, -1, 0, 0, 1}),
        make("D9", 2, {-1, 0, -1, 0, 0, -1, 0, 1}),
        make("D10", 2, {-1, -1, 0, 0, 0, 0, -1, 1}),
        make("D11", 2, {-1, -1, -1, 1, 0, 0, 0, 0}),
        make("D12", 2, {-1, 0, 0, -1, -1, 0, 0, 1}),
        make("D13", 2, {-1, -1, 0, 0, -1, 1, 0, 0}),
        make("D14", 2, {-1, 0, -1, 0, -1, 0, 1, 0}),
    };
    return cat;
  }
  throw std::invalid_argument("no builtin catalog for setting " + setting.str() +
                              "; supply one via a catalog file");
}

void validate_catalog(const GpcCatalog& cat) {
  if (cat.setting.particles <= 2)
    throw std::invalid_argument("trivial setting " + cat.setting.str());
  if (cat.constraints.empty())
    throw std::invalid_argument("catalog validation error: empty catalog");
  for (const auto& c : cat.constraints) {
    if (c.label.empty())
      throw std::invalid_argument("catalog validation error: empty label");
    if (c.dim() != cat.setting.dim)
      throw std::invalid_argument("catalog validation error: constraint " +
                                  c.label + " has " +
                                  std::to_string(c.dim()) + " coefficients, setting " +
                                  cat.setting.str());
    if (hf_value(c, cat.setting.particles) < 0)
      throw std::invalid_argument("catalog validation error: constraint " +
                                  c.label +
                                  " is violated at the Hartree-Fock vertex");
  }
  for (std::size_t i = 0; i < cat.constraints.size(); ++i) {
    for (std::size_t j = i + 1; j < cat.constraints.size(); ++j) {
      if (cat.constraints[i].label == cat.constraints[j].label)
        throw std::invalid_argument("catalog validation error: duplicate label " +
                                    cat.constraints[i].label);
      const auto a = as_rational(cat.constraints[i]);
      const auto b = as_rational(cat.constraints[j]);
      if (positive_multiple(a, b))
        throw std::invalid_argument("catalog validation error: " +
                                    cat.constraints[i].label + " and " +
                                    cat.constraints[j].label +
                                    " are positive multiples");
    }
  }
}

std::string serialize_catalog(const GpcCatalog& cat) {
  return catalog_to_json(cat).dump(2) + "\n";
}

GpcCatalog parse_catalog(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("catalog parse error: ") + e.what());
  }
  GpcCatalog cat;
  cat.origin = CatalogOrigin::ExternalFile;
  try {
    const auto& s = doc.at("setting");
    cat.setting = Setting(s.at("n_particles").get<int>(), s.at("dim").get<int>());
    for (const auto& jc : doc.at("constraints")) {
      GpcConstraint c;
      c.label = jc.at("label").get<std::string>();
      c.kappa0 = jc.at("kappa0").get<std::int64_t>();
      for (const auto& x : jc.at("coeffs")) {
        if (!x.is_number_integer())
          throw std::invalid_argument("catalog validation error: non-integer coefficient in " +
                                      c.label);
        c.coeffs.push_back(x.get<std::int64_t>());
      }
      c.structural = jc.value("structural", false);
      cat.constraints.push_back(canonicalize(c));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("catalog parse error: ") + e.what());
  }
  validate_catalog(cat);
  return cat;
}

GpcCatalog load_catalog_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("catalog file not readable: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str());
}

GpcConstraint restrict_constraint(const GpcConstraint& c, const Setting& from,
                                  int r, int s) {
  if (c.dim() != from.dim)
    throw std::invalid_argument("constraint does not belong to setting " + from.str());
  if (r < 0 || r > from.particles || s < 0 || s > from.dim - from.particles)
    throw std::invalid_argument("restriction out of range: r=" + std::to_string(r) +
                                " s=" + std::to_string(s) + " for " + from.str());
  GpcConstraint out;
  out.label = c.label;
  out.structural = c.structural;
  out.kappa0 = c.kappa0;
  for (int i = 0; i < r; ++i) out.kappa0 += c.coeffs[static_cast<std::size_t>(i)];
  out.coeffs.assign(c.coeffs.begin() + r, c.coeffs.end() - s);
  return out;
}

RestrictionClass classify_restriction(const GpcConstraint& restricted,
                                      const GpcCatalog& target) {
  const int d = target.setting.dim;
  if (restricted.dim() != d)
    throw std::invalid_argument("restriction/catalog dimension mismatch");

  const bool all_zero = std::all_of(restricted.coeffs.begin(), restricted.coeffs.end(),
                                    [](std::int64_t x) { return x == 0; });
  if (all_zero) {
    if (restricted.kappa0 >= 0) return RestrictionClass::Tautology;
    throw std::invalid_argument("restriction is negative everywhere");
  }

  RationalSpan span;
  for (const auto& m : target.constraints)
    if (m.structural) span.add(as_rational(m));

  const auto rd = span.reduce(as_rational(restricted));
  for (const auto& m : target.constraints) {
    const auto rm = span.reduce(as_rational(m));
    // A member inside the span matches exactly the functions that vanish on
    // the polytope; otherwise demand a positive multiple after reduction.
    if (positive_multiple(rd, rm)) return RestrictionClass::ProperGpc;
  }

  // Minimize the restricted function over the target polytope. A nonnegative
  // minimum certifies that the catalog (with ordering and normalization)
  // implies the restriction.
  const int n = d;
  std::vector<LpRow> rows;
  {
    LpRow sum;
    sum.a.assign(static_cast<std::size_t>(n), Rational(1));
    sum.rel = LpRel::Eq;
    sum.rhs = target.setting.particles;
    rows.push_back(std::move(sum));
  }
  for (int i = 0; i + 1 < d; ++i) {
    LpRow ord;
    ord.a.assign(static_cast<std::size_t>(n), Rational(0));
    ord.a[static_cast<std::size_t>(i)] = 1;
    ord.a[static_cast<std::size_t>(i) + 1] = -1;
    ord.rel = LpRel::Ge;
    ord.rhs = 0;
    rows.push_back(std::move(ord));
  }
  {
    LpRow cap;
    cap.a.assign(static_cast<std::size_t>(n), Rational(0));
    cap.a[0] = 1;
    cap.rel = LpRel::Le;
    cap.rhs = 1;
    rows.push_back(std::move(cap));
  }
  for (const auto& m : target.constraints) {
    LpRow row;
    row.a.reserve(static_cast<std::size_t>(n));
    for (auto x : m.coeffs) row.a.emplace_back(x);
    row.rel = LpRel::Ge;
    row.rhs = -m.kappa0;
    rows.push_back(std::move(row));
  }
  std::vector<Rational> objective;
  objective.reserve(static_cast<std::size_t>(n));
  for (auto x : restricted.coeffs) objective.emplace_back(x);

  const LpResult res = lp_minimize(n, objective, rows);
  if (res.status == LpStatus::Infeasible)
    throw std::runtime_error("target polytope is empty; catalog inconsistent");
  if (res.status == LpStatus::Unbounded)
    throw std::runtime_error("target polytope is unbounded; catalog inconsistent");
  if (res.value + restricted.kappa0 < 0)
    throw std::invalid_argument(
        "restriction is violated on the target polytope; not a valid restriction");
  return RestrictionClass::Dependent;
}

}  // namespace pinlab
