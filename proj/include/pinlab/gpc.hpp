#pragma once

// Generalized Pauli constraint catalogs: built-in data for the settings
// (3,6) and (4,8), a canonical JSON file format for everything else, and
// the restriction machinery that maps constraints between settings.

#include "pinlab/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pinlab {

struct GpcConstraint {
  std::string label;
  std::int64_t kappa0 = 0;
  std::vector<std::int64_t> coeffs;
  // Structural constraints are halves of equality pairs (spectral sum rules
  // of the setting); they bound the polytope but are excluded from d_min.
  bool structural = false;

  int dim() const { return static_cast<int>(coeffs.size()); }
};

// kappa0 + coeffs . lam at the scalar's working precision.
template <class S>
S evaluate_constraint(const GpcConstraint& c, const Vec<S>& lam) {
  if (lam.size() != c.dim())
    throw std::invalid_argument("constraint/spectrum dimension mismatch");
  S acc = S(static_cast<double>(c.kappa0));
  for (int i = 0; i < c.dim(); ++i)
    acc += S(static_cast<double>(c.coeffs[static_cast<std::size_t>(i)])) * lam[i];
  return acc;
}

enum class CatalogOrigin { Builtin, ExternalFile };

struct GpcCatalog {
  Setting setting{1, 1};
  std::vector<GpcConstraint> constraints;
  CatalogOrigin origin = CatalogOrigin::Builtin;

  const GpcConstraint* find(const std::string& label) const;
};

// Divides all entries by their common gcd. Throws invalid_argument if every
// entry is zero.
GpcConstraint canonicalize(const GpcConstraint& c);

// Catalogs for (3,6) and (4,8). Any other setting throws invalid_argument;
// N <= 2 is reported as a trivial setting, everything else as missing data
// that must be supplied via load_catalog.
GpcCatalog builtin_catalog(const Setting& setting);

// Canonical serialization: stable key order, two-space indent, trailing
// newline. parse_catalog(serialize_catalog(c)) reproduces c exactly and
// serialize is idempotent across the round trip.
std::string serialize_catalog(const GpcCatalog& cat);
GpcCatalog parse_catalog(const std::string& text);
GpcCatalog load_catalog_file(const std::string& path);

// Shared validation: dimensions, unique labels, canonical form, value >= 0
// on the Hartree-Fock vertex, no two constraints positive multiples.
void validate_catalog(const GpcCatalog& cat);

// Fixes the first r occupations to 1 and the last s to 0, producing the
// induced affine function on the setting (N-r, d-r-s).
GpcConstraint restrict_constraint(const GpcConstraint& c, const Setting& from,
                                  int r, int s);

enum class RestrictionClass { ProperGpc, Dependent, Tautology };

// Classifies a restricted constraint against a target catalog. ProperGpc
// means it agrees with a catalog member as a function on the polytope (a
// positive multiple modulo the structural equalities). Tautology means no
// coefficient survives and the constant is nonnegative. Dependent means it
// is implied by the catalog together with ordering and normalization, which
// is decided by an exact rational LP over the target polytope. A function
// that fails even that is not a restriction of anything valid and throws.
RestrictionClass classify_restriction(const GpcConstraint& restricted,
                                      const GpcCatalog& target);

}  // namespace pinlab
