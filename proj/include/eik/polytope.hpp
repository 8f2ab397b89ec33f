#pragma once

// Newton polytopes at infinity of Laurent families: facets, the face lattice,
// normalized volume, face restrictions and non-degeneracy verdicts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eik/ffield.hpp"
#include "eik/intmat.hpp"
#include "eik/laurent.hpp"

namespace eik {

using PointMask = std::uint64_t;

// A hyperplane normal . x = offset supporting the polytope, with normal
// primitive and normal . v <= offset on every point.
struct Facet {
  std::vector<std::int64_t> normal;
  std::int64_t offset = 0;
  std::vector<std::size_t> monomials;  // family monomials lying on the hyperplane
  PointMask mask = 0;

  bool contains_origin() const { return offset == 0; }
  // "x1 + x2 + 3/2 x3 = 1" style, offset scaled to 1.
  std::string equation() const;
};

struct Face {
  std::vector<std::size_t> monomials;
  PointMask mask = 0;
  std::uint32_t dim = 0;
  bool contains_origin = false;
};

// Point 0 is the origin; point i + 1 is the exponent of monomial i.
struct NewtonPolytope {
  std::uint32_t dim = 0;
  std::vector<std::vector<std::int64_t>> points;
  std::vector<std::size_t> vertices;  // point indices
  std::vector<Facet> facets;          // every facet, off-origin ones first
  std::vector<Face> faces;            // every proper nonempty face, by decreasing dimension
};

// Throws std::invalid_argument for a hull that is not full-dimensional or has
// more than 63 monomials.
NewtonPolytope newton_polytope(const LaurentFamily& fam);

std::vector<Facet> facets_off_origin(const NewtonPolytope& poly);
std::vector<Face> faces_off_origin(const NewtonPolytope& poly);

// dim! * vol, by coning the off-origin facets to the origin, each facet split
// by a pulling triangulation.
std::int64_t normalized_volume(const NewtonPolytope& poly);

LaurentFamily face_restriction(const LaurentFamily& fam, const std::vector<std::size_t>& monomials);
// Determinant of the exponent matrix when the face has exactly dim monomials.
std::optional<std::int64_t> diagonal_determinant(const LaurentFamily& fam, const std::vector<std::size_t>& monomials);

// A point of (F*)^dim, F = F_{q^degree}, where every partial of the face
// polynomial vanishes.
struct Witness {
  std::uint32_t degree = 1;
  FieldPtr field;
  std::vector<Elt> point;
};

enum class Verdict { nondegenerate, degenerate, undetermined };
std::string to_string(Verdict v);

struct FaceVerdict {
  std::vector<std::size_t> monomials;
  std::uint32_t dim = 0;
  Verdict verdict = Verdict::undetermined;
  std::string method;  // "rank", "closed_form", "search"
  std::optional<std::int64_t> determinant;
  std::optional<Witness> witness;
};

struct NondegVerdict {
  Verdict verdict = Verdict::undetermined;
  std::uint32_t depth = 0;
  std::optional<Witness> witness;  // set when degenerate
  std::vector<FaceVerdict> faces;  // every face off the origin
};

inline constexpr std::uint32_t kDefaultDepth = 3;
inline constexpr std::uint64_t kSearchBudget = 1u << 22;

// Critical points of the face polynomial on the torus over F_{q^degree}, by
// enumerating the kernel of the transposed exponent matrix mod p and solving
// the resulting binomial system in discrete logs. coeffs live in F. Returns
// nullopt when none exists; throws BudgetError when the kernel is too large.
std::optional<Witness> critical_point_search(const LaurentFamily& face, const std::vector<Elt>& coeffs,
                                             const FieldPtr& F, std::uint32_t degree,
                                             std::uint64_t budget = kSearchBudget);
// The same by walking every torus point; for cross-checking on tiny cases.
std::optional<Witness> critical_point_search_naive(const LaurentFamily& face, const std::vector<Elt>& coeffs,
                                                   const FieldPtr& F, std::uint32_t degree);

// True when every partial x_j d/dx_j of the face polynomial vanishes at x.
bool is_critical(const LaurentFamily& face, const std::vector<Elt>& coeffs_in_M, const FieldTable& M,
                 const std::vector<Elt>& x);

// w lives in F; throws std::invalid_argument for w = 0.
NondegVerdict nondegeneracy_verdict(const LaurentFamily& fam, const NewtonPolytope& poly, const FieldPtr& F, Elt w,
                                    std::uint32_t depth = kDefaultDepth);
NondegVerdict nondegeneracy_verdict(const LaurentFamily& fam, const FieldPtr& F, Elt w,
                                    std::uint32_t depth = kDefaultDepth);

// Regime of fhat_family(n, m): "n+1<2m", "n+1=2m" or "n+1>2m".
std::string fhat_regime(std::uint32_t n, std::uint32_t m);
// m^{-(n+1)} in F, or nullopt when p | m.
std::optional<Elt> exceptional_parameter(const FieldTable& F, std::uint32_t n, std::uint32_t m);

}  // namespace eik
