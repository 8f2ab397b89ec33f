#pragma once

// Laurent polynomial families on the torus G_m^v: integer exponent vectors
// with coefficient slots of the form (constant) * w^k.

#include <cstdint>
#include <string>
#include <vector>

#include "eik/ffield.hpp"

namespace eik {

struct CoefficientSlot {
  std::int64_t constant = 1;  // reduced mod p on specialization
  std::uint32_t w_power = 0;

  friend bool operator==(const CoefficientSlot&, const CoefficientSlot&) = default;
};

struct Monomial {
  std::vector<std::int64_t> exponent;
  CoefficientSlot slot;
  std::string label;
};

enum class FamilyKind { custom, f, fhat };

class LaurentFamily {
 public:
  LaurentFamily(std::uint32_t dim, std::vector<Monomial> monomials, FamilyKind kind = FamilyKind::custom,
                std::uint32_t n = 0, std::uint32_t m = 0);

  // y + z - y z (x_1 + ... + x_n) - w y z / (x_1 ... x_n) on variables
  // (x_1, ..., x_n, y, z); the coefficients are h(w) = (1, 1, -1, ..., -1, -w).
  static LaurentFamily f_family(std::uint32_t n);
  // x_{n+1} + x_{n+2}/x_{n+1} - (x_1 + ... + x_n + w x_{n+2}^m / (x_1 ... x_n)).
  static LaurentFamily fhat_family(std::uint32_t n, std::uint32_t m);
  // fhat_family(n, m) after x_i -> x_i^pk on x_1..x_n and w -> w^pk:
  // x_{n+1} + x_{n+2}/x_{n+1} - (sum x_i^pk + w^pk x_{n+2}^{pk m} / prod x_i^pk).
  static LaurentFamily fhat_frobenius(std::uint32_t n, std::uint32_t m, std::uint32_t pk);

  std::uint32_t dim() const { return dim_; }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  FamilyKind kind() const { return kind_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t m() const { return m_; }
  std::string name() const;

  // Sub-family on the given monomial indices (ascending order kept).
  LaurentFamily restrict(const std::vector<std::size_t>& indices) const;

  // Slot values at parameter w in F. Throws std::invalid_argument when a slot
  // that depends on w would be evaluated at w = 0.
  std::vector<Elt> coefficients(const FieldTable& F, Elt w) const;
  // sum_j coeffs[j] * x^{a_j}; every x_i must be nonzero.
  Elt evaluate(const FieldTable& F, const std::vector<Elt>& coeffs, const std::vector<Elt>& x) const;

 private:
  std::uint32_t dim_;
  std::vector<Monomial> monomials_;
  FamilyKind kind_;
  std::uint32_t n_, m_;
};

// Value of an integer constant in F (reduced mod p).
Elt field_constant(const FieldTable& F, std::int64_t c);

}  // namespace eik
