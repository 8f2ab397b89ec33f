#pragma once

// Finite fields F_{p^n} in generator-power (Zech logarithm) representation.
//
// A nonzero element is stored as its discrete logarithm with respect to a
// fixed primitive element; zero is a distinguished sentinel. Multiplication
// is exponent addition, and addition goes through the Zech table
// zech[j] = log(1 + gen^j).

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eik {

inline constexpr std::uint64_t kDefaultFieldBudget = std::uint64_t{1} << 20;

class Elt {
 public:
  static constexpr std::uint32_t kZeroTag = 0xFFFFFFFFu;

  constexpr Elt() = default;
  static constexpr Elt zero() { return Elt(); }
  static constexpr Elt from_log(std::uint32_t e) {
    Elt x;
    x.v_ = e;
    return x;
  }

  constexpr bool is_zero() const { return v_ == kZeroTag; }
  // Discrete log; only meaningful for nonzero elements.
  constexpr std::uint32_t log() const { return v_; }

  friend constexpr bool operator==(Elt, Elt) = default;
  friend constexpr auto operator<=>(Elt, Elt) = default;

 private:
  std::uint32_t v_ = kZeroTag;
};

class FieldTable {
 public:
  // Builds F_{p^n} using the lexicographically smallest primitive modulus
  // (coefficient vectors compared low-degree-first). Throws
  // std::invalid_argument for non-prime p or n == 0 and BudgetError when
  // p^n exceeds `budget`.
  static FieldTable build(std::uint32_t p, std::uint32_t n,
                          std::uint64_t budget = kDefaultFieldBudget);

  std::uint32_t p() const { return p_; }
  std::uint32_t n() const { return n_; }
  std::uint32_t q() const { return q_; }
  // Order of the unit group, q - 1.
  std::uint32_t order() const { return q_ - 1; }
  // Monic modulus, low-degree coefficient first (size n + 1).
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  Elt one() const { return Elt::from_log(0); }
  Elt gen() const { return Elt::from_log(1 % order()); }
  Elt from_log(std::int64_t e) const;

  Elt add(Elt x, Elt y) const {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    std::uint32_t d = y.log() >= x.log() ? y.log() - x.log() : y.log() + order() - x.log();
    const std::uint32_t z = zech_[d];
    if (z == Elt::kZeroTag) return Elt::zero();
    std::uint64_t s = std::uint64_t{x.log()} + z;
    if (s >= order()) s -= order();
    return Elt::from_log(static_cast<std::uint32_t>(s));
  }
  Elt neg(Elt x) const {
    if (x.is_zero()) return x;
    return mul(x, Elt::from_log(minus_one_log_));
  }
  Elt sub(Elt x, Elt y) const { return add(x, neg(y)); }
  Elt mul(Elt x, Elt y) const {
    if (x.is_zero() || y.is_zero()) return Elt::zero();
    std::uint64_t s = std::uint64_t{x.log()} + y.log();
    if (s >= order()) s -= order();
    return Elt::from_log(static_cast<std::uint32_t>(s));
  }
  // Throws std::domain_error on zero.
  Elt inv(Elt x) const;
  Elt div(Elt x, Elt y) const { return mul(x, inv(y)); }
  // Negative exponents are allowed for nonzero x; 0^0 = 1, 0^e = 0 for e > 0.
  Elt pow(Elt x, std::int64_t e) const;
  // x^(p^k).
  Elt frobenius(Elt x, std::uint32_t k) const;
  std::uint32_t minus_one_log() const { return minus_one_log_; }

  // Integer code sum_i c_i p^i of the polynomial representative.
  std::uint32_t to_int(Elt x) const;
  Elt from_int(std::uint64_t code) const;
  std::vector<std::uint32_t> coeffs(Elt x) const;
  Elt from_coeffs(std::span<const std::uint32_t> c) const;

  std::string describe() const;

 private:
  FieldTable() = default;

  std::uint32_t p_ = 0;
  std::uint32_t n_ = 0;
  std::uint32_t q_ = 0;
  std::uint32_t minus_one_log_ = 0;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> antilog_;  // log -> integer code
  std::vector<std::uint32_t> log_;      // integer code -> log (kZeroTag for 0)
  std::vector<std::uint32_t> zech_;     // j -> log(1 + gen^j)
};

using FieldPtr = std::shared_ptr<const FieldTable>;

// Process-wide cache of built fields; safe to call concurrently.
FieldPtr field(std::uint32_t p, std::uint32_t n, std::uint64_t budget = kDefaultFieldBudget);

// A field embedding sub -> sup, determined by the image of sub.gen, which is
// sup.gen^root_log.
struct Embedding {
  FieldPtr sub;
  FieldPtr sup;
  std::uint64_t root_log = 0;

  std::uint32_t degree() const { return sup->n() / sub->n(); }
  Elt apply(Elt x) const;
  bool in_image(Elt y) const;
  // Preimage of y; throws std::domain_error if y is outside the image.
  Elt pull(Elt y) const;
  // Relative trace and norm sup -> sub.
  Elt trace(Elt y) const;
  Elt norm(Elt y) const;
};

// Logs r (ascending) such that sup.gen^r is a root of sub's modulus; each
// gives an embedding. Throws std::invalid_argument for incompatible fields.
std::vector<std::uint64_t> embedding_roots(const FieldTable& sub, const FieldTable& sup);

// Embedding through the smallest root. When sup.gen^((Q-1)/(q-1)) is itself
// a root, this is the embedding sub.gen -> sup.gen^((Q-1)/(q-1)).
Embedding make_embedding(FieldPtr sub, FieldPtr sup);

// Relative trace and norm of x in sup, decoded into sub through
// make_embedding(sub, sup).
std::pair<Elt, Elt> subfield_trace_norm(FieldPtr sub, FieldPtr sup, Elt x);

}  // namespace eik
