#pragma once

// Finite étale algebras B = F_{q^{n_1}} x ... x F_{q^{n_k}} over a base field
// F_q, with trace, norm, norm-fiber enumeration and base change.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eik/ffield.hpp"

namespace eik {

struct AlgebraElement {
  std::vector<Elt> coords;

  bool is_unit() const {
    for (Elt c : coords)
      if (c.is_zero()) return false;
    return true;
  }
  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;
};

enum class FilterKind { units, norm_fiber, trace_nonzero_norm_fiber };

struct Filter {
  FilterKind kind = FilterKind::units;
  Elt a;

  static Filter units() { return {}; }
  static Filter norm_fiber(Elt a) { return {FilterKind::norm_fiber, a}; }
  static Filter trace_nonzero_norm_fiber(Elt a) { return {FilterKind::trace_nonzero_norm_fiber, a}; }
};

class EtaleAlgebra {
 public:
  // B over F_{p^base_degree} of factorization type `type` (relative degrees),
  // each factor embedded through the smallest-root embedding.
  static EtaleAlgebra make(std::uint32_t p, std::uint32_t base_degree, std::vector<std::uint32_t> type,
                           std::uint64_t budget = kDefaultFieldBudget);
  // Factors given explicitly as embeddings of `base`; every embedding must
  // have `base` as its source field.
  static EtaleAlgebra from_embeddings(FieldPtr base, std::vector<Embedding> factors);

  const FieldTable& base() const { return *base_; }
  const FieldPtr& base_ptr() const { return base_; }
  std::size_t factor_count() const { return factors_.size(); }
  const FieldTable& factor(std::size_t i) const { return *factors_[i].sup; }
  const Embedding& embedding(std::size_t i) const { return factors_[i]; }
  // Relative degrees n_i.
  const std::vector<std::uint32_t>& type() const { return type_; }
  std::string type_string() const;
  // n + 1.
  std::uint32_t degree() const { return degree_; }
  // |B*|.
  std::uint64_t unit_count() const { return unit_count_; }
  // |B*| / (q - 1), the size of every norm fiber.
  std::uint64_t fiber_size() const { return unit_count_ / base_->order(); }

  Elt factor_trace(std::size_t i, Elt x) const { return x.is_zero() ? x : trace_tables_[i][x.log()]; }
  // log N_{n_i}(gen_i^e) = e * norm_weight(i) mod (q - 1).
  std::uint64_t norm_weight(std::size_t i) const { return norm_weights_[i]; }

  Elt trace(std::span<const Elt> x) const;
  Elt trace(const AlgebraElement& x) const { return trace(std::span<const Elt>(x.coords)); }
  // Throws std::domain_error when x is not a unit.
  Elt norm(std::span<const Elt> x) const;
  Elt norm(const AlgebraElement& x) const { return norm(std::span<const Elt>(x.coords)); }

  AlgebraElement diagonal(Elt b) const;
  AlgebraElement multiply(const AlgebraElement& x, const AlgebraElement& y) const;
  AlgebraElement one() const { return diagonal(base_->one()); }

  // Units in lexicographic discrete-log order.
  template <class F>
  void for_each_unit(F&& visit) const;
  // Units with N(x) = a, lexicographic discrete-log order. Throws
  // std::domain_error for a = 0.
  template <class F>
  void for_each_in_fiber(Elt a, F&& visit) const;

  std::vector<AlgebraElement> enumerate(const Filter& filter) const;

 private:
  EtaleAlgebra() = default;
  void validate(std::size_t coords) const;

  FieldPtr base_;
  std::vector<Embedding> factors_;
  std::vector<std::uint32_t> type_;
  std::uint32_t degree_ = 0;
  std::uint64_t unit_count_ = 0;
  std::vector<std::uint64_t> norm_weights_;
  std::vector<std::uint64_t> norm_weight_inverses_;
  std::vector<std::vector<Elt>> trace_tables_;
};

using AlgebraPtr = std::shared_ptr<const EtaleAlgebra>;

// The norm N_{B (x) F_{q^m} / B} in discrete-log coordinates: for each factor
// of B', the source factor of B and the multiplier c with
// log N(y)_i = sum_j c_j * log(y_j) mod (q^{n_i} - 1).
struct NormDescentMap {
  struct Term {
    std::size_t source = 0;
    std::uint64_t multiplier = 0;
  };
  std::vector<Term> terms;
  std::vector<std::uint64_t> source_orders;

  AlgebraElement apply(const AlgebraElement& y) const;
};

struct BaseChangeComponent {
  std::size_t source = 0;  // factor i of B
  std::uint32_t copy = 0;  // j in [0, gcd(n_i, m))
  Embedding from_factor;   // F_{q^{n_i}} -> F_{q^{lcm(n_i, m)}} before twisting by Frobenius^j
};

struct BaseChange {
  std::uint32_t m = 1;
  AlgebraPtr algebra;               // B' over F_{q^m}
  Embedding base_embedding;         // F_q -> F_{q^m}
  NormDescentMap descent;           // (B')* -> B*
  std::vector<BaseChangeComponent> components;  // parallel to B' factors
};

// Realizes B (x) F_{q^m}: factor F_{q^{n_i}} contributes gcd(n_i, m) copies
// of F_{q^{lcm(n_i, m)}}. Component j of factor i is the map
// k (x) mu -> Frob_q^j(k) * mu. Output factors sorted by (lcm degree, source
// factor, copy). Throws BudgetError when a table is too large.
BaseChange base_change(const EtaleAlgebra& B, std::uint32_t m, std::uint64_t budget = kDefaultFieldBudget);

// ---------------------------------------------------------------------------

template <class F>
void EtaleAlgebra::for_each_unit(F&& visit) const {
  const std::size_t k = factors_.size();
  std::vector<Elt> x(k);
  std::vector<std::uint32_t> e(k, 0);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) x[i] = Elt::from_log(e[i]);
    visit(std::span<const Elt>(x));
    std::size_t i = k;
    while (i-- > 0) {
      if (++e[i] < factors_[i].sup->order()) break;
      e[i] = 0;
      if (i == 0) return;
    }
  }
}

template <class F>
void EtaleAlgebra::for_each_in_fiber(Elt a, F&& visit) const {
  if (a.is_zero()) throw std::domain_error("norm fiber: a must be a unit");
  const std::uint64_t qm1 = base_->order();
  const std::size_t k = factors_.size();
  std::vector<Elt> x(k);
  std::vector<std::uint32_t> e(k, 0);
  const std::uint32_t last_order = factors_[k - 1].sup->order();
  for (;;) {
    // Solve e_k * u_k = log a - sum_{i<k} e_i u_i (mod q - 1).
    std::uint64_t partial = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      x[i] = Elt::from_log(e[i]);
      partial = (partial + std::uint64_t{e[i]} % qm1 * norm_weights_[i]) % qm1;
    }
    const std::uint64_t rhs = (a.log() % qm1 + qm1 - partial) % qm1;
    const std::uint64_t start = qm1 == 1 ? 0 : rhs * norm_weight_inverses_[k - 1] % qm1;
    for (std::uint64_t ek = start; ek < last_order; ek += qm1) {
      x[k - 1] = Elt::from_log(static_cast<std::uint32_t>(ek));
      visit(std::span<const Elt>(x));
    }
    if (k == 1) return;
    std::size_t i = k - 1;
    while (i-- > 0) {
      if (++e[i] < factors_[i].sup->order()) break;
      e[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace eik
