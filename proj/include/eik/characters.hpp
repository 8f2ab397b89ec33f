#pragma once

// Additive characters psi_c of F_q and multiplicative characters of B*.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eik/cyclotomic.hpp"
#include "eik/etale.hpp"
#include "eik/ffield.hpp"

namespace eik {

// psi_c(t) = zeta_p^{Tr_{F_q/F_p}(c t)}, c != 0.
class AddChar {
 public:
  AddChar(FieldPtr base, Elt c);

  const FieldTable& base() const { return *base_; }
  const FieldPtr& base_ptr() const { return base_; }
  Elt c() const { return c_; }
  std::uint32_t p() const { return base_->p(); }

  // Tr(c t) as an integer in [0, p).
  std::uint32_t index(Elt t) const { return t.is_zero() ? 0 : index_by_log_[t.log()]; }
  Cyclotomic eval(Elt t) const { return Cyclotomic::root_of_unity(p(), index(t)); }

  AddChar conj() const;
  // t -> psi(b t).
  AddChar scaled(Elt b) const;
  // psi o Tr_{M/F_q} as a character of M, where emb embeds F_q into M.
  AddChar extend(const Embedding& emb) const;
  // True when c lies in the prime field (psi = psi_0 o Tr).
  bool is_normalized() const;

 private:
  FieldPtr base_;
  Elt c_;
  std::vector<std::uint32_t> index_by_log_;
};

// chi(x) = prod_i zeta_{Q_i - 1}^{e_i log x_i}.
class MultChar {
 public:
  MultChar(AlgebraPtr algebra, std::span<const std::int64_t> exps);
  static MultChar trivial(AlgebraPtr algebra);
  // Every character of B*, in lexicographic exponent order.
  static std::vector<MultChar> all(const AlgebraPtr& algebra);

  const EtaleAlgebra& algebra() const { return *algebra_; }
  const AlgebraPtr& algebra_ptr() const { return algebra_; }
  // Exponents reduced into [0, Q_i - 1).
  const std::vector<std::uint64_t>& exps() const { return exps_; }
  bool is_trivial() const;

  // Least N with every value of chi an N-th root of unity.
  std::uint64_t conductor() const;
  // w_i with chi(x) = zeta_N^{sum_i w_i log x_i}; N must be a multiple of conductor().
  std::vector<std::uint64_t> log_weights(std::uint64_t N) const;

  // Throws std::domain_error when x is not a unit.
  Cyclotomic eval(std::span<const Elt> x) const;
  Cyclotomic eval(const AlgebraElement& x) const { return eval(std::span<const Elt>(x.coords)); }
  // chi evaluated at the diagonal image of b in F_q*.
  Cyclotomic eval_diagonal(Elt b) const { return eval(algebra_->diagonal(b)); }

  MultChar conj() const;
  // Pointwise product; both characters must live on the same algebra.
  MultChar operator*(const MultChar& other) const;

 private:
  AlgebraPtr algebra_;
  std::vector<std::uint64_t> exps_;
};

// e_0 mod (q - 1) with chi = chi_0 o N, chi_0(gen) = zeta_{q-1}^{e_0}, when it exists.
std::optional<std::uint64_t> is_norm_induced(const MultChar& chi);

// chi o N_{B'/B} as a character of B' = bc.algebra.
MultChar descend_char(const MultChar& chi, const BaseChange& bc);

// chi_0(a) = zeta_{q-1}^{e_0 log a} on the base field.
Cyclotomic eval_base_char(const FieldTable& F, std::uint64_t e0, Elt a);

}  // namespace eik
