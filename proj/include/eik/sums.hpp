#pragma once

// Brute-force evaluation of the exotic Kloosterman sums, their main terms,
// the unfolded (x, y, z) sum and twisted toric sums of Laurent families.
//
// Every sum accumulates a histogram of root-of-unity exponents and reduces
// it once at the end, so results are exact and independent of loop order.

#include <cstdint>
#include <span>
#include <vector>

#include "eik/characters.hpp"
#include "eik/cyclotomic.hpp"
#include "eik/etale.hpp"
#include "eik/laurent.hpp"

namespace eik {

// sum_{N x = a} chi(x) psi(Tr x).
Cyclotomic ek_sum(const MultChar& chi, const AddChar& psi, Elt a);
// sum_{N x = a, Tr x != 0} chi(x) psi(1 / Tr x).
Cyclotomic eik_sum(const MultChar& chi, const AddChar& psi, Elt a);
// S_chi(a) = sum_{N x = a} chi(x).
Cyclotomic norm_fiber_char_sum(const MultChar& chi, Elt a);
// S_chi(a) / q.
Cyclotomic main_term(const MultChar& chi, Elt a);

// sum_{N x = a, y in F_q*, z in F_q} chi(x) psi(y + z - y z Tr x), by the
// full triple loop.
Cyclotomic unfolded_sum(const MultChar& chi, const AddChar& psi, Elt a);

// The z = 0 and z != 0 pieces of the unfolded sum.
struct UnfoldedParts {
  Cyclotomic i_part;  // sum over z = 0; equals -S_chi(a)
  Cyclotomic j_part;  // sum over z != 0; equals q EIK + S_chi(a)
};
UnfoldedParts unfolded_parts(const MultChar& chi, const AddChar& psi, Elt a);

// sum over the torus (F_q*)^v of prod_j zeta_{q-1}^{twists_j log x_j} * psi(f(x)),
// with f given by the family and its slot values.
Cyclotomic laurent_fiber_sum(const LaurentFamily& fam, std::span<const Elt> coeffs,
                             std::span<const std::int64_t> twists, const AddChar& psi);
// Same, with psi replaced by the trivial character.
Cyclotomic laurent_fiber_sum_trivial_psi(const LaurentFamily& fam, std::span<const std::int64_t> twists,
                                         const FieldTable& F);

// EIK over F_{q^m}: eik_sum on B (x) F_{q^m} with chi o N and psi o Tr.
// a lives in F_{q^m}.
Cyclotomic eik_extended(const MultChar& chi, const AddChar& psi, std::uint32_t m, Elt a,
                        std::uint64_t budget = kDefaultFieldBudget);
Cyclotomic eik_extended(const MultChar& chi, const AddChar& psi, const BaseChange& bc, Elt a);

// Split B = F_q^{n+1}: the twists lambda_i = chi_i chi_{n+1}^{-1} (as exponents
// on F_q*, i = 1..n) and chi_{n+1}(a) * (f-family torus sum at w = a).
std::vector<std::int64_t> split_twists(const MultChar& chi);
Cyclotomic split_toric_rhs(const MultChar& chi, const AddChar& psi, Elt a);

// The chain of toric sums relating the f-family at w^{p^k} to the fhat family
// at w, for split B with n + 1 = p^k m and psi normalized. Entry s is the
// value after step s: f-family, tau (fhat with m' = n + 1), Frobenius on
// x_1..x_n, Artin-Schreier (fhat with m). All entries agree.
struct WildChain {
  std::uint32_t pk = 1;
  std::uint32_t m = 1;
  std::vector<Cyclotomic> stages;
};
WildChain wild_toric_chain(const MultChar& chi, const AddChar& psi, Elt w);

}  // namespace eik
