#pragma once

// Small dense integer matrices: exact determinants and ranks, linear algebra
// mod p, and a unimodular diagonalization used to solve A x = b mod N.

#include <cstdint>
#include <optional>
#include <vector>

namespace eik {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

// Exact determinant of a square matrix (fraction-free elimination).
// Throws std::overflow_error if an intermediate leaves 64 bits.
std::int64_t determinant(const IntMatrix& A);

// Rank over Q.
std::size_t rank(const IntMatrix& A);

// Rank over F_p.
std::size_t rank_mod_p(const IntMatrix& A, std::uint64_t p);

// Basis of {v in F_p^cols : A v = 0}, entries in [0, p).
std::vector<std::vector<std::uint64_t>> kernel_mod_p(const IntMatrix& A, std::uint64_t p);

IntMatrix transpose(const IntMatrix& A);

// U A V = D with U, V unimodular and D diagonal (not necessarily in Smith
// divisibility order).
struct Diagonalization {
  IntMatrix U, D, V;
};
Diagonalization diagonalize(const IntMatrix& A);

// Some x in (Z/N)^cols with A x = b mod N, if one exists.
std::optional<std::vector<std::uint64_t>> solve_mod(const Diagonalization& dg, const std::vector<std::uint64_t>& b,
                                                    std::uint64_t N);

}  // namespace eik
