#include "eik/intmat.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "eik/numtheory.hpp"

namespace eik {

namespace {

std::int64_t narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("intmat: integer overflow");
  return static_cast<std::int64_t>(v);
}

std::int64_t mul_sub(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return narrow(static_cast<__int128>(a) * b - static_cast<__int128>(c) * d);
}

std::size_t cols_of(const IntMatrix& A) { return A.empty() ? 0 : A[0].size(); }

// Row-echelon form over F_p; returns pivot columns.
std::vector<std::size_t> echelon_mod_p(std::vector<std::vector<std::uint64_t>>& M, std::uint64_t p) {
  const std::size_t rows = M.size(), cols = rows ? M[0].size() : 0;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && M[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(M[piv], M[r]);
    const std::uint64_t inv = invmod(M[r][c], p);
    for (auto& v : M[r]) v = mulmod(v, inv, p);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || M[i][c] == 0) continue;
      const std::uint64_t f = M[i][c];
      for (std::size_t j = 0; j < cols; ++j) M[i][j] = (M[i][j] + p - mulmod(f, M[r][j], p)) % p;
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::vector<std::vector<std::uint64_t>> reduce(const IntMatrix& A, std::uint64_t p) {
  std::vector<std::vector<std::uint64_t>> M(A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    for (auto v : A[i]) M[i].push_back(mod_floor(v, p));
  return M;
}

}  // namespace

std::int64_t determinant(const IntMatrix& A) {
  const std::size_t n = A.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("determinant: matrix is not square");
  if (n == 0) return 1;
  IntMatrix M = A;
  std::int64_t sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (M[k][k] == 0) {
      std::size_t piv = k + 1;
      while (piv < n && M[piv][k] == 0) ++piv;
      if (piv == n) return 0;
      std::swap(M[piv], M[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) M[i][j] = mul_sub(M[i][j], M[k][k], M[i][k], M[k][j]) / prev;
    }
    prev = M[k][k];
  }
  return sign * M[n - 1][n - 1];
}

std::size_t rank(const IntMatrix& A) {
  IntMatrix M = A;
  const std::size_t rows = M.size(), cols = cols_of(M);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && M[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(M[piv], M[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (M[i][c] == 0) continue;
      const std::int64_t a = M[r][c], b = M[i][c];
      std::int64_t g = 0;
      for (std::size_t j = 0; j < cols; ++j) {
        M[i][j] = mul_sub(M[i][j], a, b, M[r][j]);
        g = std::gcd(g, M[i][j]);
      }
      if (g > 1)
        for (auto& v : M[i]) v /= g;
    }
    ++r;
  }
  return r;
}

std::size_t rank_mod_p(const IntMatrix& A, std::uint64_t p) {
  auto M = reduce(A, p);
  return echelon_mod_p(M, p).size();
}

std::vector<std::vector<std::uint64_t>> kernel_mod_p(const IntMatrix& A, std::uint64_t p) {
  const std::size_t cols = cols_of(A);
  auto M = reduce(A, p);
  const auto pivots = echelon_mod_p(M, p);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<std::uint64_t>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<std::uint64_t> v(cols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = (p - M[r][f]) % p;
    basis.push_back(std::move(v));
  }
  return basis;
}

IntMatrix transpose(const IntMatrix& A) {
  IntMatrix T(cols_of(A), std::vector<std::int64_t>(A.size()));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A[i].size(); ++j) T[j][i] = A[i][j];
  return T;
}

Diagonalization diagonalize(const IntMatrix& A) {
  const std::size_t rows = A.size(), cols = cols_of(A);
  Diagonalization dg;
  dg.D = A;
  dg.U.assign(rows, std::vector<std::int64_t>(rows, 0));
  dg.V.assign(cols, std::vector<std::int64_t>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) dg.U[i][i] = 1;
  for (std::size_t i = 0; i < cols; ++i) dg.V[i][i] = 1;
  auto& D = dg.D;
  auto row_op = [&](std::size_t dst, std::size_t src, std::int64_t f) {  // row_dst -= f row_src
    for (std::size_t j = 0; j < cols; ++j) D[dst][j] = mul_sub(D[dst][j], 1, f, D[src][j]);
    for (std::size_t j = 0; j < rows; ++j) dg.U[dst][j] = mul_sub(dg.U[dst][j], 1, f, dg.U[src][j]);
  };
  auto col_op = [&](std::size_t dst, std::size_t src, std::int64_t f) {  // col_dst -= f col_src
    for (std::size_t i = 0; i < rows; ++i) D[i][dst] = mul_sub(D[i][dst], 1, f, D[i][src]);
    for (std::size_t i = 0; i < cols; ++i) dg.V[i][dst] = mul_sub(dg.V[i][dst], 1, f, dg.V[i][src]);
  };
  auto swap_rows = [&](std::size_t a, std::size_t b) {
    std::swap(D[a], D[b]);
    std::swap(dg.U[a], dg.U[b]);
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    for (auto& row : D) std::swap(row[a], row[b]);
    for (auto& row : dg.V) std::swap(row[a], row[b]);
  };

  for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block goes to (t, t).
      std::size_t bi = rows, bj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (D[i][j] != 0 && (bi == rows || std::llabs(D[i][j]) < std::llabs(D[bi][bj]))) bi = i, bj = j;
      if (bi == rows) return dg;
      swap_rows(t, bi);
      swap_cols(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (D[i][t] == 0) continue;
        row_op(i, t, D[i][t] / D[t][t]);
        if (D[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (D[t][j] == 0) continue;
        col_op(j, t, D[t][j] / D[t][t]);
        if (D[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
  }
  return dg;
}

std::optional<std::vector<std::uint64_t>> solve_mod(const Diagonalization& dg, const std::vector<std::uint64_t>& b,
                                                    std::uint64_t N) {
  const std::size_t rows = dg.D.size(), cols = cols_of(dg.D);
  if (b.size() != rows) throw std::invalid_argument("solve_mod: size mismatch");
  std::vector<std::uint64_t> bp(rows, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < rows; ++j) acc = (acc + mulmod(mod_floor(dg.U[i][j], N), b[j] % N, N)) % N;
    bp[i] = acc;
  }
  std::vector<std::uint64_t> y(cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::uint64_t d = i < cols ? mod_floor(dg.D[i][i], N) : 0;
    const std::uint64_t g = std::gcd(d, N);  // gcd(0, N) = N
    if (bp[i] % g != 0) return std::nullopt;
    if (i >= cols || d == 0) continue;
    const std::uint64_t Ng = N / g;
    y[i] = Ng == 1 ? 0 : mulmod(bp[i] / g % Ng, invmod(d / g % Ng, Ng), Ng);
  }
  std::vector<std::uint64_t> x(cols, 0);
  for (std::size_t i = 0; i < cols; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t j = 0; j < cols; ++j) acc = (acc + mulmod(mod_floor(dg.V[i][j], N), y[j], N)) % N;
    x[i] = acc;
  }
  return x;
}

}  // namespace eik
