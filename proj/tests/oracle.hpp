#pragma once

// Independent reference computations used only by the tests. Nothing here
// goes through the Zech tables' trace/norm code, the fiber enumerator or the
// cyclotomic reduction tables.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "eik/etale.hpp"
#include "eik/ffield.hpp"

namespace oracle {

using eik::Elt;
using eik::FieldTable;

// ----------------------------------------------------------------------------
// Polynomial arithmetic in F_p[t]/(modulus), on integer codes.

struct PolyField {
  std::uint32_t p, n;
  std::vector<std::uint32_t> mod;  // low-degree first, monic, size n+1

  explicit PolyField(const FieldTable& F) : p(F.p()), n(F.n()), mod(F.modulus()) {}

  std::vector<std::uint32_t> decode(std::uint64_t code) const {
    std::vector<std::uint32_t> c(n);
    for (auto& x : c) {
      x = static_cast<std::uint32_t>(code % p);
      code /= p;
    }
    return c;
  }
  std::uint64_t encode(const std::vector<std::uint32_t>& c) const {
    std::uint64_t code = 0;
    for (std::size_t i = c.size(); i-- > 0;) code = code * p + c[i];
    return code;
  }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    auto x = decode(a), y = decode(b);
    for (std::uint32_t i = 0; i < n; ++i) x[i] = (x[i] + y[i]) % p;
    return encode(x);
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    auto x = decode(a), y = decode(b);
    std::vector<std::uint64_t> prod(2 * n, 0);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j) prod[i + j] = (prod[i + j] + std::uint64_t{x[i]} * y[j]) % p;
    for (std::size_t k = 2 * n; k-- > n;) {
      const std::uint64_t c = prod[k];
      if (!c) continue;
      prod[k] = 0;
      for (std::uint32_t i = 0; i < n; ++i) prod[k - n + i] = (prod[k - n + i] + (p - c) * mod[i]) % p;
    }
    std::vector<std::uint32_t> r(n);
    for (std::uint32_t i = 0; i < n; ++i) r[i] = static_cast<std::uint32_t>(prod[i]);
    return encode(r);
  }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
};

// ----------------------------------------------------------------------------
// Linear algebra mod p.

inline std::uint64_t inv_p(std::uint64_t a, std::uint64_t p) {
  std::uint64_t r = 1, e = p - 2;
  a %= p;
  while (e) {
    if (e & 1) r = r * a % p;
    a = a * a % p;
    e >>= 1;
  }
  return r;
}

// Inverse of a square matrix over F_p (row-major); throws if singular.
inline std::vector<std::vector<std::uint64_t>> invert_mod_p(std::vector<std::vector<std::uint64_t>> A,
                                                            std::uint64_t p) {
  const std::size_t n = A.size();
  std::vector<std::vector<std::uint64_t>> I(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && A[piv][col] % p == 0) ++piv;
    if (piv == n) throw std::runtime_error("oracle: singular matrix");
    std::swap(A[piv], A[col]);
    std::swap(I[piv], I[col]);
    const std::uint64_t s = inv_p(A[col][col], p);
    for (std::size_t j = 0; j < n; ++j) {
      A[col][j] = A[col][j] * s % p;
      I[col][j] = I[col][j] * s % p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const std::uint64_t f = A[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        A[r][j] = (A[r][j] + (p - f) * A[col][j]) % p;
        I[r][j] = (I[r][j] + (p - f) * I[col][j]) % p;
      }
    }
  }
  return I;
}

// Determinant over a field given by a FieldTable, Gaussian elimination.
inline Elt det_over(const FieldTable& F, std::vector<std::vector<Elt>> M) {
  const std::size_t n = M.size();
  Elt det = F.one();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && M[piv][col].is_zero()) ++piv;
    if (piv == n) return Elt::zero();
    if (piv != col) {
      std::swap(M[piv], M[col]);
      det = F.neg(det);
    }
    det = F.mul(det, M[col][col]);
    const Elt inv = F.inv(M[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (M[r][col].is_zero()) continue;
      const Elt f = F.mul(M[r][col], inv);
      for (std::size_t j = col; j < n; ++j) M[r][j] = F.sub(M[r][j], F.mul(f, M[col][j]));
    }
  }
  return det;
}

// ----------------------------------------------------------------------------
// Multiplication-by-x matrix of K over a subfield (through an embedding).

class MultiplicationMatrix {
 public:
  explicit MultiplicationMatrix(const eik::Embedding& emb) : emb_(emb) {
    const FieldTable& K = *emb.sup;
    const FieldTable& k = *emb.sub;
    p_ = K.p();
    n0_ = k.n();
    d_ = K.n() / k.n();
    const Elt gamma = emb.apply(k.gen());
    // F_p-basis gamma^i beta^j, column index j * n0 + i.
    std::vector<std::vector<std::uint64_t>> P(K.n(), std::vector<std::uint64_t>(K.n(), 0));
    for (std::uint32_t j = 0; j < d_; ++j)
      for (std::uint32_t i = 0; i < n0_; ++i) {
        const Elt b = K.mul(K.pow(gamma, i), K.pow(K.gen(), j));
        const auto c = K.coeffs(b);
        for (std::uint32_t r = 0; r < K.n(); ++r) P[r][j * n0_ + i] = c[r];
      }
    Pinv_ = invert_mod_p(P, p_);
  }

  // Coordinates of v in K along beta^j over the subfield k.
  std::vector<Elt> coords(Elt v) const {
    const FieldTable& K = *emb_.sup;
    const FieldTable& k = *emb_.sub;
    const auto c = K.coeffs(v);
    std::vector<Elt> out(d_, Elt::zero());
    for (std::uint32_t j = 0; j < d_; ++j)
      for (std::uint32_t i = 0; i < n0_; ++i) {
        std::uint64_t s = 0;
        for (std::uint32_t r = 0; r < K.n(); ++r) s = (s + Pinv_[j * n0_ + i][r] * c[r]) % p_;
        if (s == 0) continue;
        const Elt term = k.mul(k.from_int(s), k.pow(k.gen(), i));
        out[j] = k.add(out[j], term);
      }
    return out;
  }

  std::vector<std::vector<Elt>> matrix(Elt x) const {
    const FieldTable& K = *emb_.sup;
    std::vector<std::vector<Elt>> M(d_, std::vector<Elt>(d_));
    for (std::uint32_t j = 0; j < d_; ++j) {
      const auto col = coords(K.mul(x, K.pow(K.gen(), j)));
      for (std::uint32_t r = 0; r < d_; ++r) M[r][j] = col[r];
    }
    return M;
  }

  Elt trace(Elt x) const {
    const auto M = matrix(x);
    Elt t = Elt::zero();
    for (std::uint32_t i = 0; i < d_; ++i) t = emb_.sub->add(t, M[i][i]);
    return t;
  }
  Elt det(Elt x) const { return det_over(*emb_.sub, matrix(x)); }

 private:
  eik::Embedding emb_;
  std::uint32_t p_ = 0, n0_ = 0, d_ = 0;
  std::vector<std::vector<std::uint64_t>> Pinv_;
};

struct AlgebraOracle {
  std::vector<MultiplicationMatrix> mats;
  const eik::EtaleAlgebra* B;

  explicit AlgebraOracle(const eik::EtaleAlgebra& alg) : B(&alg) {
    for (std::size_t i = 0; i < alg.factor_count(); ++i) mats.emplace_back(alg.embedding(i));
  }
  Elt trace(const std::vector<Elt>& x) const {
    Elt t = Elt::zero();
    for (std::size_t i = 0; i < x.size(); ++i) t = B->base().add(t, mats[i].trace(x[i]));
    return t;
  }
  Elt norm(const std::vector<Elt>& x) const {
    Elt t = B->base().one();
    for (std::size_t i = 0; i < x.size(); ++i) t = B->base().mul(t, mats[i].det(x[i]));
    return t;
  }
};

// ----------------------------------------------------------------------------
// Complex reference values.

inline std::complex<double> root(std::uint64_t N, std::uint64_t k) {
  const double t = 2.0 * std::numbers::pi * static_cast<double>(k % N) / static_cast<double>(N);
  return {std::cos(t), std::sin(t)};
}

// Tr_{F_q/F_p}(t) as an integer, via t + t^p + ... in the field.
inline std::uint32_t abs_trace(const FieldTable& F, Elt t) {
  Elt acc = Elt::zero(), y = t;
  for (std::uint32_t i = 0; i < F.n(); ++i) {
    acc = F.add(acc, y);
    y = F.pow(y, F.p());
  }
  const std::uint32_t code = F.to_int(acc);
  if (code >= F.p()) throw std::logic_error("oracle: trace not in the prime field");
  return code;
}

inline std::complex<double> psi(const FieldTable& F, Elt c, Elt t) {
  return root(F.p(), abs_trace(F, F.mul(c, t)));
}

inline std::complex<double> chi(const eik::EtaleAlgebra& B, const std::vector<std::int64_t>& exps,
                                const std::vector<Elt>& x) {
  std::complex<double> v = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::uint64_t ord = B.factor(i).order();
    const auto e = static_cast<std::uint64_t>(((exps[i] % static_cast<std::int64_t>(ord)) + ord) % ord);
    v *= root(ord, e * x[i].log() % ord);
  }
  return v;
}

// Visits every unit of B (odometer over discrete logs).
inline void for_all_units(const eik::EtaleAlgebra& B, const std::function<void(const std::vector<Elt>&)>& f) {
  const std::size_t k = B.factor_count();
  std::vector<std::uint32_t> e(k, 0);
  std::vector<Elt> x(k);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) x[i] = Elt::from_log(e[i]);
    f(x);
    std::size_t i = 0;
    for (; i < k; ++i) {
      if (++e[i] < B.factor(i).order()) break;
      e[i] = 0;
    }
    if (i == k) return;
  }
}

enum class SumKind { ek, eik, fiber };

// Direct sum over all of B*, filtering on the matrix-determinant norm.
inline std::complex<double> direct_sum(const eik::EtaleAlgebra& B, const std::vector<std::int64_t>& exps, Elt c,
                                       Elt a, SumKind kind) {
  AlgebraOracle O(B);
  const FieldTable& F = B.base();
  std::complex<double> s = 0;
  for_all_units(B, [&](const std::vector<Elt>& x) {
    if (O.norm(x) != a) return;
    const Elt t = O.trace(x);
    switch (kind) {
      case SumKind::ek:
        s += chi(B, exps, x) * psi(F, c, t);
        break;
      case SumKind::eik:
        if (!t.is_zero()) s += chi(B, exps, x) * psi(F, c, F.inv(t));
        break;
      case SumKind::fiber:
        s += chi(B, exps, x);
        break;
    }
  });
  return s;
}

// ----------------------------------------------------------------------------
// Naive Z[x]/(x^N - 1) arithmetic followed by reduction modulo Phi_N, with
// Phi_N obtained as (x^N - 1) / prod_{d | N, d < N} Phi_d.

inline std::vector<std::int64_t> poly_divexact(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b) {
  const std::size_t db = b.size() - 1;
  std::vector<std::int64_t> q(a.size() - db, 0);
  for (std::size_t k = a.size(); k-- > db;) {
    const std::int64_t c = a[k] / b[db];
    q[k - db] = c;
    for (std::size_t i = 0; i <= db; ++i) a[k - db + i] -= c * b[i];
  }
  return q;
}

inline std::vector<std::int64_t> phi_poly(std::uint64_t N) {
  std::vector<std::int64_t> num(N + 1, 0);
  num[0] = -1;
  num[N] = 1;
  for (std::uint64_t d = 1; d < N; ++d)
    if (N % d == 0) num = poly_divexact(num, phi_poly(d));
  return num;
}

// Remainder of a (length arbitrary) modulo the monic polynomial b.
inline std::vector<std::int64_t> poly_rem(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b) {
  const std::size_t db = b.size() - 1;
  if (a.size() < db) a.resize(db, 0);
  for (std::size_t k = a.size(); k-- > db;) {
    const std::int64_t c = a[k];
    if (!c) continue;
    for (std::size_t i = 0; i <= db; ++i) a[k - db + i] -= c * b[i];
  }
  a.resize(db);
  return a;
}

}  // namespace oracle
