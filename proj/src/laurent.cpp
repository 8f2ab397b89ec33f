#include "eik/laurent.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "eik/numtheory.hpp"

namespace eik {

LaurentFamily::LaurentFamily(std::uint32_t dim, std::vector<Monomial> monomials, FamilyKind kind, std::uint32_t n,
                             std::uint32_t m)
    : dim_(dim), monomials_(std::move(monomials)), kind_(kind), n_(n), m_(m) {
  if (dim_ == 0) throw std::invalid_argument("LaurentFamily: dimension must be positive");
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& mono : monomials_) {
    if (mono.exponent.size() != dim_) throw std::invalid_argument("LaurentFamily: exponent has the wrong length");
    if (!seen.insert(mono.exponent).second)
      throw std::invalid_argument("LaurentFamily: repeated exponent vector");
  }
}

LaurentFamily LaurentFamily::f_family(std::uint32_t n) {
  if (n == 0) throw std::invalid_argument("f_family: n must be >= 1");
  const std::uint32_t v = n + 2;
  std::vector<Monomial> mons;
  auto unit = [&](std::size_t i) {
    std::vector<std::int64_t> e(v, 0);
    e[i] = 1;
    return e;
  };
  mons.push_back({unit(n), {1, 0}, "y"});
  mons.push_back({unit(n + 1), {1, 0}, "z"});
  for (std::uint32_t i = 0; i < n; ++i) {
    auto e = unit(i);
    e[n] = e[n + 1] = 1;
    mons.push_back({e, {-1, 0}, "x" + std::to_string(i + 1) + "*y*z"});
  }
  std::vector<std::int64_t> last(v, -1);
  last[n] = last[n + 1] = 1;
  mons.push_back({last, {-1, 1}, "y*z/(x1...xn)"});
  return LaurentFamily(v, std::move(mons), FamilyKind::f, n, 0);
}

LaurentFamily LaurentFamily::fhat_frobenius(std::uint32_t n, std::uint32_t m, std::uint32_t pk) {
  if (n == 0 || m == 0 || pk == 0) throw std::invalid_argument("fhat_family: n, m must be >= 1");
  const std::uint32_t v = n + 2;
  const auto spk = static_cast<std::int64_t>(pk);
  std::vector<Monomial> mons;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<std::int64_t> e(v, 0);
    e[i] = spk;
    mons.push_back({e, {-1, 0}, "x" + std::to_string(i + 1)});
  }
  std::vector<std::int64_t> e(v, 0);
  e[n] = 1;
  mons.push_back({e, {1, 0}, "x" + std::to_string(n + 1)});
  e.assign(v, 0);
  e[n] = -1;
  e[n + 1] = 1;
  mons.push_back({e, {1, 0}, "x" + std::to_string(n + 2) + "/x" + std::to_string(n + 1)});
  e.assign(v, -spk);
  e[n] = 0;
  e[n + 1] = spk * m;
  mons.push_back({e, {-1, pk}, "w*x" + std::to_string(n + 2) + "^m/(x1...xn)"});
  return LaurentFamily(v, std::move(mons), pk == 1 ? FamilyKind::fhat : FamilyKind::custom, n, m);
}

LaurentFamily LaurentFamily::fhat_family(std::uint32_t n, std::uint32_t m) { return fhat_frobenius(n, m, 1); }

std::string LaurentFamily::name() const {
  std::ostringstream os;
  switch (kind_) {
    case FamilyKind::f:
      os << "f(n=" << n_ << ")";
      break;
    case FamilyKind::fhat:
      os << "fhat(n=" << n_ << ",m=" << m_ << ")";
      break;
    case FamilyKind::custom:
      os << "custom(dim=" << dim_ << ",terms=" << monomials_.size() << ")";
      break;
  }
  return os.str();
}

LaurentFamily LaurentFamily::restrict(const std::vector<std::size_t>& indices) const {
  std::vector<Monomial> mons;
  for (std::size_t i : indices) {
    if (i >= monomials_.size()) throw std::out_of_range("LaurentFamily::restrict: bad monomial index");
    mons.push_back(monomials_[i]);
  }
  return LaurentFamily(dim_, std::move(mons), FamilyKind::custom, n_, m_);
}

Elt field_constant(const FieldTable& F, std::int64_t c) { return F.from_int(mod_floor(c, F.p())); }

std::vector<Elt> LaurentFamily::coefficients(const FieldTable& F, Elt w) const {
  std::vector<Elt> out;
  for (const auto& mono : monomials_) {
    Elt v = field_constant(F, mono.slot.constant);
    if (mono.slot.w_power > 0) {
      if (w.is_zero()) throw std::invalid_argument("LaurentFamily: parameter w must be nonzero");
      v = F.mul(v, F.pow(w, mono.slot.w_power));
    }
    out.push_back(v);
  }
  return out;
}

Elt LaurentFamily::evaluate(const FieldTable& F, const std::vector<Elt>& coeffs, const std::vector<Elt>& x) const {
  if (coeffs.size() != monomials_.size() || x.size() != dim_)
    throw std::invalid_argument("LaurentFamily::evaluate: size mismatch");
  Elt acc = Elt::zero();
  for (std::size_t j = 0; j < monomials_.size(); ++j) {
    if (coeffs[j].is_zero()) continue;
    std::int64_t e = 0;
    for (std::uint32_t i = 0; i < dim_; ++i) {
      if (x[i].is_zero()) throw std::domain_error("LaurentFamily::evaluate: point is off the torus");
      e += monomials_[j].exponent[i] * static_cast<std::int64_t>(x[i].log());
    }
    acc = F.add(acc, F.mul(coeffs[j], F.from_log(e)));
  }
  return acc;
}

}  // namespace eik
