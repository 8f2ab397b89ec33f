#include "eik/ffield.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "eik/errors.hpp"
#include "eik/numtheory.hpp"

namespace eik {

namespace {

// Multiplies the residue `a` (low-degree-first digits) by t modulo the monic
// polynomial with low coefficients `f`.
void times_t(std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& f, std::uint32_t p) {
  const std::size_t n = a.size();
  const std::uint32_t top = a[n - 1];
  for (std::size_t i = n - 1; i > 0; --i) {
    a[i] = static_cast<std::uint32_t>((a[i - 1] + std::uint64_t{p - top} * f[i] % p) % p);
  }
  a[0] = static_cast<std::uint32_t>(std::uint64_t{p - top} * f[0] % p);
}

std::uint32_t encode(const std::vector<std::uint32_t>& a, std::uint32_t p) {
  std::uint64_t code = 0;
  for (std::size_t i = a.size(); i-- > 0;) code = code * p + a[i];
  return static_cast<std::uint32_t>(code);
}

}  // namespace

FieldTable FieldTable::build(std::uint32_t p, std::uint32_t n, std::uint64_t budget) {
  if (!is_prime(p)) throw std::invalid_argument("build_field: p = " + std::to_string(p) + " is not prime");
  if (n == 0) throw std::invalid_argument("build_field: degree must be >= 1");
  std::uint64_t q64 = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    q64 *= p;
    if (q64 > budget || q64 >= Elt::kZeroTag)
      throw BudgetError("build_field: " + std::to_string(p) + "^" + std::to_string(n) +
                        " exceeds the table budget " + std::to_string(budget));
  }
  const auto q = static_cast<std::uint32_t>(q64);
  const std::uint32_t order = q - 1;

  FieldTable F;
  F.p_ = p;
  F.n_ = n;
  F.q_ = q;

  // Candidates (c_0, ..., c_{n-1}) in lexicographic order, c_0 most significant.
  std::vector<std::uint32_t> f(n), cur(n), antilog(order);
  const std::uint64_t count = q64;
  bool found = false;
  for (std::uint64_t idx = 0; idx < count && !found; ++idx) {
    std::uint64_t rest = idx;
    for (std::size_t i = n; i-- > 0;) {
      f[i] = static_cast<std::uint32_t>(rest % p);
      rest /= p;
    }
    if (f[0] == 0) continue;
    std::fill(cur.begin(), cur.end(), 0);
    cur[0] = 1;
    std::uint32_t period = 0;
    for (std::uint32_t j = 0; j < order; ++j) {
      antilog[j] = encode(cur, p);
      times_t(cur, f, p);
      if (cur[0] == 1 && std::all_of(cur.begin() + 1, cur.end(), [](auto c) { return c == 0; })) {
        period = j + 1;
        break;
      }
    }
    if (period == order) found = true;
  }
  if (!found) throw std::logic_error("build_field: no primitive polynomial found");

  F.modulus_.assign(f.begin(), f.end());
  F.modulus_.push_back(1);
  F.antilog_ = std::move(antilog);
  F.log_.assign(q, Elt::kZeroTag);
  for (std::uint32_t j = 0; j < order; ++j) F.log_[F.antilog_[j]] = j;
  F.zech_.resize(order);
  for (std::uint32_t j = 0; j < order; ++j) {
    const std::uint32_t code = F.antilog_[j];
    const std::uint32_t c0 = code % p;
    const std::uint32_t bumped = code - c0 + (c0 + 1) % p;
    F.zech_[j] = F.log_[bumped];
  }
  F.minus_one_log_ = (p == 2) ? 0 : order / 2;
  return F;
}

Elt FieldTable::from_log(std::int64_t e) const {
  return Elt::from_log(static_cast<std::uint32_t>(mod_floor(e, order())));
}

Elt FieldTable::inv(Elt x) const {
  if (x.is_zero()) throw std::domain_error("field_arith: inversion of zero");
  return Elt::from_log(x.log() == 0 ? 0 : order() - x.log());
}

Elt FieldTable::pow(Elt x, std::int64_t e) const {
  if (x.is_zero()) {
    if (e == 0) return one();
    if (e < 0) throw std::domain_error("field_arith: negative power of zero");
    return x;
  }
  const std::uint64_t em = mod_floor(e, order());
  return Elt::from_log(static_cast<std::uint32_t>(mulmod(x.log(), em, order())));
}

Elt FieldTable::frobenius(Elt x, std::uint32_t k) const {
  if (x.is_zero()) return x;
  const std::uint64_t pk = powmod(p_, k, order());
  return Elt::from_log(static_cast<std::uint32_t>(mulmod(x.log(), pk, order())));
}

std::uint32_t FieldTable::to_int(Elt x) const { return x.is_zero() ? 0 : antilog_[x.log()]; }

Elt FieldTable::from_int(std::uint64_t code) const {
  if (code >= q_) throw std::out_of_range("field element code out of range");
  const std::uint32_t l = log_[code];
  return l == Elt::kZeroTag ? Elt::zero() : Elt::from_log(l);
}

std::vector<std::uint32_t> FieldTable::coeffs(Elt x) const {
  std::vector<std::uint32_t> out(n_);
  std::uint32_t code = to_int(x);
  for (std::uint32_t i = 0; i < n_; ++i) {
    out[i] = code % p_;
    code /= p_;
  }
  return out;
}

Elt FieldTable::from_coeffs(std::span<const std::uint32_t> c) const {
  if (c.size() > n_) throw std::invalid_argument("from_coeffs: too many coefficients");
  std::uint64_t code = 0;
  for (std::size_t i = c.size(); i-- > 0;) code = code * p_ + c[i] % p_;
  return from_int(code);
}

std::string FieldTable::describe() const {
  std::ostringstream os;
  os << "F_" << q_ << " = F_" << p_ << "[t]/(";
  bool first = true;
  for (std::size_t i = modulus_.size(); i-- > 0;) {
    if (modulus_[i] == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (modulus_[i] != 1 || i == 0) os << modulus_[i];
    if (i >= 1) os << "t";
    if (i >= 2) os << "^" << i;
  }
  os << ")";
  return os.str();
}

FieldPtr field(std::uint32_t p, std::uint32_t n, std::uint64_t budget) {
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, FieldPtr> cache;
  {
    std::lock_guard lock(mu);
    auto it = cache.find({p, n});
    if (it != cache.end()) {
      if (it->second->q() > budget)
        throw BudgetError("field: F_" + std::to_string(it->second->q()) + " exceeds the table budget");
      return it->second;
    }
  }
  auto built = std::make_shared<const FieldTable>(FieldTable::build(p, n, budget));
  std::lock_guard lock(mu);
  return cache.emplace(std::make_pair(p, n), std::move(built)).first->second;
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> embedding_roots(const FieldTable& sub, const FieldTable& sup) {
  if (sub.p() != sup.p() || sup.n() % sub.n() != 0)
    throw std::invalid_argument("embedding: F_" + std::to_string(sub.q()) + " is not a subfield of F_" +
                                std::to_string(sup.q()));
  const std::uint64_t k = std::uint64_t{sup.order()} / sub.order();
  std::vector<std::uint64_t> roots;
  const auto& mod = sub.modulus();
  for (std::uint64_t j = 0; j < std::max<std::uint64_t>(sub.order(), 1); ++j) {
    if (std::gcd(j, std::uint64_t{sub.order()}) != 1) continue;
    const Elt r = sup.from_log(static_cast<std::int64_t>(k * j));
    Elt acc = Elt::zero();
    for (std::size_t i = mod.size(); i-- > 0;) acc = sup.add(sup.mul(acc, r), sup.from_int(mod[i]));
    if (acc.is_zero()) roots.push_back(k * j);
  }
  return roots;
}

Embedding make_embedding(FieldPtr sub, FieldPtr sup) {
  auto roots = embedding_roots(*sub, *sup);
  if (roots.empty()) throw std::logic_error("embedding: modulus has no root in the extension");
  return Embedding{std::move(sub), std::move(sup), roots.front()};
}

Elt Embedding::apply(Elt x) const {
  if (x.is_zero()) return x;
  return Elt::from_log(static_cast<std::uint32_t>(mulmod(x.log(), root_log, sup->order())));
}

bool Embedding::in_image(Elt y) const {
  if (y.is_zero()) return true;
  const std::uint64_t k = std::uint64_t{sup->order()} / sub->order();
  return y.log() % k == 0;
}

Elt Embedding::pull(Elt y) const {
  if (y.is_zero()) return y;
  const std::uint64_t k = std::uint64_t{sup->order()} / sub->order();
  if (y.log() % k != 0) throw std::domain_error("embedding: element is not in the subfield");
  const std::uint64_t j = root_log / k;
  const std::uint64_t e = mulmod(y.log() / k, invmod(j, sub->order()), sub->order());
  return Elt::from_log(static_cast<std::uint32_t>(e));
}

Elt Embedding::trace(Elt y) const {
  Elt acc = Elt::zero();
  if (y.is_zero()) return acc;
  std::uint64_t e = y.log();
  for (std::uint32_t i = 0; i < degree(); ++i) {
    acc = sup->add(acc, Elt::from_log(static_cast<std::uint32_t>(e)));
    e = mulmod(e, sub->q(), sup->order());
  }
  return pull(acc);
}

Elt Embedding::norm(Elt y) const {
  if (y.is_zero()) return y;
  const std::uint64_t k = std::uint64_t{sup->order()} / sub->order();
  return pull(Elt::from_log(static_cast<std::uint32_t>(mulmod(y.log(), k, sup->order()))));
}

std::pair<Elt, Elt> subfield_trace_norm(FieldPtr sub, FieldPtr sup, Elt x) {
  const Embedding e = make_embedding(std::move(sub), std::move(sup));
  return {e.trace(x), e.norm(x)};
}

}  // namespace eik
