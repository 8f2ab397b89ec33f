#include "eik/cyclotomic.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "eik/numtheory.hpp"

namespace eik {

namespace {

constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 22;

std::int64_t add_ck(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("cyclotomic: coefficient overflow");
  return r;
}

std::int64_t mul_ck(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("cyclotomic: coefficient overflow");
  return r;
}

std::uint64_t lcm_ck(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t g = std::gcd(a, b);
  std::uint64_t r;
  if (__builtin_mul_overflow(a / g, b, &r) || r > (std::uint64_t{1} << 40))
    throw std::overflow_error("cyclotomic: conductor promotion overflow");
  return r;
}

// Exact quotient of a by the monic polynomial b.
std::vector<std::int64_t> exact_div(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b) {
  const std::size_t db = b.size() - 1;
  if (a.size() < b.size()) throw std::logic_error("cyclotomic: bad division");
  std::vector<std::int64_t> quot(a.size() - db, 0);
  for (std::size_t k = a.size(); k-- > db;) {
    const std::int64_t c = a[k];
    quot[k - db] = c;
    if (c == 0) continue;
    for (std::size_t i = 0; i <= db; ++i) a[k - db + i] = add_ck(a[k - db + i], -mul_ck(c, b[i]));
  }
  for (std::size_t i = 0; i < db; ++i)
    if (a[i] != 0) throw std::logic_error("cyclotomic: inexact division");
  return quot;
}

struct Context {
  std::uint64_t N = 1;
  std::size_t phi = 1;
  std::vector<std::int64_t> Phi;    // monic, size phi + 1
  std::vector<std::int64_t> table;  // rows z^k mod Phi for k in [phi, N), empty if too large
};

std::shared_ptr<const Context> context(std::uint64_t N) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const Context>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(N); it != cache.end()) return it->second;

  auto ctx = std::make_shared<Context>();
  ctx->N = N;
  ctx->Phi = cyclotomic_polynomial(N);
  ctx->phi = ctx->Phi.size() - 1;
  const std::size_t phi = ctx->phi;
  if ((N - phi) * phi <= kMaxTableEntries) {
    ctx->table.resize((N - phi) * phi);
    std::vector<std::int64_t> row(phi);
    for (std::size_t i = 0; i < phi; ++i) row[i] = -ctx->Phi[i];
    for (std::uint64_t k = phi; k < N; ++k) {
      std::copy(row.begin(), row.end(), ctx->table.begin() + static_cast<std::ptrdiff_t>((k - phi) * phi));
      const std::int64_t top = row[phi - 1];
      for (std::size_t i = phi - 1; i > 0; --i) row[i] = add_ck(row[i - 1], -mul_ck(top, ctx->Phi[i]));
      row[0] = -mul_ck(top, ctx->Phi[0]);
    }
  }
  cache.emplace(N, ctx);
  return ctx;
}

}  // namespace

std::vector<std::int64_t> cyclotomic_polynomial(std::uint64_t N) {
  if (N == 0) throw std::invalid_argument("cyclotomic_polynomial: N must be positive");
  std::vector<std::int64_t> P{-1, 1};
  std::uint64_t rad = 1;
  for (std::uint64_t p : prime_factors(N)) {
    // Phi_{rad p}(x) = Phi_rad(x^p) / Phi_rad(x).
    std::vector<std::int64_t> sub((P.size() - 1) * p + 1, 0);
    for (std::size_t i = 0; i < P.size(); ++i) sub[i * p] = P[i];
    P = exact_div(std::move(sub), P);
    rad *= p;
  }
  const std::uint64_t s = N / rad;
  if (s == 1) return P;
  std::vector<std::int64_t> out((P.size() - 1) * s + 1, 0);
  for (std::size_t i = 0; i < P.size(); ++i) out[i * s] = P[i];
  return out;
}

Cyclotomic Cyclotomic::reduce(std::uint64_t N, std::vector<std::int64_t> dense, std::int64_t den) {
  auto ctx = context(N);
  const std::size_t phi = ctx->phi;
  Cyclotomic r;
  r.N_ = N;
  r.den_ = den;
  if (!ctx->table.empty()) {
    r.c_.assign(dense.begin(), dense.begin() + static_cast<std::ptrdiff_t>(phi));
    for (std::uint64_t k = phi; k < N; ++k) {
      const std::int64_t c = dense[k];
      if (c == 0) continue;
      const std::int64_t* row = ctx->table.data() + (k - phi) * phi;
      for (std::size_t i = 0; i < phi; ++i) r.c_[i] = add_ck(r.c_[i], mul_ck(c, row[i]));
    }
  } else {
    for (std::uint64_t k = N; k-- > phi;) {
      const std::int64_t c = dense[k];
      if (c == 0) continue;
      for (std::size_t i = 0; i < phi; ++i) dense[k - phi + i] = add_ck(dense[k - phi + i], -mul_ck(c, ctx->Phi[i]));
      dense[k] = 0;
    }
    dense.resize(phi);
    r.c_ = std::move(dense);
  }
  r.normalize();
  return r;
}

void Cyclotomic::normalize() {
  if (den_ == 0) throw std::domain_error("cyclotomic: zero denominator");
  if (den_ < 0) {
    den_ = -den_;
    for (auto& c : c_) c = -c;
  }
  std::int64_t g = den_;
  for (auto c : c_) g = std::gcd(g, c);
  bool zero = true;
  for (auto c : c_) zero = zero && c == 0;
  if (zero) {
    den_ = 1;
    return;
  }
  if (g > 1) {
    for (auto& c : c_) c /= g;
    den_ /= g;
  }
}

Cyclotomic Cyclotomic::integer(std::int64_t v) {
  Cyclotomic r;
  r.c_[0] = v;
  return r;
}

Cyclotomic Cyclotomic::rational(std::int64_t num, std::int64_t den) {
  Cyclotomic r;
  r.c_[0] = num;
  r.den_ = den;
  r.normalize();
  return r;
}

Cyclotomic Cyclotomic::root_of_unity(std::uint64_t N, std::int64_t k) {
  if (N == 0) throw std::invalid_argument("root_of_unity: N must be positive");
  std::vector<std::int64_t> dense(N, 0);
  dense[mod_floor(k, N)] = 1;
  return reduce(N, std::move(dense), 1);
}

Cyclotomic Cyclotomic::from_exponent_counts(std::uint64_t N, std::span<const std::int64_t> counts) {
  if (N == 0 || counts.size() != N) throw std::invalid_argument("from_exponent_counts: size mismatch");
  return reduce(N, std::vector<std::int64_t>(counts.begin(), counts.end()), 1);
}

std::vector<std::int64_t> Cyclotomic::to_counts(std::uint64_t M) const {
  if (M % N_ != 0) throw std::invalid_argument("cyclotomic: target conductor is not a multiple");
  std::vector<std::int64_t> dense(M, 0);
  const std::uint64_t s = M / N_;
  for (std::size_t k = 0; k < c_.size(); ++k) dense[k * s] = c_[k];
  return dense;
}

Cyclotomic Cyclotomic::promote(std::uint64_t M) const {
  if (M == N_) return *this;
  return reduce(M, to_counts(M), den_);
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) {
  const std::uint64_t M = lcm_ck(a.N_, b.N_);
  const Cyclotomic x = a.promote(M), y = b.promote(M);
  Cyclotomic r;
  r.N_ = M;
  const std::int64_t g = std::gcd(x.den_, y.den_);
  const std::int64_t fx = y.den_ / g, fy = x.den_ / g;
  r.den_ = mul_ck(x.den_, fx);
  r.c_.resize(x.c_.size());
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = add_ck(mul_ck(x.c_[i], fx), mul_ck(y.c_[i], fy));
  r.normalize();
  return r;
}

Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return a + (-b); }

Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
  const std::uint64_t M = lcm_ck(a.N_, b.N_);
  const Cyclotomic x = a.promote(M), y = b.promote(M);
  std::vector<std::int64_t> dense(M, 0);
  for (std::size_t i = 0; i < x.c_.size(); ++i) {
    if (x.c_[i] == 0) continue;
    for (std::size_t j = 0; j < y.c_.size(); ++j) {
      if (y.c_[j] == 0) continue;
      const std::size_t k = (i + j) % M;
      dense[k] = add_ck(dense[k], mul_ck(x.c_[i], y.c_[j]));
    }
  }
  return Cyclotomic::reduce(M, std::move(dense), mul_ck(x.den_, y.den_));
}

bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
  if (a.N_ == b.N_) return a.den_ == b.den_ && a.c_ == b.c_;
  const std::uint64_t M = lcm_ck(a.N_, b.N_);
  const Cyclotomic x = a.promote(M), y = b.promote(M);
  return x.den_ == y.den_ && x.c_ == y.c_;
}

Cyclotomic Cyclotomic::conj() const {
  std::vector<std::int64_t> dense(N_, 0);
  for (std::size_t k = 0; k < c_.size(); ++k) dense[(N_ - k) % N_] = c_[k];
  return reduce(N_, std::move(dense), den_);
}

Cyclotomic Cyclotomic::scaled(std::int64_t num, std::int64_t den) const {
  if (den == 0) throw std::domain_error("cyclotomic: zero denominator");
  Cyclotomic r = *this;
  for (auto& c : r.c_) c = mul_ck(c, num);
  r.den_ = mul_ck(r.den_, den);
  r.normalize();
  return r;
}

bool Cyclotomic::is_zero() const {
  for (auto c : c_)
    if (c != 0) return false;
  return true;
}

bool Cyclotomic::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

std::complex<double> Cyclotomic::to_complex() const {
  long double re = 0, im = 0;
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    const long double t = two_pi * static_cast<long double>(k) / static_cast<long double>(N_);
    re += static_cast<long double>(c_[k]) * std::cos(t);
    im += static_cast<long double>(c_[k]) * std::sin(t);
  }
  return {static_cast<double>(re / den_), static_cast<double>(im / den_)};
}

Cyclotomic::Abs Cyclotomic::abs() const {
  std::int64_t mx = 0;
  for (auto c : c_) mx = std::max<std::int64_t>(mx, std::llabs(c));
  const double err = static_cast<double>(N_) * static_cast<double>(mx) * std::ldexp(1.0, -50) / static_cast<double>(den_);
  return {std::abs(to_complex()), err};
}

std::string Cyclotomic::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < c_.size(); ++k) {
    const std::int64_t c = c_[k];
    if (c == 0) continue;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    const std::int64_t a = std::llabs(c);
    if (k == 0 || a != 1) os << a;
    if (k > 0) os << (a != 1 ? "*" : "") << "z" << N_ << (k > 1 ? "^" + std::to_string(k) : "");
  }
  if (first) os << "0";
  if (den_ == 1) return os.str();
  std::size_t terms = 0;
  for (auto c : c_) terms += c != 0;
  if (terms > 1) return "(" + os.str() + ")/" + std::to_string(den_);
  return os.str() + "/" + std::to_string(den_);
  return os.str();
}

}  // namespace eik
