#pragma once

// Exact elements of Q(zeta_N): an integer residue modulo the N-th cyclotomic
// polynomial over a positive common denominator.
//
// The canonical form has coefficients c_0..c_{phi(N)-1} in the power basis
// 1, z, ..., z^{phi(N)-1}, with gcd(c, den) = 1 and den > 0, so two values of
// the same conductor are equal iff their representations are. Arithmetic on
// values of different conductors promotes both to the lcm first. Coefficient
// overflow raises std::overflow_error.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eik {

class Cyclotomic {
 public:
  Cyclotomic() = default;  // 0 with conductor 1

  static Cyclotomic integer(std::int64_t v);
  static Cyclotomic rational(std::int64_t num, std::int64_t den);
  // zeta_N^k for any integer k.
  static Cyclotomic root_of_unity(std::uint64_t N, std::int64_t k);
  // sum_k counts[k] * zeta_N^k; counts.size() must equal N.
  static Cyclotomic from_exponent_counts(std::uint64_t N, std::span<const std::int64_t> counts);

  std::uint64_t conductor() const { return N_; }
  const std::vector<std::int64_t>& coeffs() const { return c_; }
  std::int64_t denominator() const { return den_; }

  // Same value with conductor M; M must be a multiple of the current one.
  Cyclotomic promote(std::uint64_t M) const;

  Cyclotomic operator-() const;
  friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b);
  Cyclotomic& operator+=(const Cyclotomic& b) { return *this = *this + b; }
  Cyclotomic& operator-=(const Cyclotomic& b) { return *this = *this - b; }
  Cyclotomic& operator*=(const Cyclotomic& b) { return *this = *this * b; }
  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);

  // Complex conjugation zeta -> zeta^{-1}.
  Cyclotomic conj() const;
  // (num/den) * this, exact.
  Cyclotomic scaled(std::int64_t num, std::int64_t den) const;

  bool is_zero() const;
  // Some rational r with this == r, if the value is rational.
  bool is_rational() const;

  std::complex<double> to_complex() const;

  struct Abs {
    double value = 0;
    double error = 0;  // additive bound on |value - true modulus|
  };
  Abs abs() const;

  std::string to_string() const;

 private:
  static Cyclotomic reduce(std::uint64_t N, std::vector<std::int64_t> dense, std::int64_t den);
  // Expands to a length-N vector of counts with respect to zeta_N^k.
  std::vector<std::int64_t> to_counts(std::uint64_t M) const;
  void normalize();

  std::uint64_t N_ = 1;
  std::vector<std::int64_t> c_{0};
  std::int64_t den_ = 1;
};

// The N-th cyclotomic polynomial, low-degree coefficient first.
std::vector<std::int64_t> cyclotomic_polynomial(std::uint64_t N);

}  // namespace eik
