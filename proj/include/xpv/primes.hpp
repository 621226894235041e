#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xpv/numerics.hpp"

namespace xpv {

// Default ceiling on sieve limits; XPV_SIEVE_LIMIT overrides it.
inline constexpr std::uint64_t kDefaultSieveCap = 1'000'000'000;

std::uint64_t sieve_cap_from_env();

// All primes <= limit, strictly increasing. Immutable once built.
class PrimeTable {
 public:
  PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes);

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint32_t> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }
  std::uint32_t operator[](std::size_t i) const { return primes_[i]; }

  // pi(x): number of primes <= x.
  std::size_t count_le(double x) const;
  // pi(x-): number of primes < x.
  std::size_t count_lt(double x) const;
  bool contains(std::uint64_t n) const;

  // Throws PreconditionError unless limit() >= x.
  void require_covers(double x, const char* who) const;

 private:
  std::uint64_t limit_;
  std::vector<std::uint32_t> primes_;
};

// Segmented sieve of Eratosthenes over odd numbers.
PrimeTable sieve_primes(std::uint64_t limit, std::uint64_t cap = sieve_cap_from_env());

// Prefix sums of 1/p and log^2(p)/p over a table, each entry the correctly
// compensated running total (rounded once).
class PrimeSums {
 public:
  // Covers the primes <= up_to (all of them by default).
  explicit PrimeSums(const PrimeTable& table, double up_to = 1e300);

  const PrimeTable& table() const { return *table_; }
  // Sum over the first n primes (n may be 0).
  double reciprocal(std::size_t n) const { return n == 0 ? 0.0 : recip_[n - 1]; }
  double log_square(std::size_t n) const { return n == 0 ? 0.0 : log2_[n - 1]; }

 private:
  const PrimeTable* table_;
  std::vector<double> recip_;
  std::vector<double> log2_;
};

// li(x) = PV integral of 1/log t over [0, x], x > 1. Agreement of the two
// independent routes is checked by the test suite; log_integral uses the
// series and returns its rigorous truncation/rounding enclosure.
Enclosure log_integral(double x);
Enclosure log_integral_series(double x);
Enclosure log_integral_quadrature(double x);

// Sum over p <= x of 1/p.
double mertens_sum(double x, const PrimeTable& table);
// Sum over p <= x of log^2(p)/p.
double log_square_sum(double x, const PrimeTable& table);

// P(k) = sum over all primes of p^-k: finite part plus N^(1-k)/(k-1) tail.
Enclosure prime_zeta(int k, const PrimeTable& table);

// sum_{k>=2} P(k)/k, which equals gamma - M.
Enclosure nu2(const PrimeTable& table);

// (1+alpha) * 1.2551 / e, the chain bound on sum_{p > exp(1/alpha)} p^-(1+alpha).
double tail_power_sum_bound(double alpha);

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n);

// Least prime l > x with l = 3 (mod 4). The table, when it covers the
// candidate, replaces the primality test.
std::uint64_t least_prime_3mod4_above(double x, const PrimeTable* table = nullptr);

}  // namespace xpv
