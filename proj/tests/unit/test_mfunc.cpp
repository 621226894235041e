#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xpv/error.hpp"
#include "xpv/mfunc.hpp"

using namespace xpv;

namespace {

const PrimeTable& table() {
  static const PrimeTable t = sieve_primes(1000000);
  return t;
}

std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1;
  b %= m;
  while (e > 0) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

// Euler's criterion, independent of the reciprocity-based jacobi().
int legendre(std::int64_t a, std::int64_t p) {
  a = ((a % p) + p) % p;
  if (a == 0) return 0;
  return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

std::vector<MultiplicativeSpec> specs() {
  return {MultiplicativeSpec::constant_one(), MultiplicativeSpec::liouville(),
          MultiplicativeSpec::quadratic_character(15), MultiplicativeSpec::random_pm1(7)};
}

}  // namespace

TEST_CASE("jacobi agrees with Euler's criterion") {
  for (std::int64_t p : {3, 5, 7, 11, 101, 7919})
    for (std::int64_t a = -50; a < 200; ++a) CHECK(jacobi(a, p) == legendre(a, p));
  // Composite modulus: product of Legendre symbols.
  for (std::int64_t a = 0; a < 100; ++a) CHECK(jacobi(a, 15) == legendre(a, 3) * legendre(a, 5));
  CHECK_THROWS_AS(jacobi(1, 4), DomainError);
}

TEST_CASE("complete multiplicativity on random pairs") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::uint64_t> d(1, 1000000);
  for (const auto& s : specs()) {
    CAPTURE(s.description);
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t m = d(rng), n = d(rng);
      REQUIRE(f_value(s, m * n) == f_value(s, m) * f_value(s, n));
    }
  }
}

TEST_CASE("function specs") {
  CHECK(f_value(MultiplicativeSpec::liouville(), 12) == -1.0);
  CHECK(f_value(MultiplicativeSpec::liouville(), 36) == 1.0);
  CHECK(f_value(MultiplicativeSpec::quadratic_character(3), 6) == 0.0);
  CHECK(f_value(MultiplicativeSpec::quadratic_character(3), 4) == 1.0);
  const auto c = parse_mfunc_spec("custom:2=-0.5,3=0.25");
  CHECK(f_value(c, 12) == doctest::Approx(0.0625));
  CHECK(f_value(c, 5) == 1.0);
  const auto r1 = MultiplicativeSpec::random_pm1(9), r2 = parse_mfunc_spec("random_pm1:9");
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) CHECK(r1.prime_value(p) == r2.prime_value(p));
  CHECK(parse_mfunc_spec("chi:7").q == 7);
  CHECK_THROWS_AS(parse_mfunc_spec("chi:9"), DomainError);
  CHECK_THROWS_AS(parse_mfunc_spec("chi:4"), DomainError);
  CHECK_THROWS_AS(parse_mfunc_spec("custom:4=1"), DomainError);
  CHECK_THROWS_AS(parse_mfunc_spec("bogus"), UsageError);
  CHECK_THROWS_AS(f_value(MultiplicativeSpec::liouville(), kMaxFactorN + 1), ResourceError);
}

TEST_CASE("stats agree with direct summation") {
  for (const auto& s : specs()) {
    CAPTURE(s.description);
    const double x = 5000.5;
    double sum = 0, lsum = 0, conv = 0, u = 0, recip = 0;
    for (std::uint64_t n = 1; n <= 5000; ++n) {
      const double f = f_value(s, n);
      sum += f;
      lsum += f / static_cast<double>(n);
      conv += f * std::floor(x / static_cast<double>(n));
    }
    for (std::uint32_t p : table().primes()) {
      if (p > x) break;
      u += (1 - s.prime_value(p)) / p;
      recip += 1.0 / p;
    }
    const StatsRow r = stats(s, x, table());
    CHECK(r.M == doctest::Approx(sum / x).epsilon(1e-12));
    CHECK(r.L == doctest::Approx(lsum / std::log(x)).epsilon(1e-12));
    CHECK(r.conv_mean == doctest::Approx(conv / x).epsilon(1e-12));
    CHECK(r.u == doctest::Approx(u).epsilon(1e-12));
    CHECK(r.Lambda == doctest::Approx(u / recip).epsilon(1e-12));
  }
  // Several x in one pass return rows in input order.
  const auto rows = stats(MultiplicativeSpec::liouville(), {1000, 100, 100000}, table());
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].x == 100);
  CHECK(rows[1].M == stats(MultiplicativeSpec::liouville(), 100, table()).M);
  CHECK_THROWS_AS(stats(MultiplicativeSpec::liouville(), 1.5, table()), DomainError);
  CHECK_THROWS_AS(stats(MultiplicativeSpec::liouville(), 2e6, table()), PreconditionError);
}

TEST_CASE("character sums") {
  // Partial sums of (n/7): 1, 2, 1, 2, 1, 0, 0.
  const std::int64_t expect[] = {0, 1, 2, 1, 2, 1, 0, 0};
  for (int t = 0; t <= 7; ++t) CHECK(char_sum(7, t) == expect[t]);
  CHECK(char_sum(7, 7000 + 3) == char_sum(7, 3));
  for (std::int64_t q = 3; q <= 1000; q += 2)
    if (is_prime_u64(q)) CHECK(char_sum(q, q) == 0);
  CHECK(pv_ratio(3) == doctest::Approx(0.5255268625199613).epsilon(1e-14));
  CHECK(pv_ratio(7) == doctest::Approx(2.0 / (std::sqrt(7.0) * std::log(7.0))).epsilon(1e-14));
  CHECK_THROWS_AS(pv_ratio(9), DomainError);
  CHECK_THROWS_AS(pv_ratio(10000019), ResourceError);
}
