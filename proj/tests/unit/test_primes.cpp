#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xpv/error.hpp"
#include "xpv/primes.hpp"

using namespace xpv;

namespace {

bool trial_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

const PrimeTable& table_1e6() {
  static const PrimeTable t = sieve_primes(1000000);
  return t;
}

// Reference values from 50-digit mpmath evaluations.
struct LiOracle {
  double x;
  double li;
};
constexpr LiOracle kLi[] = {
    // li at the double nearest 1.0001, not at the decimal: the slope there is ~1e4.
    {1.0001, -8.633074707491412793534},
    {2.0, 1.045163780117492784844588889},
    {10.0, 6.165599504787297937522981},
    {1865.0, 296.9670020114855668087},
    {1e6, 78627.54915946218191986291},
    {1e9, 50849234.95700179800400879},
};

}  // namespace

TEST_CASE("sieve matches trial division below 20000") {
  const PrimeTable t = sieve_primes(20000);
  std::vector<std::uint32_t> ref;
  for (std::uint32_t n = 2; n <= 20000; ++n)
    if (trial_prime(n)) ref.push_back(n);
  REQUIRE(t.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(t[i] == ref[i]);
}

TEST_CASE("prime counts") {
  CHECK(table_1e6().count_le(1e6) == 78498);
  CHECK(sieve_primes(2).size() == 1);
  CHECK(sieve_primes(3).size() == 2);
  CHECK(sieve_primes(10000019).count_le(1e7) == 664579);
  const PrimeTable& t = table_1e6();
  CHECK(t.count_le(11) == 5);
  CHECK(t.count_lt(11) == 4);
  CHECK(t.count_le(10.999) == 4);
  CHECK(t.count_le(1.5) == 0);
  CHECK(t.contains(999983));
  CHECK_FALSE(t.contains(999985));
}

TEST_CASE("sieve limits and preconditions") {
  CHECK_THROWS_AS(sieve_primes(1), DomainError);
  CHECK_THROWS_AS(sieve_primes(1000, 100), ResourceError);
  const PrimeTable t = sieve_primes(100);
  CHECK_THROWS_AS(t.require_covers(101, "test"), PreconditionError);
  CHECK_NOTHROW(t.require_covers(100, "test"));
}

TEST_CASE("li oracles lie inside both enclosures") {
  for (const auto& o : kLi) {
    CAPTURE(o.x);
    const Enclosure s = log_integral_series(o.x);
    const Enclosure q = log_integral_quadrature(o.x);
    CHECK(std::fabs(s.mid() - o.li) <= 1e-12 * std::fabs(o.li) + 1e-12);
    CHECK(std::fabs(q.mid() - o.li) <= 1e-10 * std::fabs(o.li) + 1e-10);
    // The oracle is itself rounded to double.
    CHECK(s.lo <= o.li + 1e-15 * std::fabs(o.li));
    CHECK(s.hi >= o.li - 1e-15 * std::fabs(o.li));
  }
  CHECK_THROWS_AS(log_integral(1.0), DomainError);
}

TEST_CASE("li routes overlap at 1000 log-spaced points") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(std::log(1.01), std::log(1e9));
  int disjoint = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp(u(rng));
    if (!log_integral_series(x).overlaps(log_integral_quadrature(x))) ++disjoint;
  }
  CHECK(disjoint == 0);
}

TEST_CASE("prime sums") {
  const PrimeTable& t = table_1e6();
  CHECK(mertens_sum(10, t) == doctest::Approx(1.0 / 2 + 1.0 / 3 + 1.0 / 5 + 1.0 / 7).epsilon(1e-15));
  double ref = 0.0;
  for (double p : {2.0, 3.0, 5.0, 7.0}) ref += std::log(p) * std::log(p) / p;
  CHECK(log_square_sum(10, t) == doctest::Approx(ref).epsilon(1e-15));
  const PrimeSums sums(t, 100);
  CHECK(sums.reciprocal(0) == 0.0);
  CHECK(sums.reciprocal(4) == doctest::Approx(mertens_sum(10, t)).epsilon(1e-15));
}

TEST_CASE("prime zeta and nu2") {
  const PrimeTable& t = table_1e6();
  CHECK(prime_zeta(2, t).contains(0.4522474200410654985065));
  CHECK(prime_zeta(10, t).contains(0.0009936035744369802179));
  CHECK_THROWS_AS(prime_zeta(1, t), DomainError);
  const Enclosure n2 = nu2(t);
  CHECK(n2.contains(kEulerGamma - kMertens));
  CHECK(n2.hi <= 0.316);
  CHECK_THROWS_AS(nu2(sieve_primes(1000)), PreconditionError);
}

TEST_CASE("tail power sum bound") {
  CHECK(tail_power_sum_bound(0.5) == doctest::Approx(0.6925882299214159).epsilon(1e-14));
  CHECK(tail_power_sum_bound(1.0) == doctest::Approx(2.0 * 1.2551 / kE).epsilon(1e-14));
  CHECK_THROWS_AS(tail_power_sum_bound(0.0), DomainError);
  CHECK_THROWS_AS(tail_power_sum_bound(1.5), DomainError);
}

TEST_CASE("Miller-Rabin is exact on hard cases") {
  for (std::uint64_t n = 0; n < 5000; ++n) CHECK(is_prime_u64(n) == trial_prime(n));
  CHECK_FALSE(is_prime_u64(561));
  CHECK_FALSE(is_prime_u64(3215031751ULL));
  CHECK_FALSE(is_prime_u64(3825123056546413051ULL));
  CHECK(is_prime_u64(2305843009213693951ULL));
  CHECK(is_prime_u64(18446744073709551557ULL));
}

TEST_CASE("least prime 3 mod 4 above x") {
  CHECK(least_prime_3mod4_above(1.0) == 3);
  CHECK(least_prime_3mod4_above(3.0) == 7);
  CHECK(least_prime_3mod4_above(10.0) == 11);
  std::uint64_t ref = 1000001;
  while (!(ref % 4 == 3 && trial_prime(ref))) ++ref;
  CHECK(least_prime_3mod4_above(1e6) == ref);
  CHECK(least_prime_3mod4_above(1e6, &table_1e6()) == ref);
  CHECK_THROWS_AS(least_prime_3mod4_above(0.5), DomainError);
}
