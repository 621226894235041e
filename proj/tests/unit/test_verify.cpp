#include <doctest.h>

#include <cmath>
#include <string>

#include "xpv/error.hpp"
#include "xpv/verify.hpp"

using namespace xpv;

namespace {

const PrimeTable& table() {
  static const PrimeTable t = sieve_primes(1000000);
  return t;
}

// pi(x) by trial division, independent of the sieve.
std::size_t pi_trial(double x) {
  std::size_t count = 0;
  for (long n = 2; n <= static_cast<long>(std::floor(x)); ++n) {
    bool prime = true;
    for (long d = 2; d * d <= n; ++d)
      if (n % d == 0) {
        prime = false;
        break;
      }
    count += prime;
  }
  return count;
}

}  // namespace

TEST_CASE("registry lookups") {
  CHECK(find_check("pi-li-1").kind == SweepKind::prime_step);
  CHECK(find_check("li-lower").kind == SweepKind::continuous);
  CHECK(find_check("tail-power").kind == SweepKind::alpha_grid);
  CHECK_THROWS_AS(find_check("no-such-check"), UsageError);
  for (const auto& c : check_registry()) CHECK_FALSE(c.quote.empty());
}

TEST_CASE("one-sided limits at a prime") {
  const CheckSpec& c = find_check("pnt-upper");
  // LHS is pi(x): the left limit at 61 counts primes below 61 only.
  const SidePair left = evaluate_check(c, 61, Side::left, table());
  const SidePair at = evaluate_check(c, 61, Side::at, table());
  CHECK(left.lhs == static_cast<double>(pi_trial(60.5)));
  CHECK(at.lhs == static_cast<double>(pi_trial(61)));
}

TEST_CASE("passing sweeps") {
  for (const char* id : {"pnt-lower", "pnt-upper"}) {
    CAPTURE(id);
    const auto r = verify_inequality(id, 59, 100000, table());
    CHECK(r.pass);
    CHECK(r.failing_points == 0);
    CHECK(r.worst_margin > 0);
  }
  CHECK(verify_inequality("li-upper", 1865, 1e6, table()).pass);
  CHECK(verify_inequality("tail-power", 0, 1, table(), {.lo_open = true}).pass);
  const auto mb = verify_inequality("mertens-bracket", 2, 1e6, table());
  CHECK(mb.pass);
  CHECK(mb.arg_min == 2.0);
}

TEST_CASE("a failing sweep reports its last failure") {
  const auto r = verify_inequality("log2p-plain", 1, 1000, table(), {.lo_open = true});
  CHECK_FALSE(r.pass);
  CHECK(r.verdict == Verdict::fail);
  REQUIRE(r.last_failure);
  CHECK(*r.last_failure >= 3.0);
  const auto li = verify_inequality("li-lower", 2, 100, table());
  CHECK_FALSE(li.pass);
  REQUIRE(li.crossover);
  CHECK(*li.crossover == doctest::Approx(10.3973).epsilon(1e-4));
}

TEST_CASE("ranges outside the validity domain are rejected") {
  CHECK_THROWS(verify_inequality("pnt-lower", 2, 58, table()));
  CHECK_THROWS_AS(verify_inequality("pnt-lower", 59, 2e6, table()), PreconditionError);
}

TEST_CASE("merge at a critical point equals a single sweep") {
  for (const char* id : {"pi-li-2", "mertens-remainder", "pnt-upper"}) {
    CAPTURE(id);
    const double a = std::string(id) == "pnt-upper" ? 59 : 2;
    const double m = 7919;  // prime
    const auto whole = verify_inequality(id, a, 200000, table());
    const auto left = verify_inequality(id, a, m, table());
    const auto right = verify_inequality(id, m, 200000, table(), {.lo_open = true});
    const auto merged = merge(left, right);
    CHECK(merged.verdict == whole.verdict);
    CHECK(merged.worst_margin == whole.worst_margin);
    CHECK(merged.arg_min == whole.arg_min);
    CHECK(merged.failing_points == whole.failing_points);
  }
}

TEST_CASE("thread count does not change a sweep") {
  const auto one = verify_inequality("pi-li-3", 2, 1e6, table(), {.threads = 1});
  const auto four = verify_inequality("pi-li-3", 2, 1e6, table(), {.threads = 4});
  CHECK(one.worst_margin == four.worst_margin);
  CHECK(one.arg_min == four.arg_min);
  CHECK(one.evaluation_count == four.evaluation_count);
  CHECK(one.failing_points == four.failing_points);
  CHECK(one.gap_margin_lower == four.gap_margin_lower);
}
