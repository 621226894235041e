#include <doctest.h>

#include <cmath>

#include "xpv/error.hpp"
#include "xpv/mean_value.hpp"

using namespace xpv;

namespace {

const PeriodicF& f() {
  static const PeriodicF pf = PeriodicF::build(solve_K().mid());
  return pf;
}

const PrimeTable& table() {
  static const PrimeTable t = sieve_primes(1000000);
  return t;
}

}  // namespace

TEST_CASE("K solves both forms of its defining equation") {
  const Enclosure K = solve_K();
  CHECK(K.width() <= 1e-10);
  // Reference root of (2/pi)(sin t - K t) = 1 - 2K, t = arccos K, by mpmath.
  CHECK(K.contains(0.32867416290853));
  CHECK(std::fabs(k_theta_residual(K.mid())) < 1e-12);
  CHECK(periodic_mean(K.mid()) == doctest::Approx(1.0 - K.mid()).epsilon(1e-12));
}

TEST_CASE("periodic function invariants") {
  CHECK(f().mean == doctest::Approx(1.0 - f().K).epsilon(1e-9));
  CHECK(f().sup == doctest::Approx(1.0 + f().K).epsilon(1e-12));
  CHECK(f().variation == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("tail sums") {
  CHECK(tail_sum_small(2.67, 0) == doctest::Approx(2.30027).epsilon(1e-5));
  CHECK(tail_sum_small(2.67, 10) < tail_sum_small(2.67, 0));
  for (double tau : {1.0, 3.96, 50.0, 1e4}) {
    CAPTURE(tau);
    const double em = tail_large_at(3.61, tau, 1000000);
    const double direct = tail_large_at_direct(3.61, tau, 1000000);
    CHECK(em >= direct);
    CHECK(em - direct < 1e-8 * (1.0 + direct));
  }
  const TailSup s = tail_sum_large(3.61, 300000);
  for (double tau = 1.0; tau < 1e6; tau *= 1.37) CHECK(tail_large_at(3.61, tau, 300000) <= s.value);
}

TEST_CASE("small-tau evaluator components") {
  const double c = 2.67;
  const double K = f().K;
  // With no tail the bound is the variation term plus the li term.
  const double expected = kPi / (2 * c) * 4 + (2.3391 / c) * (1 + K);
  CHECK(std::fabs(error_bound_small(c, 0.0, f()) - expected) < 1e-3);
  // The tail enters linearly through the remainder coefficient.
  CHECK(error_bound_small(c, 1.0, f()) - error_bound_small(c, 0.0, f()) ==
        doctest::Approx(0.1522 * 4).epsilon(1e-9));
}

TEST_CASE("case bounds at the default parameters") {
  const CaseBounds b = lemma47_case_bounds(ErrorParams{}, f());
  CHECK(b.C_I == doctest::Approx(2.62910).epsilon(1e-5));
  CHECK(b.C_II == doctest::Approx(7.54677).epsilon(1e-5));
  CHECK(b.C_III == doctest::Approx(3.14434).epsilon(1e-5));
  CHECK(b.C_IV == doctest::Approx(4.85615).epsilon(1e-5));
  CHECK(b.C0 == b.C_II);
  CHECK(small_tau_block(2.67, 0, f()) == b.C_II);
  CHECK_THROWS_AS(lemma47_case_bounds(ErrorParams{.c = 0.5}, f()), DomainError);
}

TEST_CASE("optimizer on a small grid picks the lexicographic minimizer") {
  OptimizeGrids g;
  g.c = {2.5, 2.6, 2.7, 2.8};
  g.k1 = {0, 5};
  g.eps = {1.0, 3.61};
  g.k2 = {1000, 300000};
  const OptimizeResult r = optimize_C0(g, f());
  double brute = 1e300;
  for (double c : g.c)
    for (int k1 : g.k1)
      for (double e : g.eps)
        for (auto k2 : g.k2) {
          const CaseBounds b = lemma47_case_bounds(ErrorParams{c, k1, e, k2}, f());
          brute = std::min(brute, b.C0);
        }
  CHECK(r.C0 == brute);
  CHECK(lemma47_case_bounds(r.best, f()).C0 == r.C0);
  CHECK_THROWS_AS(optimize_C0(OptimizeGrids{}, f()), UsageError);
}

TEST_CASE("integral and nu3") {
  const Enclosure i = verify_integral_945();
  CHECK(i.contains(9.443261310467));
  CHECK(i.width() < 1e-11);
  const Enclosure K = solve_K();
  const Enclosure n = nu3(1000000, K);
  CHECK(n.contains(4.337867148));
  CHECK(n.hi <= 4.36);
  // A shorter truncation gives a wider but consistent enclosure.
  const Enclosure n3 = nu3(1000, K);
  CHECK(n3.lo <= n.lo);
  CHECK(n3.hi >= n.hi);
}

TEST_CASE("ledger identities and ranges") {
  ConstantLedger l = assemble_ledger(7.28, table());
  CHECK(l.a >= 5.4e5);
  CHECK(l.a <= 5.6e5);
  CHECK(l.final_constant >= 9.5e5);
  CHECK(l.final_constant <= 9.9e5);
  const double C = l.C, a = l.a, fin = l.final_constant;
  ledger_identities(l);
  CHECK(l.C == C);
  CHECK(l.a == a);
  CHECK(l.final_constant == fin);
  CHECK(l.nu1 == doctest::Approx(0.92345097).epsilon(1e-8));
}

TEST_CASE("delta and epsilon") {
  const double K = f().K;
  CHECK(delta(0.99, K).log10() == doctest::Approx(-3.3938e10).epsilon(1e-4));
  CHECK(delta(0.99, K).value == 0.0);
  const LogValue dc = delta_candidate(0.99, K);
  CHECK(dc.value == doctest::Approx(0.2 * std::pow(0.99 / 9.75e5, 1 / (2 * K))).epsilon(1e-12));
  const double d = 1.56e-10;
  const double base = epsilon_exponent(1, 0.99, K, d).value;
  CHECK(epsilon_exponent(2, 0.99, K, d).value == 2 * base);
  for (double lambda : {10.0, 1e5})
    CHECK(epsilon_exponent(lambda, 0.99, K, d).value ==
          doctest::Approx(lambda * base).epsilon(4 * 2.220446049250313e-16));
  CHECK_THROWS_AS(epsilon_exponent(1, 1.5, K), DomainError);
  CHECK_THROWS_AS(epsilon_exponent(1, 0.5, K, 0.5), DomainError);
}

TEST_CASE("sample table scaling") {
  const PaperTable& p = paper_table1();
  const Table1Report r = table1_report(p.c1, p.c, paper_delta_map(), f().K);
  CHECK(r.common_factor == doctest::Approx(1.416).epsilon(1e-3));
  CHECK(r.ratio_spread_excluding_outliers < 0.02);
  for (const auto& chk : r.checks) {
    CAPTURE(chk.name);
    CHECK(chk.worst_unflagged <= chk.tolerance);
  }
}
