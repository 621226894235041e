#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xpv/mean_value.hpp"
#include "xpv/primes.hpp"

namespace xpv {

// Jacobi symbol (a/n) for odd n >= 1.
int jacobi(std::int64_t a, std::int64_t n);

enum class MfKind { quadratic_character, liouville, random_pm1, constant_one, custom };

// A completely multiplicative f: Z -> [-1, 1], given by its prime values.
struct MultiplicativeSpec {
  MfKind kind = MfKind::constant_one;
  std::uint64_t q = 0;     // quadratic_character modulus
  std::uint64_t seed = 0;  // random_pm1
  std::map<std::uint64_t, double> custom;  // primes not listed map to 1
  std::string description;

  static MultiplicativeSpec quadratic_character(std::uint64_t q);
  static MultiplicativeSpec liouville();
  static MultiplicativeSpec random_pm1(std::uint64_t seed);
  static MultiplicativeSpec constant_one();
  static MultiplicativeSpec custom_values(std::map<std::uint64_t, double> values);

  // f(p) for a prime p.
  double prime_value(std::uint64_t p) const;
};

// "constant_one", "liouville", "quadratic_character:<q>" (or "chi:<q>"),
// "random_pm1:<seed>", "custom:<p>=<v>,<p>=<v>,...".
MultiplicativeSpec parse_mfunc_spec(std::string_view text);

inline constexpr std::uint64_t kMaxFactorN = 1'000'000'000'000ULL;
inline constexpr double kMaxStatsX = 1e8;

// Product of f(p)^a over the factorization of n (trial division, n <= 1e12).
double f_value(const MultiplicativeSpec& spec, std::uint64_t n, const PrimeTable* table = nullptr);

struct StatsRow {
  double x = 0.0;
  double M = 0.0;          // (1/x) sum_{n<=x} f(n)
  double L = 0.0;          // (1/log x) sum_{n<=x} f(n)/n
  double u = 0.0;          // sum_{p<=x} (1 - f(p))/p
  double Lambda = 0.0;     // u / sum_{p<=x} 1/p
  double conv_mean = 0.0;  // (1/x) sum_{d<=x} f(d) floor(x/d)
};

// One pass over n <= max(xs) (segmented factorization), rows in input order.
std::vector<StatsRow> stats(const MultiplicativeSpec& spec, const std::vector<double>& xs,
                            const PrimeTable& table);
StatsRow stats(const MultiplicativeSpec& spec, double x, const PrimeTable& table);

// sum_{n<=t} (n/q).
std::int64_t char_sum(std::int64_t q, std::int64_t t);

inline constexpr std::uint64_t kMaxPvModulus = 10'000'000;

// max_{1<=t<=q} |S(t)| / (sqrt(q) log q) for an odd prime q <= 1e7.
double pv_ratio(std::int64_t q);

enum class CheckStatus { pass, fail, vacuous };
const char* to_string(CheckStatus s) noexcept;

struct EmpiricalCheck {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double lhs = 0.0;
  double rhs = 0.0;  // for the Lemma-type check this is log delta
  double slack = 0.0;  // rhs/lhs for (i), lhs/rhs for (iii); c - |M| when vacuous
};

struct EmpiricalReport {
  StatsRow row;
  std::vector<EmpiricalCheck> checks;
};

// (i) |M| <= final exp(-K u); (ii) |M| >= c implies L >= delta(c);
// (iii) conv_mean >= 0.2 log x exp(-u(1.42 e^(u/2) + 1/2)). All o(1) terms
// are dropped.
EmpiricalReport empirical_checks(const StatsRow& row, double c, const ConstantLedger& ledger);

}  // namespace xpv
