#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xpv/numerics.hpp"
#include "xpv/primes.hpp"

namespace xpv {

// Constant in the exponent of the explicit zero-free-region PNT remainder.
inline constexpr double kPntScale = 6.455;
// Error-term constants of the partial-summation lemma.
inline constexpr double kRemainderCoeff = 0.1522;
inline constexpr double kLiTermCoeff = 2.3391;  // 0.9794 + 1.3597

// Root of (1/2pi) * integral_0^2pi |cos t - K| dt = 1 - K, found by bisection
// on the quadrature form and cross-checked against the theta = arccos K form.
// Width <= 1e-10.
Enclosure solve_K();
// (2/pi)(sin theta - K theta) - (1 - 2K) with theta = arccos K.
double k_theta_residual(double K);
// (1/2pi) * integral of |cos t - K| over one period, by quadrature.
double periodic_mean(double K);

// f(t) = |cos t - K| with its mean, sup and total variation, each computed
// numerically and checked against 1-K, 1+K and 4 at construction.
struct PeriodicF {
  double K = 0.0;
  double mean = 0.0;
  double sup = 0.0;
  double variation = 0.0;

  static PeriodicF build(double K);
};

struct ErrorParams {
  double c = 2.67;
  int k1 = 0;
  double eps = 3.61;
  std::int64_t k2 = 300000;
};

// Summand plus integral tail for the tau <= 1 series at a given tau.
double tail_small_at(double c, double tau, int k1);
// Sup over tau in (0, 1], attained at tau = 1 (checked on a tau sample).
double tail_sum_small(double c, int k1);

// Summand plus integral tail for the tau >= 1 series at a given tau. The
// sum over k <= k2 is explicit up to k = 32 and Euler-Maclaurin beyond, with
// the remainder bound added, so the result never undercuts the exact value.
double tail_large_at(double eps, double tau, std::int64_t k2);
// Same quantity by plain summation (tests only; O(k2)).
double tail_large_at_direct(double eps, double tau, std::int64_t k2);

struct TailSup {
  double value = 0.0;
  double tau = 1.0;  // maximizer
};
// Sup over tau >= 1: golden section over log tau in [0, 30], both endpoints,
// and a 1000-point grid check.
TailSup tail_sum_large(double eps, std::int64_t k2);

double error_bound_small(const ErrorParams& p, const PeriodicF& f);
double error_bound_small(double c, double tail_small, const PeriodicF& f);
double error_bound_large(const ErrorParams& p, const PeriodicF& f, double tau);
double error_bound_large(double eps, double tail_large, const PeriodicF& f, double tau);

struct CaseBounds {
  double C_I = 0.0;
  double C_II = 0.0;
  double C_III = 0.0;
  double C_IV = 0.0;
  double C0 = 0.0;  // max of the four
  double tail_small = 0.0;
  double tail_large = 0.0;
  double tail_large_tau = 1.0;
  double C_III_tau = 1.0;
};

// Additive constants of the four cases of the sum of f(tau log p)/p.
CaseBounds lemma47_case_bounds(const ErrorParams& p, const PeriodicF& f);

// Separable pieces: the small-tau block depends on (c, k1) only and the
// large-tau block on (eps, k2) only.
double small_tau_block(double c, int k1, const PeriodicF& f);
struct LargeBlock {
  double C_III = 0.0;
  double C_IV = 0.0;
  double C_III_tau = 1.0;
  TailSup tail;
};
LargeBlock large_tau_block(double eps, std::int64_t k2, const PeriodicF& f);

struct OptimizeGrids {
  std::vector<double> c;
  std::vector<int> k1;
  std::vector<double> eps;
  std::vector<std::int64_t> k2;

  // c in [1,5] step 0.01, k1 in 0..20, eps in [0.5,10] step 0.01,
  // k2 in {1e3, 1e4, 1e5, 3e5, 1e6}.
  static OptimizeGrids defaults();
};

struct OptimizeResult {
  ErrorParams best;
  double C0 = 0.0;
  double small_block_min = 0.0;  // min over (c, k1) of C_II
  double large_block_min = 0.0;  // min over (eps, k2) of max(C_III, C_IV)
  std::size_t evaluations = 0;
};

// Exhaustive minimization of max(C_I, C_II, C_III, C_IV). Ties go to the
// lexicographically smallest (c, k1, eps, k2).
OptimizeResult optimize_C0(const OptimizeGrids& grids, const PeriodicF& f);

// integral_1^2 e^(2y)/y^2 dy.
Enclosure verify_integral_945();

// sqrt of sum over k in Z of log^(2+2K)(|k|+4) / ((k-1/2)^2 + 1): the
// symmetric sum up to k_trunc plus an incomplete-gamma majorant of the tail.
Enclosure nu3(std::int64_t k_trunc, const Enclosure& K);

struct LedgerEntry {
  std::string name;
  double value = 0.0;
  std::string provenance;  // paper | derived | computed
  std::string note;
};

struct ConstantLedger {
  double K = 0.0, C0 = 0.0, nu1 = 0.0, nu2 = 0.0, nu3 = 0.0, M = 0.0, gamma = 0.0;
  double C = 0.0, a = 0.0, final_constant = 0.0;
  std::vector<LedgerEntry> entries;
};

// nu1 is the max of tail_power_sum_bound over alpha = k/1e4; nu2 and nu3
// take the upper ends of their enclosures.
ConstantLedger assemble_ledger(double C0, const PrimeTable& table,
                               std::int64_t nu3_trunc = 1000000);
// The three closing formulas, given the inputs.
void ledger_identities(ConstantLedger& l);

struct LogValue {
  double log_value = 0.0;  // natural log
  double value = 0.0;      // exp(log_value); may underflow to 0 or overflow
  double log10() const;
};

inline constexpr double kBigConstant = 9.75e5;

// 0.2 exp(-(1/K) log(B/c) (1.42 (B/c)^(1/(2K)) + 1/2)); the o(1) is dropped.
LogValue delta(double c, double K, double big_constant = kBigConstant);
// 0.2 (c/B)^(1/(2K)): reverse-engineered fit to the tabulated deltas, not
// the printed formula.
LogValue delta_candidate(double c, double K, double big_constant = kBigConstant);

// 4 pi c1 / delta^(3/2); delta from the formula or the override.
LogValue epsilon_exponent(double c1, double c, double K,
                          std::optional<double> delta_override = std::nullopt);

// Published sample table.
struct PaperTable {
  std::vector<double> c1;
  std::vector<double> c;
  std::vector<double> delta;
  std::vector<std::vector<double>> eps;  // [row c1][column c]
};
const PaperTable& paper_table1();
std::map<double, double> paper_delta_map();

struct Table1Cell {
  double c1 = 0.0, c = 0.0, delta = 0.0;
  LogValue eps;
  std::optional<double> paper;
  std::optional<double> ratio;  // paper / computed
};

struct ScalingCheck {
  std::string name;
  double worst = 0.0;      // worst relative deviation
  double tolerance = 0.0;
  bool pass = false;
  std::string where;
  double worst_unflagged = 0.0;  // ignoring cells off the common factor
};

struct Table1Report {
  std::vector<Table1Cell> cells;
  std::vector<ScalingCheck> checks;
  double common_factor = 0.0;       // median of paper/computed ratios
  double ratio_spread = 0.0;        // (max - min)/median over all matched cells
  double ratio_spread_excluding_outliers = 0.0;
  std::vector<std::string> notes;
};

// delta_table must supply a delta for every c in c_list.
Table1Report table1_report(const std::vector<double>& c1_list, const std::vector<double>& c_list,
                           const std::map<double, double>& delta_table, double K);

}  // namespace xpv
