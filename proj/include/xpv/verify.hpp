#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xpv/numerics.hpp"
#include "xpv/primes.hpp"

namespace xpv {

// How the critical points of a check are generated.
enum class SweepKind {
  prime_step,  // LHS/RHS involve pi(x) or prime sums: one-sided limits at primes
  continuous,  // smooth in x: fixed global logarithmic grid
  alpha_grid,  // parameter alpha in (0, 1]: grid alpha = k / 10^4
};

struct CheckSpec {
  std::string id;
  std::string statement;  // LHS <= RHS, in words
  std::string quote;      // verbatim anchor of the claimed inequality
  SweepKind kind;
  double valid_lo;
  bool valid_lo_open;
  double valid_hi;  // +inf when unbounded
  bool valid_hi_open;
  bool needs_primes;
};

const std::vector<CheckSpec>& check_registry();
// Throws UsageError for unknown ids.
const CheckSpec& find_check(std::string_view id);

enum class Side { left, at };

struct SweepOptions {
  double eta = 1e-9;     // safety factor for near-miss detection
  unsigned threads = 1;  // evaluation threads; results do not depend on it
  bool lo_open = false;  // sweep (x_lo, x_hi] instead of [x_lo, x_hi]
};

struct VerificationReport {
  std::string check_id;
  double x_lo = 0.0;
  double x_hi = 0.0;
  bool lo_open = false;
  double worst_margin = 0.0;  // RHS - LHS at the worst critical point
  double arg_min = 0.0;
  Side arg_side = Side::at;
  double rhs_at_min = 0.0;
  Verdict verdict = Verdict::pass;
  bool pass = false;
  std::size_t evaluation_count = 0;
  std::size_t failing_points = 0;
  std::size_t indeterminate_points = 0;
  // Largest failing critical point; for continuous checks refined by bisection
  // to the last sign change of the margin.
  std::optional<double> last_failure;
  std::optional<double> crossover;
  // min over cells between consecutive critical points of
  // min(RHS endpoints) - max(LHS endpoints).
  double gap_margin_lower = 0.0;
  std::string method;
};

VerificationReport verify_inequality(std::string_view check_id, double x_lo, double x_hi,
                                     const PrimeTable& table, const SweepOptions& options = {});

// Combines reports over adjacent ranges [a, m] and (m, b]. Equal to a single
// sweep over [a, b] whenever m is one of its critical points.
VerificationReport merge(const VerificationReport& left, const VerificationReport& right);

// The (lhs, rhs) pair of a check at one critical point; exposed for tests.
struct SidePair {
  double lhs;
  double rhs;
};
SidePair evaluate_check(const CheckSpec& check, double x, Side side, const PrimeTable& table);

}  // namespace xpv
