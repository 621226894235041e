#include "xpv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "xpv/error.hpp"

namespace xpv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGridLogStep = 1e-4;  // continuous checks: x_k = exp(k * step)
constexpr int kAlphaGrid = 10000;      // alpha_k = k / kAlphaGrid

const char* kStepMethod =
    "critical points: range endpoints plus both one-sided limits at every prime "
    "in range; between consecutive primes pi(x) and the prime sums are constant "
    "and every RHS is monotone, so each side attains its extremes at critical "
    "points. gap_margin_lower bounds each gap by min(RHS ends) - max(LHS ends).";
const char* kContinuousMethod =
    "critical points: range endpoints plus the global grid x = exp(k * 1e-4); "
    "both sides are monotone, so gap_margin_lower bounds every cell by "
    "min(RHS ends) - max(LHS ends).";
const char* kAlphaMethod =
    "critical points: range endpoints plus the grid alpha = k / 10^4; the chain "
    "bound is linear in alpha.";

std::vector<CheckSpec> make_registry() {
  auto step = SweepKind::prime_step;
  auto cont = SweepKind::continuous;
  return {
      {"pnt-lower", "x/log x * (1 + 1/(2 log x)) <= pi(x)",
       "\\frac{x}{\\log x}\\left(1+\\frac{1}{2 \\log x}\\right)\\leq \\pi(x)", step, 59, false,
       kInf, false, true},
      {"pnt-upper", "pi(x) <= x/log x * (1 + 3/(2 log x))", "(1+\\frac{3}{2 \\log x})", step, 59,
       false, kInf, false, true},
      {"li-lower", "x/log x * (1 + 1/log x) <= li(x)",
       "li(x)\\ge \\frac{x}{\\log x}(1+\\frac{1}{\\log x})", cont, 2, false, kInf, false, false},
      {"li-upper", "li(x) <= x/log x * (1 + 3/(2 log x)) + li(2)", "+\\textrm{li}(2)", cont, 1865,
       false, kInf, false, false},
      {"pi-li-1", "|pi(x) - li(x)| <= 0.4897 x/log x", "0.4897 \\frac{x}{\\log x}", step, 2, false,
       kInf, false, true},
      {"pi-li-2", "|pi(x) - li(x)| <= 1.3597 x/log^2 x", "1.3597 \\frac{x}{\\log^2 x}", step, 2,
       false, kInf, false, true},
      {"pi-li-3", "|pi(x) - li(x)| <= 0.1522 x exp(-sqrt(log x / 6.455))", "0.1522 x \\exp", step,
       2, false, kInf, false, true},
      {"mertens-remainder", "|sum_{p<=x} 1/p - log log x - M| <= 1/log^2 x", "M \\approx 0.2614",
       step, 1, true, kInf, false, true},
      {"mertens-bracket", "log log x + 0.2614 <= sum_{p<=x} 1/p <= log log x + 0.8666",
       "equality occurring at x = 2", step, 2, false, kInf, false, true},
      {"mertens-mprime-coarse", "|M'(x)| < 0.6051", "< 0.6051", step, 2, false, kInf, false, true},
      {"log2p-plain", "sum_{p<=x} log^2 p / p <= log^2 x / 2", "one may verify", step, 1, true,
       355991, true, true},
      {"tail-power", "(1 + alpha) * 1.2551 / e <= 0.9235", "0.9235 =: v_1", SweepKind::alpha_grid,
       0, true, 1, false, false},
  };
}

double pnt_main(double x, double c) {
  const double l = std::log(x);
  return x / l * (1.0 + c / l);
}

double abs_diff_upper(double count, const Enclosure& li) {
  return std::max(std::fabs(count - li.lo), std::fabs(count - li.hi));
}

// Evaluates one registered check, caching prefix sums for the sweep range.
class Evaluator {
 public:
  Evaluator(const CheckSpec& check, const PrimeTable& table, double x_hi)
      : check_(check), table_(table) {
    if (check.id.rfind("mertens", 0) == 0 || check.id == "log2p-plain")
      sums_ = std::make_unique<PrimeSums>(table, x_hi);
    if (check.id == "li-upper") li2_lo_ = log_integral(2.0).lo;
  }

  SidePair operator()(double x, Side side) const {
    const std::size_t n = check_.needs_primes
                              ? (side == Side::left ? table_.count_lt(x) : table_.count_le(x))
                              : 0;
    const double count = static_cast<double>(n);
    const std::string& id = check_.id;
    if (id == "pnt-lower") return {pnt_main(x, 0.5), count};
    if (id == "pnt-upper") return {count, pnt_main(x, 1.5)};
    if (id == "li-lower") return {pnt_main(x, 1.0), log_integral(x).lo};
    if (id == "li-upper") return {log_integral(x).hi, pnt_main(x, 1.5) + li2_lo_};
    if (id == "pi-li-1") return {abs_diff_upper(count, log_integral(x)), 0.4897 * x / std::log(x)};
    if (id == "pi-li-2") {
      const double l = std::log(x);
      return {abs_diff_upper(count, log_integral(x)), 1.3597 * x / (l * l)};
    }
    if (id == "pi-li-3")
      return {abs_diff_upper(count, log_integral(x)),
              0.1522 * x * std::exp(-std::sqrt(std::log(x) / 6.455))};
    if (id == "tail-power") return {tail_power_sum_bound(x), 0.9235};

    const double loglog = std::log(std::log(x));
    if (id == "mertens-remainder") {
      const double l = std::log(x);
      return {std::fabs(sums_->reciprocal(n) - loglog - kMertens), 1.0 / (l * l)};
    }
    if (id == "mertens-mprime-coarse")
      return {std::fabs(sums_->reciprocal(n) - loglog - kMertens), 0.6051};
    if (id == "mertens-bracket") {
      const double s = sums_->reciprocal(n);
      const SidePair lower{loglog + 0.2614, s};
      const SidePair upper{s, loglog + 0.8666};
      return (lower.rhs - lower.lhs) <= (upper.rhs - upper.lhs) ? lower : upper;
    }
    if (id == "log2p-plain") {
      const double l = std::log(x);
      return {sums_->log_square(n), l * l / 2.0};
    }
    throw InternalError("no evaluator for check " + id);
  }

 private:
  const CheckSpec& check_;
  const PrimeTable& table_;
  std::unique_ptr<PrimeSums> sums_;
  double li2_lo_ = 0.0;
};

struct Point {
  double x;
  Side side;
};

std::vector<Point> critical_points(const CheckSpec& check, double lo, double hi, bool lo_open,
                                   const PrimeTable& table) {
  std::vector<Point> pts;
  if (!lo_open) pts.push_back({lo, Side::at});
  switch (check.kind) {
    case SweepKind::prime_step: {
      const std::size_t first = table.count_le(lo);
      const std::size_t last = table.count_le(hi);
      for (std::size_t i = first; i < last; ++i) {
        const double p = table[i];
        pts.push_back({p, Side::left});
        pts.push_back({p, Side::at});
      }
      break;
    }
    case SweepKind::continuous: {
      auto k = static_cast<long long>(std::floor(std::log(lo) / kGridLogStep));
      for (;; ++k) {
        const double x = std::exp(static_cast<double>(k) * kGridLogStep);
        if (x <= lo) continue;
        if (x >= hi) break;
        pts.push_back({x, Side::at});
      }
      break;
    }
    case SweepKind::alpha_grid: {
      for (int k = 1; k <= kAlphaGrid; ++k) {
        const double a = static_cast<double>(k) / kAlphaGrid;
        if (a <= lo) continue;
        if (a >= hi) break;
        pts.push_back({a, Side::at});
      }
      break;
    }
  }
  if (pts.empty() || pts.back().x != hi || pts.back().side != Side::at) {
    if (!(lo_open && hi == lo)) pts.push_back({hi, Side::at});
  }
  return pts;
}

void check_range(const CheckSpec& check, double lo, double hi, bool lo_open) {
  auto valid = [&] {
    std::string s = check.valid_lo_open ? "(" : "[";
    s += format_double(check.valid_lo) + ", ";
    s += std::isinf(check.valid_hi) ? std::string("inf") : format_double(check.valid_hi);
    s += check.valid_hi_open || std::isinf(check.valid_hi) ? ")" : "]";
    return s;
  };
  if (!(lo <= hi) || (lo_open && lo == hi))
    throw PreconditionError("verify " + check.id + ": empty range");
  const bool lo_ok = check.valid_lo_open ? (lo > check.valid_lo || (lo_open && lo == check.valid_lo))
                                         : lo >= check.valid_lo;
  const bool hi_ok = check.valid_hi_open ? hi < check.valid_hi : hi <= check.valid_hi;
  if (!lo_ok || !hi_ok)
    throw PreconditionError("verify " + check.id + ": range outside the claimed validity " +
                            valid());
}

bool better(double margin, const Point& p, double best_margin, const Point& best) {
  if (margin != best_margin) return margin < best_margin;
  if (p.x != best.x) return p.x < best.x;
  return p.side == Side::left && best.side == Side::at;
}

}  // namespace

const std::vector<CheckSpec>& check_registry() {
  static const std::vector<CheckSpec> registry = make_registry();
  return registry;
}

const CheckSpec& find_check(std::string_view id) {
  for (const auto& c : check_registry())
    if (c.id == id) return c;
  std::string known;
  for (const auto& c : check_registry()) known += (known.empty() ? "" : ", ") + c.id;
  throw UsageError("unknown check id '" + std::string(id) + "' (known: " + known + ")");
}

SidePair evaluate_check(const CheckSpec& check, double x, Side side, const PrimeTable& table) {
  if (check.needs_primes) table.require_covers(x, "evaluate_check");
  return Evaluator(check, table, x)(x, side);
}

VerificationReport verify_inequality(std::string_view check_id, double x_lo, double x_hi,
                                     const PrimeTable& table, const SweepOptions& options) {
  const CheckSpec& check = find_check(check_id);
  check_range(check, x_lo, x_hi, options.lo_open);
  if (check.needs_primes) table.require_covers(x_hi, "verify_inequality");

  const std::vector<Point> pts = critical_points(check, x_lo, x_hi, options.lo_open, table);
  const Evaluator eval(check, table, x_hi);

  std::vector<SidePair> values(pts.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, 64));
  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = eval(pts[i].x, pts[i].side);
  };
  if (threads == 1 || pts.size() < 4096) {
    fill(0, pts.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (pts.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = std::min(pts.size(), t * chunk);
      const std::size_t e = std::min(pts.size(), b + chunk);
      if (b < e) pool.emplace_back(fill, b, e);
    }
  }

  VerificationReport r;
  r.check_id = check.id;
  r.x_lo = x_lo;
  r.x_hi = x_hi;
  r.lo_open = options.lo_open;
  r.evaluation_count = pts.size();
  r.method = check.kind == SweepKind::prime_step   ? kStepMethod
             : check.kind == SweepKind::continuous ? kContinuousMethod
                                                   : kAlphaMethod;
  r.worst_margin = kInf;
  r.gap_margin_lower = kInf;
  Verdict verdict = Verdict::pass;
  std::size_t last_fail_index = pts.size();
  Point best{0.0, Side::at};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double margin = values[i].rhs - values[i].lhs;
    const Verdict v = judge(margin, values[i].rhs, options.eta);
    verdict = combine(verdict, v);
    if (v == Verdict::fail) {
      ++r.failing_points;
      last_fail_index = i;
    } else if (v == Verdict::indeterminate) {
      ++r.indeterminate_points;
    }
    if (i == 0 || better(margin, pts[i], r.worst_margin, best)) {
      r.worst_margin = margin;
      best = pts[i];
      r.rhs_at_min = values[i].rhs;
    }
    if (i > 0) {
      const double cell = std::min(values[i - 1].rhs, values[i].rhs) -
                          std::max(values[i - 1].lhs, values[i].lhs);
      r.gap_margin_lower = std::min(r.gap_margin_lower, cell);
    }
  }
  if (pts.size() == 1) r.gap_margin_lower = r.worst_margin;
  r.arg_min = best.x;
  r.arg_side = best.side;
  r.verdict = verdict;
  r.pass = verdict == Verdict::pass;

  if (last_fail_index < pts.size()) {
    r.last_failure = pts[last_fail_index].x;
    if (check.kind == SweepKind::continuous && last_fail_index + 1 < pts.size()) {
      // Locate the last sign change of the margin between two grid points.
      double a = pts[last_fail_index].x;
      double b = pts[last_fail_index + 1].x;
      for (int it = 0; it < 200 && b - a > 1e-13 * b; ++it) {
        const double m = 0.5 * (a + b);
        const SidePair v = eval(m, Side::at);
        (v.rhs - v.lhs < 0.0 ? a : b) = m;
      }
      r.crossover = b;
    }
  }
  return r;
}

VerificationReport merge(const VerificationReport& left, const VerificationReport& right) {
  if (left.check_id != right.check_id)
    throw UsageError("merge: reports belong to different checks");
  if (left.x_hi != right.x_lo || !right.lo_open)
    throw UsageError("merge: ranges must be [a, m] and (m, b]");
  VerificationReport r = left;
  r.x_hi = right.x_hi;
  r.evaluation_count = left.evaluation_count + right.evaluation_count;
  r.failing_points = left.failing_points + right.failing_points;
  r.indeterminate_points = left.indeterminate_points + right.indeterminate_points;
  r.verdict = combine(left.verdict, right.verdict);
  r.pass = r.verdict == Verdict::pass;
  const Point lp{left.arg_min, left.arg_side};
  const Point rp{right.arg_min, right.arg_side};
  if (better(right.worst_margin, rp, left.worst_margin, lp)) {
    r.worst_margin = right.worst_margin;
    r.arg_min = right.arg_min;
    r.arg_side = right.arg_side;
    r.rhs_at_min = right.rhs_at_min;
  }
  r.gap_margin_lower = std::min(left.gap_margin_lower, right.gap_margin_lower);
  if (right.last_failure) {
    r.last_failure = right.last_failure;
    r.crossover = right.crossover;
  }
  return r;
}

}  // namespace xpv
