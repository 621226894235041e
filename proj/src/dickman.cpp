#include "xpv/dickman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "xpv/error.hpp"

namespace xpv {

namespace {

constexpr int kRescaleBits = 600;
constexpr double kRescaleBelow = 1e-200;
constexpr double kLn2 = 0.69314718055994530942;

long long steps_per_unit(double step) {
  if (!(step > 0.0)) throw DomainError("build_rho_table: step must be positive");
  if (step > 1.0 / 256.0)
    throw PrecisionError("build_rho_table: step must be at most 2^-8");
  const double m = 1.0 / step;
  const double r = std::round(m);
  if (std::fabs(m - r) > 1e-9 * r)
    throw PreconditionError("build_rho_table: 1/step must be an integer");
  return static_cast<long long>(r);
}

long long grid_points(double x_max, double step) {
  if (!(x_max >= 2.0)) throw DomainError("build_rho_table: x_max must be >= 2");
  const double n = (x_max - 1.0) / step;
  const double r = std::round(n);
  if (std::fabs(n - r) > 1e-9 * std::max(1.0, r))
    throw PreconditionError("build_rho_table: (x_max - 1)/step must be an integer");
  return static_cast<long long>(r) + 1;
}

// Cubic Lagrange interpolation through (x0 + i*h, y[i]), i = 0..3.
double cubic(const double* y, double t) {
  // t measured in units of h from the first node.
  const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return l0 * y[0] + l1 * y[1] + l2 * y[2] + l3 * y[3];
}

}  // namespace

std::vector<double> march_log_rho(double x_max, double step) {
  const long long m = steps_per_unit(step);
  const long long n = grid_points(x_max, step);
  std::vector<double> logs(static_cast<std::size_t>(n));
  // Scaled values: rho_j = val[j] * 2^(-shift * kRescaleBits).
  std::vector<double> val(static_cast<std::size_t>(n));
  long long shift = 0;

  for (long long j = 0; j < std::min(n, m + 1); ++j) {
    const double x = 1.0 + static_cast<double>(j) * step;
    val[j] = 1.0 - std::log(x);
    logs[j] = std::log(val[j]);
  }

  // window = sum of val over indices (j-m, j), exclusive at both ends.
  double window = 0.0;
  auto recompute = [&](long long j) {
    double s = 0.0;
    for (long long i = j - 1; i > j - m; --i) s += val[i];
    return s;
  };
  for (long long j = m + 1; j < n; ++j) {
    if ((j - m - 1) % 128 == 0)
      window = recompute(j);
    else
      window += val[j - 1] - val[j - m];
    const double x = 1.0 + static_cast<double>(j) * step;
    // x rho_j = h (rho_{j-m}/2 + window + rho_j/2)
    val[j] = step * (0.5 * val[j - m] + window) / (x - 0.5 * step);
    if (!(val[j] > 0.0)) throw PrecisionError("march_log_rho: non-positive value");
    logs[j] = std::log(val[j]) - static_cast<double>(shift * kRescaleBits) * kLn2;
    if (val[j] < kRescaleBelow) {
      // Exact power-of-two rescale of everything still inside the window.
      for (long long i = std::max<long long>(0, j - m); i <= j; ++i)
        val[i] = std::ldexp(val[i], kRescaleBits);
      window = std::ldexp(window, kRescaleBits);
      ++shift;
    }
  }
  return logs;
}

RhoLogTable build_rho_table(double x_max, double step) {
  const std::vector<double> coarse = march_log_rho(x_max, step);
  const std::vector<double> fine = march_log_rho(x_max, step / 2.0);
  RhoLogTable t;
  t.x_max = x_max;
  t.step = step;
  t.log_values = coarse;
  t.err.resize(coarse.size());
  const auto closed_form_end = static_cast<std::size_t>(std::llround(1.0 / step));
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    if (j <= closed_form_end) {
      // log(1 - log x): a few roundings, exact zero at x = 1.
      t.err[j] = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(coarse[j]);
      continue;
    }
    const double diff = std::fabs(coarse[j] - fine[2 * j]);
    t.err[j] = 2.0 * diff + 1e-14 * (1.0 + std::fabs(coarse[j]));
  }
  return t;
}

Enclosure rho_log(double x, const RhoLogTable& table) {
  if (!(x >= 1.0 && x <= table.x_max))
    throw DomainError("rho_log: x = " + format_double(x) + " outside [1, " +
                      format_double(table.x_max) + "]");
  if (x == 1.0) return Enclosure::point(0.0);
  if (x <= 2.0) {
    const double v = std::log(1.0 - std::log(x));
    return Enclosure::around(v, 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(v)));
  }
  const double pos = (x - 1.0) / table.step;
  const auto n = static_cast<long long>(table.size());
  auto j = static_cast<long long>(std::floor(pos));
  if (static_cast<double>(j) == pos)
    return Enclosure::around(table.log_values[j], table.err[j]);
  // Primary stencil j-1..j+2, alternative shifted by one; their spread
  // estimates the interpolation error.
  long long a = std::clamp<long long>(j - 1, 0, n - 4);
  long long b = (a + 1 <= n - 4) ? a + 1 : a - 1;
  const double va = cubic(&table.log_values[a], pos - static_cast<double>(a));
  const double vb = cubic(&table.log_values[b], pos - static_cast<double>(b));
  double stencil_err = 0.0;
  for (long long i = std::min(a, b); i < std::max(a, b) + 4; ++i)
    stencil_err = std::max(stencil_err, table.err[i]);
  return Enclosure::around(va, std::fabs(va - vb) + 2.0 * stencil_err);
}

double buchstab_lower_log(double x) {
  if (!(x >= 6.0)) throw DomainError("buchstab_lower_log: x must be >= 6");
  const double lx = std::log(x);
  const double delta = 1.0 / (lx + 1.0 + lx / x);
  if (!(delta < 1.0 / 3.0)) throw DomainError("buchstab_lower_log: delta must be < 1/3");
  return -x * (1.0 + 1.0 / lx) * (std::log(x + delta) + std::log(1.0 / delta) - 1.0) - 2.0 * lx;
}

RhoSource parse_rho_source(std::string_view s) {
  if (s == "table") return RhoSource::table;
  if (s == "buchstab") return RhoSource::buchstab;
  throw UsageError("unknown rho source '" + std::string(s) + "' (expected table|buchstab)");
}

VerificationReport verify_rho_exponent(double x_lo, double x_hi, double exponent,
                                       RhoSource source, const RhoLogTable* table,
                                       const SweepOptions& options, double buchstab_step) {
  if (!(x_lo <= x_hi)) throw PreconditionError("verify_rho_exponent: empty range");
  std::vector<double> xs;
  std::vector<double> lower;  // lower edge of log rho, or the Buchstab bound
  if (source == RhoSource::table) {
    if (table == nullptr) throw UsageError("verify_rho_exponent: table source needs a table");
    if (!(x_lo >= 1.0 && x_hi <= table->x_max))
      throw PreconditionError("verify_rho_exponent: range must lie in [1, " +
                              format_double(table->x_max) + "]");
    const auto first = static_cast<std::size_t>(std::ceil((x_lo - 1.0) / table->step - 1e-9));
    for (std::size_t j = first; j < table->size(); ++j) {
      const double x = table->x_at(j);
      if (x > x_hi * (1.0 + 1e-15)) break;
      xs.push_back(x);
      lower.push_back(table->log_values[j] - table->err[j]);
    }
  } else {
    if (!(x_lo >= 6.0)) throw PreconditionError("verify_rho_exponent: Buchstab source needs x_lo >= 6");
    const auto count = static_cast<long long>(std::floor((x_hi - x_lo) / buchstab_step));
    for (long long k = 0; k <= count; ++k) {
      const double x = x_lo + static_cast<double>(k) * buchstab_step;
      xs.push_back(x);
      lower.push_back(buchstab_lower_log(x));
    }
    if (xs.back() != x_hi) {
      xs.push_back(x_hi);
      lower.push_back(buchstab_lower_log(x_hi));
    }
  }
  if (xs.empty()) throw PreconditionError("verify_rho_exponent: no grid points in range");

  VerificationReport r;
  r.check_id = source == RhoSource::table ? "rho-exponent-table" : "rho-exponent-buchstab";
  r.x_lo = x_lo;
  r.x_hi = x_hi;
  r.evaluation_count = xs.size();
  r.method = source == RhoSource::table
                 ? "every table grid point in range; margin = (log rho - err) + e x log x"
                 : "grid x_lo + k*step plus x_hi; margin = Buchstab log bound + e x log x";
  r.worst_margin = std::numeric_limits<double>::infinity();
  r.gap_margin_lower = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::pass;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const double lhs = -exponent * x * std::log(x);
    const double margin = lower[i] - lhs;
    const Verdict v = judge(margin, lower[i], options.eta);
    verdict = combine(verdict, v);
    if (v == Verdict::fail) {
      ++r.failing_points;
      r.last_failure = x;
    } else if (v == Verdict::indeterminate) {
      ++r.indeterminate_points;
    }
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.arg_min = x;
      r.rhs_at_min = lower[i];
    }
  }
  r.verdict = verdict;
  r.pass = verdict == Verdict::pass;
  return r;
}

ExponentBound minimal_valid_exponent(const RhoLogTable& table, double x_lo, double x_hi) {
  ExponentBound best;
  for (std::size_t j = 1; j < table.size(); ++j) {
    const double x = table.x_at(j);
    if (x <= x_lo) continue;
    if (x > x_hi) break;
    const double e = -(table.log_values[j] - table.err[j]) / (x * std::log(x));
    if (e > best.exponent) best = {e, x};
  }
  return best;
}

double theorem14_rhs(double x, double u) {
  if (!(x > 1.0)) throw DomainError("theorem14_rhs: x must exceed 1");
  if (!(u >= 0.0)) throw DomainError("theorem14_rhs: u must be >= 0");
  return 0.2 * std::log(x) * std::exp(-u * (1.42 * std::exp(u / 2.0) + 0.5));
}

}  // namespace xpv
