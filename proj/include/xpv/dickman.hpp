#pragma once

#include <string_view>
#include <vector>

#include "xpv/numerics.hpp"
#include "xpv/verify.hpp"

namespace xpv {

inline constexpr double kDefaultRhoStep = 1.0 / 1024.0;

// log rho(x_j) on the grid x_j = 1 + j * step, with a per-point absolute
// error bound on each log value.
struct RhoLogTable {
  double x_max = 0.0;
  double step = 0.0;
  std::vector<double> log_values;
  std::vector<double> err;

  std::size_t size() const { return log_values.size(); }
  double x_at(std::size_t j) const { return 1.0 + static_cast<double>(j) * step; }
};

// Marches x rho(x) = integral of rho over [x-1, x] with the implicit
// trapezoid rule, in scaled arithmetic so values near e^-708 and below stay
// representable. err comes from a second run at step/2.
// Requires x_max >= 2, step <= 2^-8, and both 1/step and (x_max-1)/step
// integral.
RhoLogTable build_rho_table(double x_max, double step = kDefaultRhoStep);

// Raw march at one step size, no error estimate (exposed for tests).
std::vector<double> march_log_rho(double x_max, double step);

// Cubic-interpolated readout; closed form 1 - log x on [1, 2].
Enclosure rho_log(double x, const RhoLogTable& table);

// Log of Buchstab's lower bound for rho(x); x >= 6 with delta < 1/3.
double buchstab_lower_log(double x);

enum class RhoSource { table, buchstab };

RhoSource parse_rho_source(std::string_view s);

// Checks log rho(x) >= -exponent * x log x at every grid point of [x_lo, x_hi].
// For the table source, margins use the lower edge log rho - err. The
// Buchstab source sweeps the grid x_lo + k * step.
VerificationReport verify_rho_exponent(double x_lo, double x_hi, double exponent,
                                       RhoSource source, const RhoLogTable* table,
                                       const SweepOptions& options = {},
                                       double buchstab_step = kDefaultRhoStep);

struct ExponentBound {
  double exponent = 0.0;  // smallest e with log rho >= -e x log x on the range
  double arg = 0.0;
};
// Diagnostic: smallest exponent valid at every table grid point in (x_lo, x_hi].
ExponentBound minimal_valid_exponent(const RhoLogTable& table, double x_lo, double x_hi);

// 0.2 * log x * exp(-u (1.42 e^(u/2) + 1/2)); the o(1) term is dropped.
double theorem14_rhs(double x, double u);

}  // namespace xpv
