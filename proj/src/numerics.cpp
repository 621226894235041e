#include "xpv/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>

#include "xpv/error.hpp"

namespace xpv {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::resource: return "resource";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::usage: return "usage";
    case ErrorKind::precision: return "precision";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

Enclosure Enclosure::around(double center, double radius) {
  radius = std::fabs(radius);
  return {center - radius, center + radius};
}

Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  // One ulp of outward slack per endpoint.
  return {std::nextafter(a.lo + b.lo, -std::numeric_limits<double>::infinity()),
          std::nextafter(a.hi + b.hi, std::numeric_limits<double>::infinity())};
}

Enclosure integrate(const std::function<double(double)>& f, double a, double b,
                    double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double value =
      gauss_kronrod<double, 15>::integrate(f, a, b, 25, rel_tol, &err);
  if (!std::isfinite(value)) throw PrecisionError("quadrature produced a non-finite value");
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(value);
  return Enclosure::around(value, 10.0 * err + floor);
}

Maximum golden_section_max(const std::function<double(double)>& f, double a,
                           double b, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol * (1.0 + std::fabs(a) + std::fabs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

Verdict judge(double margin, double rhs, double eta) {
  const double slack = eta * std::fabs(rhs);
  if (std::isnan(margin)) return Verdict::indeterminate;
  if (std::fabs(margin) < slack) return Verdict::indeterminate;
  return margin >= slack ? Verdict::pass : Verdict::fail;
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::indeterminate || b == Verdict::indeterminate)
    return Verdict::indeterminate;
  return Verdict::pass;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace xpv
