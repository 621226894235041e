#pragma once

#include <cmath>
#include <functional>
#include <string>

namespace xpv {

// Mathematical constants used across modules.
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;
// Meissel-Mertens constant B1.
inline constexpr double kMertens = 0.26149721284764278376;
inline constexpr double kE = 2.71828182845904523536;

// Closed real interval [lo, hi] known to contain some quantity.
struct Enclosure {
  double lo = 0.0;
  double hi = 0.0;

  static Enclosure point(double v) { return {v, v}; }
  static Enclosure around(double center, double radius);

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool overlaps(const Enclosure& o) const { return lo <= o.hi && o.lo <= hi; }
  bool subset_of(double a, double b) const { return a <= lo && hi <= b; }
};

Enclosure operator+(const Enclosure& a, const Enclosure& b);

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b]. The enclosure widens
// the reported error estimate by a safety factor and adds a rounding floor.
Enclosure integrate(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-13);

struct Maximum {
  double arg = 0.0;
  double value = 0.0;
};

// Golden-section search for a maximum of f on [a, b]; assumes unimodality,
// callers that cannot guarantee it should re-verify on a grid.
Maximum golden_section_max(const std::function<double(double)>& f, double a,
                           double b, double tol = 1e-9);

// Three-valued outcome of comparing LHS <= RHS under the safety margin
// discipline: pass needs margin >= eta*|RHS|, near-misses are indeterminate.
enum class Verdict { pass, fail, indeterminate };

const char* to_string(Verdict v) noexcept;

Verdict judge(double margin, double rhs, double eta);

// Combine verdicts: any fail wins, then indeterminate.
Verdict combine(Verdict a, Verdict b);

// Round-trip exact formatting used for human-readable text output.
std::string format_double(double v);

}  // namespace xpv
