#include <doctest.h>

#include <cmath>
#include <string>

#include "xpv/numerics.hpp"

using namespace xpv;

TEST_CASE("compensated sum recovers cancelled low bits") {
  CompensatedSum s;
  s += 1e16;
  s += 1.0;
  s += -1e16;
  CHECK(s.value() == 1.0);

  CompensatedSum t;
  for (int i = 0; i < 1000000; ++i) t += 0.1;
  CHECK(std::fabs(t.value() - 100000.0) < 1e-9);
}

TEST_CASE("enclosure helpers") {
  const Enclosure e = Enclosure::around(1.0, 0.5);
  CHECK(e.lo <= 0.5);
  CHECK(e.hi >= 1.5);
  CHECK(e.contains(1.2));
  CHECK_FALSE(e.contains(2.0));
  CHECK(e.overlaps(Enclosure{1.4, 3.0}));
  CHECK_FALSE(e.overlaps(Enclosure{1.6, 3.0}));
  const Enclosure s = Enclosure{1, 2} + Enclosure{3, 4};
  CHECK(s.contains(4.0));
  CHECK(s.contains(6.0));
}

TEST_CASE("quadrature encloses known integrals") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0).contains(1.0 / 3.0));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0).contains(std::exp(1.0) - 1.0));
  const Enclosure pi = integrate([](double x) { return 4.0 / (1.0 + x * x); }, 0.0, 1.0);
  CHECK(pi.contains(kPi));
  CHECK(pi.width() < 1e-10);
}

TEST_CASE("golden section finds an interior maximum") {
  const Maximum m = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
  CHECK(m.arg == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(m.value <= 0.0);
}

TEST_CASE("judge and combine") {
  CHECK(judge(1.0, 1.0, 1e-9) == Verdict::pass);
  CHECK(judge(-1.0, 1.0, 1e-9) == Verdict::fail);
  CHECK(judge(1e-12, 1.0, 1e-9) == Verdict::indeterminate);
  CHECK(judge(-1e-12, 1.0, 1e-9) == Verdict::indeterminate);
  CHECK(combine(Verdict::pass, Verdict::indeterminate) == Verdict::indeterminate);
  CHECK(combine(Verdict::indeterminate, Verdict::fail) == Verdict::fail);
  CHECK(combine(Verdict::pass, Verdict::pass) == Verdict::pass);
  CHECK(std::string(to_string(Verdict::indeterminate)) == "indeterminate");
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.455, 1e-300, 123456789.125}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
