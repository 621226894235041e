#include "xpv/primes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "xpv/error.hpp"

namespace xpv {

std::uint64_t sieve_cap_from_env() {
  const char* env = std::getenv("XPV_SIEVE_LIMIT");
  if (env == nullptr || *env == '\0') return kDefaultSieveCap;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v >= 2.0))
    throw UsageError(std::string("XPV_SIEVE_LIMIT is not a number >= 2: ") + env);
  return static_cast<std::uint64_t>(v);
}

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint32_t> primes)
    : limit_(limit), primes_(std::move(primes)) {}

std::size_t PrimeTable::count_le(double x) const {
  if (x < 2.0) return 0;
  if (x >= static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
    return primes_.size();
  const auto n = static_cast<std::uint32_t>(std::floor(x));
  return static_cast<std::size_t>(
      std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

std::size_t PrimeTable::count_lt(double x) const {
  if (x <= 2.0) return 0;
  if (x > static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
    return primes_.size();
  const auto n = static_cast<std::uint32_t>(std::ceil(x));
  return static_cast<std::size_t>(
      std::lower_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

bool PrimeTable::contains(std::uint64_t n) const {
  if (n > std::numeric_limits<std::uint32_t>::max()) return false;
  return std::binary_search(primes_.begin(), primes_.end(),
                            static_cast<std::uint32_t>(n));
}

void PrimeTable::require_covers(double x, const char* who) const {
  if (!(x <= static_cast<double>(limit_)))
    throw PreconditionError(std::string(who) + ": prime table limit " +
                            std::to_string(limit_) + " does not cover x = " +
                            format_double(x));
}

PrimeTable sieve_primes(std::uint64_t limit, std::uint64_t cap) {
  if (limit < 2) throw DomainError("sieve_primes: limit must be >= 2");
  if (limit > cap)
    throw ResourceError("sieve_primes: limit " + std::to_string(limit) +
                        " exceeds the configured cap " + std::to_string(cap));
  if (limit > std::numeric_limits<std::uint32_t>::max())
    throw ResourceError("sieve_primes: limit exceeds 32-bit prime storage");

  std::vector<std::uint32_t> primes;
  const double approx = static_cast<double>(limit) / std::log(static_cast<double>(limit));
  primes.reserve(static_cast<std::size_t>(approx * 1.2) + 16);
  primes.push_back(2);

  // Base primes up to sqrt(limit) by a plain sieve.
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  std::vector<bool> small(root + 1, true);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 3; i <= root; i += 2) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += 2 * i) small[j] = false;
  }

  // Segment s covers odd numbers low, low+2, ..., flags index k <-> low + 2k.
  constexpr std::uint64_t kSegment = 1u << 18;
  std::vector<std::uint8_t> flags(kSegment);
  std::vector<std::uint64_t> next(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) next[i] = base[i] * base[i];

  for (std::uint64_t low = 3; low <= limit; low += 2 * kSegment) {
    const std::uint64_t high = std::min(limit, low + 2 * kSegment - 1);
    const std::uint64_t count = (high - low) / 2 + 1;
    std::fill(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(count), 1);
    for (std::size_t i = 0; i < base.size(); ++i) {
      const std::uint64_t p = base[i];
      if (p * p > high) break;
      std::uint64_t j = next[i];
      for (; j <= high; j += 2 * p) flags[(j - low) / 2] = 0;
      next[i] = j;
    }
    for (std::uint64_t k = 0; k < count; ++k)
      if (flags[k]) primes.push_back(static_cast<std::uint32_t>(low + 2 * k));
  }
  return PrimeTable(limit, std::move(primes));
}

PrimeSums::PrimeSums(const PrimeTable& table, double up_to) : table_(&table) {
  const std::size_t n = table.count_le(up_to);
  recip_.reserve(n);
  log2_.reserve(n);
  CompensatedSum r;
  CompensatedSum l;
  for (std::size_t i = 0; i < n; ++i) {
    const double pd = table[i];
    const double lp = std::log(pd);
    r += 1.0 / pd;
    l += lp * lp / pd;
    recip_.push_back(r.value());
    log2_.push_back(l.value());
  }
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double next_up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }
double next_down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }

}  // namespace

Enclosure log_integral_series(double x) {
  if (!(x > 1.0)) throw DomainError("log_integral: x must exceed 1");
  // li(x) = gamma + log(log x) + sum_{n>=1} t^n / (n * n!), t = log x.
  const double t = std::log(x);
  CompensatedSum sum;
  double term = t;  // t^n / n! for n = 1
  double rounding = 0.0;
  double remainder = 0.0;
  for (int n = 1;; ++n) {
    const double a = term / n;
    sum += a;
    // Each recurrence step contributes a few ulps of relative error.
    rounding += a * (4.0 * n + 4.0) * kEps;
    const double next = term * t / (n + 1);
    const double ratio = t * (n + 1) / ((n + 2.0) * (n + 2.0));
    if (n + 1 > t && ratio < 1.0) {
      // Terms are decreasing geometrically from here on.
      const double tail = (next / (n + 1)) / (1.0 - ratio);
      if (tail <= 1e-18 * std::fabs(sum.value()) || tail == 0.0) {
        remainder = tail;
        break;
      }
    }
    term = next;
    if (n > 2000) throw PrecisionError("log_integral_series: series failed to converge");
  }
  const double loglog = std::log(t);
  const double center = kEulerGamma + loglog + sum.value();
  const double err =
      rounding + 4.0 * kEps * (kEulerGamma + std::fabs(loglog) + std::fabs(sum.value()));
  // The truncated tail is positive, so it only widens the upper edge.
  return {next_down(center - err), next_up(center + err + remainder)};
}

namespace {

// g(t) = 1/log t - 1/(t-1), analytic at t = 1.
double li_regular_part(double t) {
  const double u = t - 1.0;
  if (std::fabs(u) < 1e-3) {
    return 0.5 - u / 12.0 + u * u / 24.0 - 19.0 * u * u * u / 720.0 +
           3.0 * u * u * u * u / 160.0;
  }
  return 1.0 / std::log(t) - 1.0 / u;
}

}  // namespace

Enclosure log_integral_quadrature(double x) {
  if (!(x > 1.0)) throw DomainError("log_integral: x must exceed 1");
  // Integral of 1/log t over [0, 1/2] equals -int_{log 2}^inf e^-v / v dv.
  Enclosure head = integrate([](double v) { return -std::exp(-v) / v; }, std::log(2.0), 40.0);
  head.lo -= std::exp(-40.0) / 40.0;
  // PV over [1/2, min(x,2)] with the 1/(t-1) pole removed analytically.
  const double upper = std::min(x, 2.0);
  Enclosure middle = integrate(li_regular_part, 0.5, upper);
  const double pole = std::log(std::fabs(upper - 1.0)) + std::log(2.0);
  Enclosure result = head + middle + Enclosure::around(pole, 4.0 * kEps * (std::fabs(pole) + 1.0));
  if (x > 2.0) {
    Enclosure rest = integrate([](double u) { return std::exp(u) / u; }, std::log(2.0), std::log(x));
    result = result + rest;
  }
  return result;
}

Enclosure log_integral(double x) { return log_integral_series(x); }

double mertens_sum(double x, const PrimeTable& table) {
  if (!(x >= 2.0)) throw DomainError("mertens_sum: x must be >= 2");
  table.require_covers(x, "mertens_sum");
  CompensatedSum s;
  const std::size_t n = table.count_le(x);
  for (std::size_t i = 0; i < n; ++i) s += 1.0 / static_cast<double>(table[i]);
  return s.value();
}

double log_square_sum(double x, const PrimeTable& table) {
  if (!(x > 1.0)) throw DomainError("log_square_sum: x must exceed 1");
  table.require_covers(x, "log_square_sum");
  CompensatedSum s;
  const std::size_t n = table.count_le(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = table[i];
    const double lp = std::log(p);
    s += lp * lp / p;
  }
  return s.value();
}

Enclosure prime_zeta(int k, const PrimeTable& table) {
  if (k < 2) throw DomainError("prime_zeta: k must be >= 2 (the series diverges at k = 1)");
  CompensatedSum s;
  double rounding = 0.0;
  for (const std::uint32_t p : table.primes()) {
    const double term = std::pow(static_cast<double>(p), -k);
    if (term == 0.0) break;
    s += term;
    rounding += 2.0 * kEps * term;
  }
  const double n = static_cast<double>(table.limit());
  const double tail = std::pow(n, 1.0 - k) / (k - 1.0);
  const double v = s.value();
  return {next_down(v - rounding), next_up(v + rounding + tail)};
}

Enclosure nu2(const PrimeTable& table) {
  if (table.limit() < 1'000'000)
    throw PreconditionError("nu2: prime table must reach at least 10^6");
  constexpr int kMax = 64;
  Enclosure total = Enclosure::point(0.0);
  for (int k = 2; k <= kMax; ++k) {
    const Enclosure pk = prime_zeta(k, table);
    total = total + Enclosure{pk.lo / k, pk.hi / k};
  }
  // P(k) <= 2^(1-k) for k >= 2, so the k > kMax tail is below 2^(1-kMax)/(kMax+1).
  total.hi = next_up(total.hi + std::ldexp(1.0, 1 - kMax) / (kMax + 1));
  return total;
}

double tail_power_sum_bound(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw DomainError("tail_power_sum_bound: alpha must lie in (0, 1]");
  return (1.0 + alpha) * 1.2551 / kE;
}

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These twelve bases are a deterministic witness set below 3.3e24.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t least_prime_3mod4_above(double x, const PrimeTable* table) {
  if (!(x >= 1.0)) throw DomainError("least_prime_3mod4_above: x must be >= 1");
  constexpr double kLimit = 9.2e18;
  if (!(x < kLimit)) throw ResourceError("least_prime_3mod4_above: x exceeds 64-bit range");
  std::uint64_t n = static_cast<std::uint64_t>(std::floor(x)) + 1;
  while (n % 4 != 3) ++n;
  for (;; n += 4) {
    if (n > static_cast<std::uint64_t>(kLimit))
      throw ResourceError("least_prime_3mod4_above: search overflowed 64-bit range");
    const bool prime = (table != nullptr && n <= table->limit()) ? table->contains(n)
                                                                  : is_prime_u64(n);
    if (prime) break;
  }
  // Breusch: for x >= 7 there is such a prime in (x, 2x].
  if (x >= 7.0 && static_cast<double>(n) > 2.0 * x)
    throw InternalError("least_prime_3mod4_above: l > 2x contradicts Breusch's bound");
  return n;
}

}  // namespace xpv
