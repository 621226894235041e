#include "xpv/mfunc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "xpv/dickman.hpp"
#include "xpv/error.hpp"

namespace xpv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw UsageError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s, const char* what) {
  try {
    std::size_t pos = 0;
    const std::string str(s);
    const double v = std::stod(str, &pos);
    if (pos != str.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  }
}

bool squarefree_odd(std::uint64_t q) {
  if (q % 2 == 0) return false;
  for (std::uint64_t p = 3; p * p <= q; p += 2)
    if (q % (p * p) == 0) return false;
  return true;
}

}  // namespace

int jacobi(std::int64_t a, std::int64_t n) {
  if (n <= 0 || n % 2 == 0) throw DomainError("jacobi: n must be odd and positive");
  a %= n;
  if (a < 0) a += n;
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

MultiplicativeSpec MultiplicativeSpec::quadratic_character(std::uint64_t q) {
  if (q < 3 || !squarefree_odd(q))
    throw DomainError("quadratic_character: q must be odd, squarefree and >= 3");
  MultiplicativeSpec s;
  s.kind = MfKind::quadratic_character;
  s.q = q;
  s.description = "quadratic_character(" + std::to_string(q) + ")";
  return s;
}

MultiplicativeSpec MultiplicativeSpec::liouville() {
  MultiplicativeSpec s;
  s.kind = MfKind::liouville;
  s.description = "liouville";
  return s;
}

MultiplicativeSpec MultiplicativeSpec::random_pm1(std::uint64_t seed) {
  MultiplicativeSpec s;
  s.kind = MfKind::random_pm1;
  s.seed = seed;
  s.description = "random_pm1(seed=" + std::to_string(seed) + ", splitmix64 keyed on p)";
  return s;
}

MultiplicativeSpec MultiplicativeSpec::constant_one() {
  MultiplicativeSpec s;
  s.kind = MfKind::constant_one;
  s.description = "constant_one";
  return s;
}

MultiplicativeSpec MultiplicativeSpec::custom_values(std::map<std::uint64_t, double> values) {
  for (const auto& [p, v] : values) {
    if (!is_prime_u64(p)) throw DomainError("custom: key " + std::to_string(p) + " is not prime");
    if (!(v >= -1.0 && v <= 1.0)) throw DomainError("custom: values must lie in [-1, 1]");
  }
  MultiplicativeSpec s;
  s.kind = MfKind::custom;
  s.custom = std::move(values);
  s.description = "custom(" + std::to_string(s.custom.size()) + " prime values, others 1)";
  return s;
}

double MultiplicativeSpec::prime_value(std::uint64_t p) const {
  switch (kind) {
    case MfKind::constant_one:
      return 1.0;
    case MfKind::liouville:
      return -1.0;
    case MfKind::quadratic_character:
      return jacobi(static_cast<std::int64_t>(p % q), static_cast<std::int64_t>(q));
    case MfKind::random_pm1:
      return (splitmix64(seed ^ splitmix64(p)) >> 63) ? 1.0 : -1.0;
    case MfKind::custom: {
      auto it = custom.find(p);
      return it == custom.end() ? 1.0 : it->second;
    }
  }
  throw InternalError("prime_value: unknown kind");
}

MultiplicativeSpec parse_mfunc_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? "" : text.substr(colon + 1);
  if (name == "constant_one" && arg.empty()) return MultiplicativeSpec::constant_one();
  if (name == "liouville" && arg.empty()) return MultiplicativeSpec::liouville();
  if ((name == "quadratic_character" || name == "chi") && !arg.empty())
    return MultiplicativeSpec::quadratic_character(parse_u64(arg, "modulus"));
  if (name == "random_pm1")
    return MultiplicativeSpec::random_pm1(arg.empty() ? 0 : parse_u64(arg, "seed"));
  if (name == "custom" && !arg.empty()) {
    std::map<std::uint64_t, double> values;
    std::size_t start = 0;
    while (start <= arg.size()) {
      const auto comma = arg.find(',', start);
      const std::string_view item = arg.substr(start, comma == std::string_view::npos ? arg.npos : comma - start);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw UsageError("custom: expected <p>=<value>");
      values[parse_u64(item.substr(0, eq), "prime")] = parse_real(item.substr(eq + 1), "value");
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return MultiplicativeSpec::custom_values(std::move(values));
  }
  throw UsageError("unknown function spec '" + std::string(text) +
                   "' (expected constant_one, liouville, quadratic_character:<q>, "
                   "random_pm1:<seed>, custom:<p>=<v>,...)");
}

double f_value(const MultiplicativeSpec& spec, std::uint64_t n, const PrimeTable* table) {
  if (n == 0) throw DomainError("f_value: n must be positive");
  if (n > kMaxFactorN) throw ResourceError("f_value: n above 1e12 is out of scope");
  double v = 1.0;
  auto take = [&](std::uint64_t p) {
    while (n % p == 0) {
      n /= p;
      v *= spec.prime_value(p);
    }
  };
  std::uint64_t next = 2;
  if (table != nullptr) {
    for (std::uint32_t p : table->primes()) {
      if (static_cast<std::uint64_t>(p) * p > n) break;
      take(p);
      next = static_cast<std::uint64_t>(p) + 1;
    }
  }
  if (next <= 2) {
    take(2);
    next = 3;
  }
  if (next % 2 == 0) ++next;
  for (std::uint64_t d = next; d * d <= n; d += 2) take(d);
  if (n > 1) v *= spec.prime_value(n);
  return v;
}

std::vector<StatsRow> stats(const MultiplicativeSpec& spec, const std::vector<double>& xs,
                            const PrimeTable& table) {
  if (xs.empty()) throw UsageError("stats: no x values");
  double xmax = 0.0;
  for (double x : xs) {
    if (!(x >= 2.0)) throw DomainError("stats: x must be >= 2");
    if (x > kMaxStatsX) throw ResourceError("stats: x above 1e8 is out of scope");
    xmax = std::max(xmax, x);
  }
  table.require_covers(xmax, "stats");
  const auto N = static_cast<std::uint64_t>(std::floor(xmax));

  // Per-x accumulators for sum f(n), sum f(n)/n and sum f(d) floor(x/d).
  struct Acc {
    CompensatedSum mean, log_mean, conv;
    std::uint64_t n_max = 0;
  };
  std::vector<Acc> acc(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) acc[i].n_max = static_cast<std::uint64_t>(std::floor(xs[i]));

  // Segmented factorization: strip each prime <= sqrt(block end) from the
  // block, whatever remains above 1 is a single prime.
  constexpr std::uint64_t kBlock = 1 << 16;
  std::vector<std::uint64_t> rem(kBlock);
  std::vector<double> val(kBlock);
  for (std::uint64_t lo = 1; lo <= N; lo += kBlock) {
    const std::uint64_t hi = std::min(N, lo + kBlock - 1);
    const std::size_t len = hi - lo + 1;
    for (std::size_t i = 0; i < len; ++i) {
      rem[i] = lo + i;
      val[i] = 1.0;
    }
    for (std::uint32_t p32 : table.primes()) {
      const std::uint64_t p = p32;
      if (p * p > hi) break;
      const double fp = spec.prime_value(p);
      for (std::uint64_t m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
        const std::size_t i = m - lo;
        while (rem[i] % p == 0) {
          rem[i] /= p;
          val[i] *= fp;
        }
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (rem[i] > 1) val[i] *= spec.prime_value(rem[i]);
      const std::uint64_t n = lo + i;
      const double fn = val[i];
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (n > acc[k].n_max) continue;
        acc[k].mean += fn;
        acc[k].log_mean += fn / static_cast<double>(n);
        acc[k].conv += fn * std::floor(xs[k] / static_cast<double>(n));
      }
    }
  }

  std::vector<StatsRow> rows;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    StatsRow r;
    r.x = x;
    r.M = acc[k].mean.value() / x;
    r.L = acc[k].log_mean.value() / std::log(x);
    r.conv_mean = acc[k].conv.value() / x;
    CompensatedSum u, recip;
    const std::size_t np = table.count_le(x);
    for (std::size_t i = 0; i < np; ++i) {
      const double p = table[i];
      u += (1.0 - spec.prime_value(table[i])) / p;
      recip += 1.0 / p;
    }
    r.u = u.value();
    r.Lambda = r.u / recip.value();
    rows.push_back(r);
  }
  return rows;
}

StatsRow stats(const MultiplicativeSpec& spec, double x, const PrimeTable& table) {
  return stats(spec, std::vector<double>{x}, table).front();
}

std::int64_t char_sum(std::int64_t q, std::int64_t t) {
  if (q < 3 || q % 2 == 0) throw DomainError("char_sum: q must be odd and >= 3");
  if (t < 0) throw DomainError("char_sum: t must be >= 0");
  // The character has period q.
  std::int64_t period = 0;
  const std::int64_t full = t / q, rest = t % q;
  std::int64_t partial = 0;
  for (std::int64_t n = 1; n <= q; ++n) {
    const int j = jacobi(n, q);
    period += j;
    if (n <= rest) partial += j;
  }
  return full * period + partial;
}

double pv_ratio(std::int64_t q) {
  if (q < 3 || q % 2 == 0 || !is_prime_u64(static_cast<std::uint64_t>(q)))
    throw DomainError("pv_ratio: q must be an odd prime");
  if (static_cast<std::uint64_t>(q) > kMaxPvModulus)
    throw ResourceError("pv_ratio: q above 1e7 is out of scope");
  std::int64_t s = 0, best = 0;
  for (std::int64_t t = 1; t <= q; ++t) {
    s += jacobi(t, q);
    best = std::max<std::int64_t>(best, s < 0 ? -s : s);
  }
  const double qd = static_cast<double>(q);
  return static_cast<double>(best) / (std::sqrt(qd) * std::log(qd));
}

const char* to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::vacuous: return "pass-vacuous";
  }
  return "?";
}

EmpiricalReport empirical_checks(const StatsRow& row, double c, const ConstantLedger& ledger) {
  if (!(row.x >= 2.0)) throw DomainError("empirical_checks: x must be >= 2");
  EmpiricalReport rep;
  rep.row = row;
  const double absM = std::fabs(row.M);
  {
    EmpiricalCheck e;
    e.name = "mean-value bound";
    e.lhs = absM;
    e.rhs = ledger.final_constant * std::exp(-ledger.K * row.u);
    e.status = e.lhs <= e.rhs ? CheckStatus::pass : CheckStatus::fail;
    e.slack = e.lhs > 0.0 ? e.rhs / e.lhs : std::numeric_limits<double>::infinity();
    rep.checks.push_back(e);
  }
  {
    EmpiricalCheck e;
    e.name = "logarithmic-mean transfer";
    const LogValue d = delta(c, ledger.K, ledger.final_constant);
    e.rhs = d.log_value;
    e.lhs = row.L > 0.0 ? std::log(row.L) : -std::numeric_limits<double>::infinity();
    if (absM < c) {
      e.status = CheckStatus::vacuous;
      e.slack = c - absM;
    } else {
      e.status = e.lhs >= e.rhs ? CheckStatus::pass : CheckStatus::fail;
      e.slack = e.lhs - e.rhs;
    }
    rep.checks.push_back(e);
  }
  {
    EmpiricalCheck e;
    e.name = "convolution mean lower bound";
    e.lhs = row.conv_mean;
    e.rhs = theorem14_rhs(row.x, row.u);
    e.status = e.lhs >= e.rhs ? CheckStatus::pass : CheckStatus::fail;
    e.slack = e.lhs / e.rhs;
    rep.checks.push_back(e);
  }
  return rep;
}

}  // namespace xpv
