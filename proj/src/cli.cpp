#include "xpv/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "xpv/dickman.hpp"
#include "xpv/error.hpp"
#include "xpv/mean_value.hpp"
#include "xpv/mfunc.hpp"
#include "xpv/primes.hpp"
#include "xpv/verify.hpp"

namespace xpv {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kComputed = "computed";
constexpr const char* kPaper = "paper";
constexpr const char* kDerived = "derived";

Json num(double v, const char* provenance) {
  Json j;
  if (std::isfinite(v)) {
    j["value"] = v;
  } else {
    j["value"] = nullptr;
    j["text"] = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  j["provenance"] = provenance;
  return j;
}

Json enclosure_json(const Enclosure& e, const char* provenance) {
  Json j;
  j["lo"] = num(e.lo, provenance);
  j["hi"] = num(e.hi, provenance);
  return j;
}

Json discrepancy(const std::string& item, double computed, std::optional<double> paper,
                 const std::string& note) {
  Json d;
  d["item"] = item;
  d["computed"] = num(computed, kComputed);
  if (paper) {
    d["paper"] = num(*paper, kPaper);
    d["gap"] = num(computed - *paper, kComputed);
  }
  d["note"] = note;
  return d;
}

Json check_json(const std::string& name, bool pass, const std::string& detail = "") {
  Json j;
  j["check"] = name;
  j["pass"] = pass;
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

struct GlobalOptions {
  std::string format = "json";
  std::string out;
  double safety_margin = 1e-9;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::uint64_t sieve_limit = 0;  // 0: default cap
};

std::uint64_t sieve_cap(const GlobalOptions& g) {
  return g.sieve_limit ? g.sieve_limit : sieve_cap_from_env();
}

Json global_config(const GlobalOptions& g) {
  Json c;
  c["format"] = g.format;
  c["safety_margin"] = g.safety_margin;
  c["threads"] = g.threads;
  c["seed"] = g.seed;
  c["sieve_cap"] = sieve_cap(g);
  return c;
}

// A finished command: the JSON document plus optional CSV rows.
struct Output {
  Json doc;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

Output make_output(const std::string& command, const GlobalOptions& g) {
  Output o;
  o.doc["version"] = kVersion;
  o.doc["command"] = command;
  o.doc["config"] = global_config(g);
  o.doc["stamps"] = Json::array();
  o.doc["results"] = Json::array();
  o.doc["discrepancies"] = Json::array();
  o.doc["pass"] = true;
  return o;
}

const char* side_name(Side s) { return s == Side::left ? "left" : "at"; }

Json report_json(const VerificationReport& r) {
  const CheckSpec* spec = nullptr;
  for (const auto& c : check_registry())
    if (c.id == r.check_id) spec = &c;
  Json j;
  j["check_id"] = r.check_id;
  if (spec) {
    j["statement"] = spec->statement;
    j["quote"] = spec->quote;
  }
  j["x_lo"] = num(r.x_lo, kDerived);
  j["x_hi"] = num(r.x_hi, kDerived);
  j["lo_open"] = r.lo_open;
  j["worst_margin"] = num(r.worst_margin, kComputed);
  j["arg_min"] = num(r.arg_min, kComputed);
  j["arg_side"] = side_name(r.arg_side);
  j["rhs_at_min"] = num(r.rhs_at_min, kComputed);
  j["verdict"] = to_string(r.verdict);
  j["pass"] = r.pass;
  j["evaluation_count"] = r.evaluation_count;
  j["failing_points"] = r.failing_points;
  j["indeterminate_points"] = r.indeterminate_points;
  j["last_failure"] = r.last_failure ? num(*r.last_failure, kComputed) : Json(nullptr);
  j["crossover"] = r.crossover ? num(*r.crossover, kComputed) : Json(nullptr);
  j["gap_margin_lower"] = num(r.gap_margin_lower, kComputed);
  j["method"] = r.method;
  return j;
}

void add_report_discrepancy(Output& o, const VerificationReport& r, const std::string& claim) {
  if (r.pass) return;
  std::ostringstream note;
  note << "claimed " << claim << "; " << r.failing_points << " failing and " << r.indeterminate_points
       << " indeterminate critical points, worst at x = " << format_double(r.arg_min) << " ("
       << side_name(r.arg_side) << ")";
  if (r.last_failure) note << ", last failure at " << format_double(*r.last_failure);
  if (r.crossover) note << ", holds from about " << format_double(*r.crossover);
  o.doc["discrepancies"].push_back(discrepancy(r.check_id + " worst margin", r.worst_margin, 0.0, note.str()));
}

std::string validity_text(const CheckSpec& c) {
  std::string s = c.valid_lo_open ? "(" : "[";
  s += format_double(c.valid_lo) + ", ";
  s += std::isinf(c.valid_hi) ? std::string("inf") : format_double(c.valid_hi);
  s += c.valid_hi_open || std::isinf(c.valid_hi) ? ")" : "]";
  return s;
}

// ---- verify --------------------------------------------------------------

struct VerifyArgs {
  std::string check;
  double from = 0.0, to = 0.0;
  bool open_lo = false;
};

Output cmd_verify(const VerifyArgs& a, const GlobalOptions& g) {
  Output o = make_output("verify", g);
  const CheckSpec& spec = find_check(a.check);
  o.doc["config"]["check"] = a.check;
  o.doc["config"]["from"] = a.from;
  o.doc["config"]["to"] = a.to;
  o.doc["config"]["open_lo"] = a.open_lo;
  const std::uint64_t limit =
      spec.needs_primes && a.to >= 2.0 ? static_cast<std::uint64_t>(std::floor(a.to)) : 2;
  // Range validation happens before sieving so bad input fails fast.
  if (!(a.from <= a.to)) throw PreconditionError("verify: --from must not exceed --to");
  const PrimeTable table = sieve_primes(limit, sieve_cap(g));
  SweepOptions opts;
  opts.eta = g.safety_margin;
  opts.threads = g.threads;
  opts.lo_open = a.open_lo;
  const VerificationReport r = verify_inequality(a.check, a.from, a.to, table, opts);
  o.doc["results"].push_back(report_json(r));
  add_report_discrepancy(o, r, "validity " + validity_text(spec));
  o.doc["pass"] = r.pass;
  return o;
}

// ---- dickman -------------------------------------------------------------

struct DickmanArgs {
  double xmax = 130.0;
  double step = kDefaultRhoStep;
  std::vector<std::string> exponent_checks;  // "lo,hi,e,source"
};

Output cmd_dickman(const DickmanArgs& a, const GlobalOptions& g) {
  Output o = make_output("dickman", g);
  o.doc["config"]["xmax"] = a.xmax;
  o.doc["config"]["step"] = a.step;
  o.doc["config"]["exponent_checks"] = a.exponent_checks;

  struct ExpCheck {
    double lo, hi, e;
    RhoSource src;
  };
  std::vector<ExpCheck> parsed;
  for (const auto& s : a.exponent_checks) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != 4) throw UsageError("--exponent-check expects lo,hi,exponent,source");
    try {
      parsed.push_back({std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]),
                        parse_rho_source(parts[3])});
    } catch (const std::invalid_argument&) {
      throw UsageError("--exponent-check: bad number in '" + s + "'");
    }
  }

  const RhoLogTable table = build_rho_table(a.xmax, a.step);
  Json stats;
  stats["x_max"] = num(table.x_max, kDerived);
  stats["step"] = num(table.step, kDerived);
  stats["points"] = table.size();
  stats["max_err"] = num(*std::max_element(table.err.begin(), table.err.end()), kComputed);
  stats["log_rho_at_x_max"] = num(table.log_values.back(), kComputed);
  Json samples = Json::array();
  for (double x : {1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0, 130.0, 200.0}) {
    if (x > table.x_max) break;
    const Enclosure e = rho_log(x, table);
    Json s;
    s["x"] = x;
    s["log_rho"] = enclosure_json(e, kComputed);
    s["log10_rho_mid"] = num(e.mid() / std::log(10.0), kComputed);
    samples.push_back(s);
  }
  stats["samples"] = samples;
  const ExponentBound eb = minimal_valid_exponent(table, 1.0, std::min(200.0, table.x_max));
  Json diag;
  diag["range_hi"] = num(std::min(200.0, table.x_max), kDerived);
  diag["minimal_exponent"] = num(eb.exponent, kComputed);
  diag["attained_at"] = num(eb.arg, kComputed);
  stats["minimal_exponent_diagnostic"] = diag;
  Json table_result;
  table_result["kind"] = "rho_table";
  table_result["table"] = stats;
  o.doc["results"].push_back(table_result);

  bool pass = true;
  SweepOptions opts;
  opts.eta = g.safety_margin;
  for (const auto& c : parsed) {
    const VerificationReport r = verify_rho_exponent(c.lo, c.hi, c.e, c.src, &table, opts);
    Json j = report_json(r);
    j["exponent"] = num(c.e, kPaper);
    o.doc["results"].push_back(j);
    add_report_discrepancy(o, r, "log rho(x) >= -" + format_double(c.e) + " x log x");
    pass = pass && r.pass;
  }
  o.doc["pass"] = pass;
  return o;
}

// ---- constants -----------------------------------------------------------

struct ConstantsArgs {
  double c0 = 7.28;
  bool optimize = false;
  std::int64_t nu3_trunc = 1000000;
};

Output cmd_constants(const ConstantsArgs& a, const GlobalOptions& g) {
  Output o = make_output("constants", g);
  o.doc["config"]["c0"] = a.c0;
  o.doc["config"]["optimize"] = a.optimize;
  o.doc["config"]["nu3_trunc"] = a.nu3_trunc;
  o.doc["stamps"].push_back("o(1) terms of the mean-value and transfer statements are dropped");

  std::vector<Json> checks;
  bool pass = true;
  auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    checks.push_back(check_json(name, ok, detail));
    pass = pass && ok;
  };

  const Enclosure K = solve_K();
  const PeriodicF f = PeriodicF::build(K.mid());
  Json kj;
  kj["kind"] = "K";
  kj["enclosure"] = enclosure_json(K, kComputed);
  kj["theta_residual"] = num(k_theta_residual(K.mid()), kComputed);
  kj["periodic_f"] = {{"mean", num(f.mean, kComputed)},
                      {"sup", num(f.sup, kComputed)},
                      {"variation", num(f.variation, kComputed)}};
  o.doc["results"].push_back(kj);
  const bool k_near = K.lo - 5e-5 <= 0.3286 && 0.3286 <= K.hi + 5e-5;
  check("K within 5e-5 of 0.3286", k_near, "enclosure [" + format_double(K.lo) + ", " + format_double(K.hi) + "]");
  if (!k_near)
    o.doc["discrepancies"].push_back(
        discrepancy("K", K.mid(), 0.3286, "published value is a 4-digit truncation of the root"));

  const ErrorParams paper_point;
  const CaseBounds cb = lemma47_case_bounds(paper_point, f);
  Json cj;
  cj["kind"] = "case_bounds";
  cj["params"] = {{"c", paper_point.c}, {"k1", paper_point.k1}, {"eps", paper_point.eps}, {"k2", paper_point.k2}};
  cj["C_I"] = num(cb.C_I, kComputed);
  cj["C_II"] = num(cb.C_II, kComputed);
  cj["C_III"] = num(cb.C_III, kComputed);
  cj["C_IV"] = num(cb.C_IV, kComputed);
  cj["C0"] = num(cb.C0, kComputed);
  cj["tail_small"] = num(cb.tail_small, kComputed);
  cj["tail_large"] = num(cb.tail_large, kComputed);
  cj["tail_large_maximizer_tau"] = num(cb.tail_large_tau, kComputed);
  cj["components_small"] = {{"pi_over_2c_times_V", num(kPi / (2 * paper_point.c) * f.variation, kComputed)},
                            {"li_term_times_S", num(kLiTermCoeff / paper_point.c * f.sup, kComputed)}};
  o.doc["results"].push_back(cj);
  o.doc["discrepancies"].push_back(discrepancy("C_II at c=2.67, k1=0", cb.C_II, 7.28, "signed gap to the published C0"));
  o.doc["discrepancies"].push_back(discrepancy("C_III at eps=3.61, k2=3e5", cb.C_III, 3.25, "signed gap"));
  o.doc["discrepancies"].push_back(discrepancy("C_IV at eps=3.61", cb.C_IV, 4.87, "signed gap"));

  const PrimeTable table = sieve_primes(1000000, sieve_cap(g));
  const Enclosure n2 = nu2(table);
  const double gm = kEulerGamma - kMertens;
  Json nj;
  nj["kind"] = "auxiliary_constants";
  nj["nu2"] = enclosure_json(n2, kComputed);
  nj["gamma_minus_M"] = num(gm, kDerived);
  check("nu2 contains gamma - M", n2.contains(gm), "");
  check("nu2 <= 0.316", n2.hi <= 0.316, format_double(n2.hi));
  double nu1 = 0.0;
  for (int k = 1; k <= 10000; ++k) nu1 = std::max(nu1, tail_power_sum_bound(k / 10000.0));
  nj["nu1"] = num(nu1, kComputed);
  check("nu1 <= 0.9235 with gap < 1e-4", nu1 <= 0.9235 && 0.9235 - nu1 < 1e-4, format_double(nu1));
  const Enclosure i945 = verify_integral_945();
  nj["integral_e2y_over_y2"] = enclosure_json(i945, kComputed);
  check("integral within [9.43, 9.45]", i945.subset_of(9.43, 9.45), "");
  const Enclosure n3 = nu3(a.nu3_trunc, K);
  nj["nu3"] = enclosure_json(n3, kComputed);
  check("nu3 <= 4.36", n3.hi <= 4.36, format_double(n3.hi));
  o.doc["results"].push_back(nj);

  const ConstantLedger l = assemble_ledger(a.c0, table, a.nu3_trunc);
  Json lj;
  lj["kind"] = "ledger";
  Json entries = Json::array();
  for (const auto& e : l.entries) {
    Json x;
    x["name"] = e.name;
    x["value"] = e.value;
    x["provenance"] = e.provenance;
    x["note"] = e.note;
    entries.push_back(x);
  }
  lj["entries"] = entries;
  o.doc["results"].push_back(lj);
  check("a within [5.4e5, 5.6e5]", l.a >= 5.4e5 && l.a <= 5.6e5, format_double(l.a));
  check("final within [9.5e5, 9.9e5]", l.final_constant >= 9.5e5 && l.final_constant <= 9.9e5,
        format_double(l.final_constant));
  o.doc["discrepancies"].push_back(discrepancy("final constant", l.final_constant, 9.75e5, "ledger at the given C0"));

  if (a.optimize) {
    const OptimizeResult r = optimize_C0(OptimizeGrids::defaults(), f);
    Json oj;
    oj["kind"] = "optimizer";
    oj["grids"] = "c in [1,5] step 0.01; k1 in 0..20; eps in [0.5,10] step 0.01; k2 in {1e3,1e4,1e5,3e5,1e6}";
    oj["C0"] = num(r.C0, kComputed);
    oj["argmin"] = {{"c", r.best.c}, {"k1", r.best.k1}, {"eps", r.best.eps}, {"k2", r.best.k2}};
    oj["small_tau_block_min"] = num(r.small_block_min, kComputed);
    oj["large_tau_block_min"] = num(r.large_block_min, kComputed);
    oj["evaluations"] = r.evaluations;
    o.doc["results"].push_back(oj);
    check("optimized C0 within [6.5, 8.0]", r.C0 >= 6.5 && r.C0 <= 8.0, format_double(r.C0));
    o.doc["discrepancies"].push_back(discrepancy("optimized C0", r.C0, 7.28,
                                                 "grid minimum of the max of the four case constants"));
  }
  Json cjs;
  cjs["kind"] = "checks";
  cjs["checks"] = checks;
  o.doc["results"].push_back(cjs);
  o.doc["pass"] = pass;
  return o;
}

// ---- table ---------------------------------------------------------------

struct TableArgs {
  std::vector<double> c1;
  std::vector<double> c;
  bool delta_paper = false;
};

Output cmd_table(const TableArgs& a, const GlobalOptions& g) {
  Output o = make_output("table", g);
  const PaperTable& paper = paper_table1();
  const std::vector<double> c1 = a.c1.empty() ? paper.c1 : a.c1;
  const std::vector<double> cs = a.c.empty() ? paper.c : a.c;
  o.doc["config"]["c1"] = c1;
  o.doc["config"]["c"] = cs;
  o.doc["config"]["delta_paper"] = a.delta_paper;
  o.doc["stamps"].push_back("o(1) terms of delta(c) and epsilon(c1, c) are dropped");

  const double K = solve_K().mid();
  // delta per column: published values, or the printed formula (log space).
  Json deltas = Json::array();
  std::map<double, double> delta_map;
  const auto paper_deltas = paper_delta_map();
  for (double c : cs) {
    const LogValue formula = delta(c, K);
    const LogValue cand = delta_candidate(c, K);
    Json d;
    d["c"] = c;
    d["log10_delta_formula"] = num(formula.log10(), kComputed);
    d["delta_candidate_reverse_engineered"] = num(cand.value, kComputed);
    std::optional<double> pub;
    for (const auto& [pc, pd] : paper_deltas)
      if (std::fabs(pc - c) <= 1e-12 * c) pub = pd;
    if (pub) {
      d["delta_paper"] = num(*pub, kPaper);
      o.doc["discrepancies"].push_back(discrepancy(
          "log10 delta(" + format_double(c) + ")", formula.log10(), std::log10(*pub),
          "printed formula does not reproduce the tabulated delta; 0.2 (c/9.75e5)^(1/(2K)) gives " +
              format_double(cand.value) + " (reverse-engineered, not authoritative)"));
    }
    if (a.delta_paper) {
      if (!pub) throw UsageError("table: no published delta for c = " + format_double(c));
      delta_map[c] = *pub;
    }
    deltas.push_back(d);
  }
  Json dres;
  dres["kind"] = "delta";
  dres["columns"] = deltas;
  o.doc["results"].push_back(dres);

  o.csv_header = {"c1", "c", "delta", "epsilon", "log10_epsilon", "paper", "ratio"};
  if (a.delta_paper) {
    const Table1Report rep = table1_report(c1, cs, delta_map, K);
    Json cells = Json::array();
    for (const auto& t : rep.cells) {
      Json cj;
      cj["c1"] = t.c1;
      cj["c"] = t.c;
      cj["delta"] = num(t.delta, kPaper);
      cj["epsilon"] = num(t.eps.value, kComputed);
      cj["log10_epsilon"] = num(t.eps.log10(), kComputed);
      cj["paper"] = t.paper ? num(*t.paper, kPaper) : Json(nullptr);
      cj["ratio"] = t.ratio ? num(*t.ratio, kComputed) : Json(nullptr);
      cells.push_back(cj);
      o.csv_rows.push_back({format_double(t.c1), format_double(t.c), format_double(t.delta),
                            format_double(t.eps.value), format_double(t.eps.log10()),
                            t.paper ? format_double(*t.paper) : "", t.ratio ? format_double(*t.ratio) : ""});
    }
    Json checks = Json::array();
    bool pass = true;
    for (const auto& s : rep.checks) {
      Json sj;
      sj["check"] = s.name;
      sj["worst"] = num(s.worst, kComputed);
      sj["worst_excluding_flagged_cells"] = num(s.worst_unflagged, kComputed);
      sj["tolerance"] = num(s.tolerance, kDerived);
      sj["where"] = s.where;
      sj["pass"] = s.pass;
      checks.push_back(sj);
      pass = pass && s.pass;
    }
    Json tr;
    tr["kind"] = "table";
    tr["cells"] = cells;
    tr["checks"] = checks;
    tr["common_factor"] = num(rep.common_factor, kComputed);
    tr["ratio_spread"] = num(rep.ratio_spread, kComputed);
    tr["ratio_spread_excluding_flagged_cells"] = num(rep.ratio_spread_excluding_outliers, kComputed);
    tr["notes"] = rep.notes;
    o.doc["results"].push_back(tr);
    if (rep.common_factor > 0.0)
      o.doc["discrepancies"].push_back(discrepancy(
          "published epsilon / 4 pi c1 delta^-1.5", rep.common_factor, 1.0,
          "common factor not derivable from the printed statement"));
    for (const auto& n : rep.notes)
      if (n.rfind("cell", 0) == 0) o.doc["discrepancies"].push_back(Json{{"item", "table cell"}, {"note", n}});
    o.doc["pass"] = pass;
  } else {
    Json cells = Json::array();
    for (double x1 : c1)
      for (double c : cs) {
        const LogValue e = epsilon_exponent(x1, c, K);
        Json cj;
        cj["c1"] = x1;
        cj["c"] = c;
        cj["log10_epsilon"] = num(e.log10(), kComputed);
        cells.push_back(cj);
        o.csv_rows.push_back({format_double(x1), format_double(c), "", "", format_double(e.log10()), "", ""});
      }
    Json tr;
    tr["kind"] = "table_formula_delta";
    tr["cells"] = cells;
    o.doc["results"].push_back(tr);
  }
  return o;
}

// ---- mfunc ---------------------------------------------------------------

struct MfuncArgs {
  std::vector<std::string> kinds;
  std::vector<double> x;
  double c = 0.5;
  double c0 = 7.28;
};

Output cmd_mfunc(const MfuncArgs& a, const GlobalOptions& g) {
  Output o = make_output("mfunc", g);
  std::vector<MultiplicativeSpec> specs;
  for (const auto& k : a.kinds) {
    MultiplicativeSpec s = parse_mfunc_spec(k);
    if (s.kind == MfKind::random_pm1 && k.find(':') == std::string::npos)
      s = MultiplicativeSpec::random_pm1(g.seed);
    specs.push_back(s);
  }
  if (a.x.empty()) throw UsageError("mfunc: --x is required");
  if (!(a.c > 0.0 && a.c <= 1.0)) throw PreconditionError("mfunc: --c must lie in (0, 1]");
  o.doc["config"]["kinds"] = a.kinds;
  o.doc["config"]["x"] = a.x;
  o.doc["config"]["c"] = a.c;
  o.doc["config"]["c0"] = a.c0;
  o.doc["stamps"].push_back("o(1) terms of all three empirical checks are dropped");
  for (double x : a.x)
    if (!(x >= 2.0)) throw PreconditionError("mfunc: every x must be >= 2");

  const double xmax = *std::max_element(a.x.begin(), a.x.end());
  const auto limit = std::max<std::uint64_t>(1000000, static_cast<std::uint64_t>(std::floor(xmax)));
  const PrimeTable table = sieve_primes(limit, sieve_cap(g));
  const ConstantLedger ledger = assemble_ledger(a.c0, table);
  o.csv_header = {"x", "M", "L", "u", "Lambda", "conv_mean"};
  bool pass = true;
  for (const auto& spec : specs) {
    const std::vector<StatsRow> rows = stats(spec, a.x, table);
    for (const auto& row : rows) {
      const EmpiricalReport rep = empirical_checks(row, a.c, ledger);
      Json r;
      r["kind"] = spec.description;
      r["x"] = num(row.x, kDerived);
      r["M"] = num(row.M, kComputed);
      r["L"] = num(row.L, kComputed);
      r["u"] = num(row.u, kComputed);
      r["Lambda"] = num(row.Lambda, kComputed);
      r["conv_mean"] = num(row.conv_mean, kComputed);
      Json checks = Json::array();
      for (const auto& e : rep.checks) {
        Json cj;
        cj["check"] = e.name;
        cj["status"] = to_string(e.status);
        cj["lhs"] = num(e.lhs, kComputed);
        cj["rhs"] = num(e.rhs, kComputed);
        cj["slack"] = num(e.slack, kComputed);
        checks.push_back(cj);
        pass = pass && e.status != CheckStatus::fail;
      }
      r["checks"] = checks;
      o.doc["results"].push_back(r);
      o.csv_rows.push_back({format_double(row.x), format_double(row.M), format_double(row.L),
                            format_double(row.u), format_double(row.Lambda), format_double(row.conv_mean)});
    }
  }
  o.doc["pass"] = pass;
  return o;
}

// ---- charsum -------------------------------------------------------------

struct CharsumArgs {
  std::vector<std::int64_t> q;
  bool pv = false;
};

Output cmd_charsum(const CharsumArgs& a, const GlobalOptions& g) {
  Output o = make_output("charsum", g);
  if (a.q.empty()) throw UsageError("charsum: --q is required");
  o.doc["config"]["q"] = a.q;
  o.doc["config"]["pv_ratio"] = a.pv;
  o.csv_header = {"q", "S_q", "max_abs_S", "argmax_t", "pv_ratio"};
  bool pass = true;
  for (std::int64_t q : a.q) {
    const std::int64_t full = char_sum(q, q);
    std::int64_t s = 0, best = 0, arg = 0;
    for (std::int64_t t = 1; t <= q; ++t) {
      s += jacobi(t, q);
      if (std::llabs(s) > best) {
        best = std::llabs(s);
        arg = t;
      }
    }
    Json r;
    r["q"] = q;
    r["S_q"] = full;
    r["max_abs_S"] = best;
    r["argmax_t"] = arg;
    bool ok = full == 0;
    std::string pv_text;
    if (a.pv) {
      const double ratio = pv_ratio(q);
      r["pv_ratio"] = num(ratio, kComputed);
      ok = ok && ratio < 1.0;
      pv_text = format_double(ratio);
    }
    r["pass"] = ok;
    pass = pass && ok;
    o.doc["results"].push_back(r);
    o.csv_rows.push_back({std::to_string(q), std::to_string(full), std::to_string(best),
                          std::to_string(arg), pv_text});
  }
  o.doc["pass"] = pass;
  return o;
}

// ---- output --------------------------------------------------------------

void flatten(const Json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    if (j.contains("value") && j.contains("provenance")) {
      os << prefix << " = " << (j["value"].is_null() ? j.value("text", "null") : j["value"].dump())
         << " [" << j["provenance"].get<std::string>() << "]\n";
      return;
    }
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& v : j) flatten(v, prefix + "[" + std::to_string(i++) + "]", os);
  } else {
    os << prefix << " = " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char ch : s) r += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return r + "\"";
}

std::string render(const Output& o, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << o.doc.dump(2) << "\n";
  } else if (format == "csv") {
    if (o.csv_header.empty())
      throw UsageError("csv output is only available for table, mfunc and charsum");
    for (std::size_t i = 0; i < o.csv_header.size(); ++i) os << (i ? "," : "") << o.csv_header[i];
    os << "\n";
    for (const auto& row : o.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
      os << "\n";
    }
  } else {
    flatten(o.doc, "", os);
  }
  return os.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explicit prime-number and mean-value verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  GlobalOptions g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Write the report to this file instead of stdout");
  app.add_option("--safety-margin", g.safety_margin, "Relative near-miss tolerance eta")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Evaluation threads")->check(CLI::Range(1u, 256u))->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for random_pm1 functions")->capture_default_str();
  app.add_option("--sieve-limit", g.sieve_limit, "Largest sieve limit allowed (default 1e9 or XPV_SIEVE_LIMIT)");
  app.fallthrough();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Sweep one registered inequality over a range");
  verify->add_option("--check", va.check, "Check id")->required();
  verify->add_option("--from", va.from, "Range start")->required();
  verify->add_option("--to", va.to, "Range end")->required();
  verify->add_flag("--open-lo", va.open_lo, "Exclude the range start");

  DickmanArgs da;
  auto* dickman = app.add_subcommand("dickman", "Dickman rho table and exponent checks");
  dickman->add_option("--xmax", da.xmax, "Table end")->capture_default_str();
  dickman->add_option("--step", da.step, "Grid step")->capture_default_str();
  dickman->add_option("--exponent-check", da.exponent_checks, "lo,hi,exponent,table|buchstab (repeatable)");

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Constant ledger, case bounds and optimizer");
  constants->add_option("--c0", ca.c0, "C0 fed into the ledger")->capture_default_str();
  constants->add_flag("--optimize", ca.optimize, "Run the C0 grid optimizer");
  constants->add_option("--nu3-trunc", ca.nu3_trunc, "Truncation of the nu3 sum")->capture_default_str();

  TableArgs ta;
  auto* table = app.add_subcommand("table", "Sample epsilon(c1, c) table");
  table->add_option("--c1", ta.c1, "c1 values")->delimiter(',');
  table->add_option("--c", ta.c, "c values")->delimiter(',');
  table->add_flag("--delta-paper", ta.delta_paper, "Use the published delta values");

  MfuncArgs ma;
  auto* mfunc = app.add_subcommand("mfunc", "Mean values of completely multiplicative functions");
  mfunc->add_option("--kind", ma.kinds, "Function spec (repeatable)")->required();
  mfunc->add_option("--x", ma.x, "x values")->delimiter(',')->required();
  mfunc->add_option("--c", ma.c, "Threshold c for the transfer check")->capture_default_str();
  mfunc->add_option("--c0", ma.c0, "C0 for the ledger")->capture_default_str();

  CharsumArgs cs;
  auto* charsum = app.add_subcommand("charsum", "Quadratic character sums");
  charsum->add_option("--q", cs.q, "Odd moduli")->delimiter(',')->required();
  charsum->add_flag("--pv-ratio", cs.pv, "Report max |S| / (sqrt q log q)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    Output o;
    if (*verify) o = cmd_verify(va, g);
    else if (*dickman) o = cmd_dickman(da, g);
    else if (*constants) o = cmd_constants(ca, g);
    else if (*table) o = cmd_table(ta, g);
    else if (*mfunc) o = cmd_mfunc(ma, g);
    else o = cmd_charsum(cs, g);
    const std::string text = render(o, g.format);
    if (g.out.empty()) {
      out << text;
    } else {
      std::ofstream f(g.out, std::ios::binary);
      if (!f) throw ResourceError("cannot open output file " + g.out);
      f << text;
    }
    return o.doc["pass"].get<bool>() ? 0 : 1;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("xpv");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace xpv
