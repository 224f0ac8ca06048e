#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vcalg/covariates.hpp"
#include "vcalg/io.hpp"
#include "vcalg/oneway_reml.hpp"
#include "vcalg/twoway.hpp"

namespace vcalg::cli {

using io::ordered_json;

enum ExitCode : int { ok = 0, internal_error = 1, input_error = 2, model_error = 3, degenerate = 4 };

/// Float approximation plus a rigorous error bound; exact rationals are
/// reported as "p/q" strings alongside the float.
inline ordered_json number(const RationalInterval& iv) {
  ordered_json j;
  double v = iv.approx();
  j["value"] = v;
  if (iv.exact()) {
    j["exact"] = to_string(iv.lo);
  } else {
    j["error"] = error_bound(iv, v);
  }
  return j;
}

inline ordered_json number(const RealEnclosure& e) {
  ordered_json j;
  double v = e.approx();
  j["value"] = v;
  j["error"] = error_bound(e, v);
  return j;
}

inline ordered_json coefficients(const UniPoly& p) {
  ordered_json a = ordered_json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_string(c));
  return a;
}

inline ordered_json root_json(const RootInterval& r) {
  return {{"lo", to_string(r.lo)}, {"hi", to_string(r.hi)}, {"approx", r.approx()}};
}

inline ordered_json estimates_json(const Estimates& e, bool covariates) {
  ordered_json g;
  g["theta"] = number(e.theta);
  if (covariates) {
    ordered_json b = ordered_json::array();
    for (const auto& x : e.beta) b.push_back(number(x));
    g["beta"] = b;
  } else {
    g["mu"] = number(e.mu());
  }
  g["omega"] = number(e.omega);
  g["tau"] = number(e.tau);
  g["loglik"] = number(e.loglik);
  return g;
}

inline ordered_json report_json(const FitReport& rep, bool covariates) {
  ordered_json j;
  const auto& eq = rep.equation;
  j["equation"] = {{"variable", "theta"},
                   {"coeffs", coefficients(eq.numerator)},
                   {"degree", eq.observed_degree},
                   {"expected_degree", eq.expected_degree},
                   {"expected_is_bound", eq.degree_is_bound},
                   {"sign_changes", rep.sign_changes}};
  ordered_json roots = ordered_json::array();
  for (const auto& sp : rep.stationary_points) {
    ordered_json r = root_json(sp.theta);
    r["class"] = to_string(sp.cls);
    roots.push_back(r);
  }
  j["roots"] = roots;
  ordered_json neg = ordered_json::array();
  for (const auto& r : rep.negative_roots) neg.push_back(root_json(r));
  j["negative_roots"] = neg;
  j["global"] = estimates_json(rep.global, covariates);
  j["boundary_is_max"] = rep.boundary_is_max;
  j["tie"] = rep.tie;
  if (rep.tie) {
    ordered_json t = ordered_json::array();
    for (const auto& e : rep.tied) t.push_back(estimates_json(e, covariates));
    j["tied"] = t;
  }
  j["diagnostics"] = rep.diagnostics;
  return j;
}

inline ordered_json twoway_json(const TwoWayFitReport& rep, bool have_mean) {
  ordered_json j;
  const auto& sys = rep.system;
  j["model"] = to_string(sys.model);
  if (have_mean) j["mu"] = {{"value", to_double(sys.mu_hat)}, {"exact", to_string(sys.mu_hat)}};
  if (sys.omega_hat) j["omega_hat"] = {{"value", to_double(*sys.omega_hat)}, {"exact", to_string(*sys.omega_hat)}};
  const auto& el = rep.elimination;
  if (!el.quartic.is_zero()) {
    j["quartic"] = {{"variable", sys.vars[0]}, {"coeffs", coefficients(el.quartic)}, {"degree", el.quartic.degree()}};
  }
  auto relation = [&](const TauRelation& t, const char* name) {
    if (!t.valid) return;
    j[std::string(name) + "_relation"] = {{"tau_coeff", to_string(t.tau_coeff)}, {"coeffs", coefficients(t.in_v)}};
  };
  relation(el.tau1, "tau1");
  relation(el.tau2, "tau2");
  ordered_json sols = ordered_json::array();
  for (const auto& s : rep.solutions) {
    ordered_json o;
    o["root"] = root_json(s.v);
    o["omega"] = number(s.omega);
    o["tau1"] = number(s.tau1);
    o["tau2"] = number(s.tau2);
    if (s.tau12) o["tau12"] = number(*s.tau12);
    o["feasible"] = s.feasible;
    if (!s.feasibility_certain) o["feasibility_certain"] = false;
    if (s.loglik) o["loglik"] = number(*s.loglik);
    sols.push_back(o);
  }
  j["solutions"] = sols;
  if (rep.global) {
    j["global_index"] = *rep.global;
  } else {
    j["global_index"] = nullptr;
  }
  j["boundary"] = rep.boundary;
  j["tie"] = rep.tie;
  j["diagnostics"] = rep.diagnostics;
  return j;
}

inline void emit_poly(std::ostream& out, const UniPoly& p) {
  for (const auto& c : p.coeffs()) out << c.get_num().get_str() << "\n";
}

/// Uniform integer in [lo, hi] from a 64-bit engine, by modular reduction
/// so that output is identical across standard libraries.
inline long draw(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Rational draw_rational(std::mt19937_64& rng) {
  Rational x(draw(rng, -1000000, 1000000), draw(rng, 1, 997));
  x.canonicalize();
  return x;
}

/// Random grouped data with q groups of sizes in [1, max_size], at least one
/// group of size two or more.
inline GroupedData random_grouped(std::mt19937_64& rng, int q, int max_size) {
  GroupedData g;
  bool large = false;
  for (int i = 0; i < q; ++i) {
    int n = static_cast<int>(draw(rng, 1, max_size));
    if (i == q - 1 && !large) n = std::max(n, 2);
    large = large || n >= 2;
    std::vector<Rational> ys;
    for (int k = 0; k < n; ++k) ys.push_back(draw_rational(rng));
    g.groups.push_back(std::move(ys));
  }
  return g;
}

inline ordered_json audit(int q, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int ml_ok = 0, reml_ok = 0;
  ordered_json mismatches = ordered_json::array();
  for (int t = 0; t < trials; ++t) {
    OneWayStats s = summarize(random_grouped(rng, q, 30));
    int ml = ml_equation(s).observed_degree, reml = reml_equation(s).observed_degree;
    int eml = ml_degree(s.M(), s.M2()), ereml = reml_degree(s.M(), s.M2());
    ml_ok += ml == eml;
    reml_ok += reml == ereml;
    if (ml != eml || reml != ereml) {
      mismatches.push_back({{"trial", t}, {"sizes", s.sizes}, {"mults", s.mults}, {"ml", ml}, {"expected_ml", eml},
                            {"reml", reml}, {"expected_reml", ereml}});
    }
  }
  // degree bounds for an intercept plus one covariate
  int designs = 0, ml_viol = 0, reml_viol = 0, max_ml = 0, max_reml = 0;
  ordered_json violations = ordered_json::array();
  for (int t = 0; t < trials; ++t) {
    std::vector<std::vector<Rational>> groups, cov_rows;
    std::vector<std::vector<std::vector<Rational>>> cov;
    for (int i = 0; i < q; ++i) {
      int n = static_cast<int>(draw(rng, 1, 6));
      if (i == q - 1) n = std::max(n, 2);
      std::vector<Rational> ys;
      std::vector<std::vector<Rational>> xs;
      for (int k = 0; k < n; ++k) {
        ys.push_back(draw_rational(rng));
        xs.push_back({draw_rational(rng)});
      }
      groups.push_back(std::move(ys));
      cov.push_back(std::move(xs));
    }
    DesignProblem d = DesignProblem::from_grouped(groups, cov, true);
    try {
      GlsProfile g = gls_profile(d);
      int ml = ml_equation_x(g).observed_degree, reml = reml_equation_x(g).observed_degree;
      ++designs;
      max_ml = std::max(max_ml, ml);
      max_reml = std::max(max_reml, reml);
      bool bad_ml = ml > 3 * q - 3, bad_reml = reml > 2 * q - 3;
      ml_viol += bad_ml;
      reml_viol += bad_reml;
      if (bad_ml || bad_reml) {
        violations.push_back({{"trial", t}, {"group_sizes", d.group_sizes}, {"ml", ml}, {"reml", reml}});
      }
    } catch (const Error&) {
      // rank-deficient draw; skipped
    }
  }
  ordered_json j;
  j["q"] = q;
  j["trials"] = trials;
  j["seed"] = seed;
  j["ml_matches"] = ml_ok;
  j["reml_matches"] = reml_ok;
  j["mismatches"] = mismatches;
  j["covariate_bound"] = {{"designs", designs},
                     {"ml_bound", 3 * q - 3},
                     {"reml_bound", 2 * q - 3},
                     {"max_ml_degree", max_ml},
                     {"max_reml_degree", max_reml},
                     {"ml_bound_violations", ml_viol},
                     {"reml_bound_violations", reml_viol},
                     {"violations", violations}};
  return j;
}

inline std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) throw InputError("bad size '" + item + "'");
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw InputError("bad size '" + item + "'");
    }
  }
  return out;
}

inline int write_error(std::ostream& out, const char* kind, const std::string& message, int code) {
  ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  out << j.dump(2) << "\n";
  return code;
}

/// Parses argv-style arguments (without the program name), runs the command
/// and writes the JSON report to `out`. Returns the process exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Exact ML and REML critical equations for random-effects ANOVA models", "vcalg"};
  app.require_subcommand(1);

  std::string method = "both", csv, stats, width_text = "1e-12", model = "additive", sizes_text;
  bool emit = false, intercept = false;
  int q = 5, trials = 100;
  std::uint64_t seed = 7;

  auto* oneway = app.add_subcommand("fit-oneway", "fit a one-way layout, optionally with covariates");
  oneway->add_option("--method", method, "ML, REML or both")->check(CLI::IsMember({"ML", "REML", "both"}));
  oneway->add_option("--csv", csv, "long CSV: group,value or group,y,x1,...");
  oneway->add_option("--stats", stats, "sufficient statistics JSON");
  oneway->add_option("--refine-width", width_text, "width of the certified root intervals");
  oneway->add_flag("--emit-poly", emit, "print the numerator coefficients, lowest degree first");
  oneway->add_flag("--intercept", intercept, "prepend an all-ones column to the design");

  auto* twoway = app.add_subcommand("fit-twoway", "fit a balanced two-way layout");
  twoway->add_option("--model", model, "additive or interaction")->check(CLI::IsMember({"additive", "interaction"}));
  twoway->add_option("--csv", csv, "long CSV: row,col,rep,value");
  twoway->add_option("--stats", stats, "JSON {r,q,n,SSA,SSB,SSAB,SSE}");
  twoway->add_option("--refine-width", width_text, "width of the certified root intervals");
  twoway->add_flag("--emit-poly", emit, "print the eliminant coefficients, lowest degree first");

  auto* degree = app.add_subcommand("degree", "ML and REML degrees for a list of group sizes");
  degree->add_option("--sizes", sizes_text, "comma-separated group sizes")->required();

  auto* aud = app.add_subcommand("audit", "randomised check of the degree formulas");
  aud->add_option("--q", q, "number of groups")->check(CLI::Range(2, 60));
  aud->add_option("--trials", trials, "number of random instances")->check(CLI::Range(1, 100000));
  aud->add_option("--seed", seed, "random seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    return write_error(out, "input", e.what(), input_error);
  }

  try {
    if (degree->parsed()) {
      std::vector<int> sizes = parse_sizes(sizes_text);
      MultiplicityProfile p = multiplicity_profile(sizes);
      ordered_json j;
      j["ml"] = ml_degree(p.M, p.M2);
      j["reml"] = reml_degree(p.M, p.M2);
      out << j.dump() << "\n";
      return ok;
    }
    if (aud->parsed()) {
      ordered_json j = audit(q, trials, seed);
      out << j.dump(2) << "\n";
      return j["mismatches"].empty() ? ok : degenerate;
    }

    Rational width = parse_rational(width_text);
    if (width <= 0) throw InputError("--refine-width must be positive");
    if (csv.empty() == stats.empty()) throw InputError("give exactly one of --csv and --stats");

    if (twoway->parsed()) {
      TwoWayStats s;
      bool have_mean = true;
      if (!csv.empty()) {
        s = twoway_stats(io::parse_twoway_csv(io::read_file(csv)));
      } else {
        io::json j = io::parse_json(io::read_file(stats));
        auto integer = [&](const char* k) {
          const auto& v = io::require(j, k);
          if (!v.is_number_integer()) throw InputError(std::string("field '") + k + "' must be an integer");
          return v.get<int>();
        };
        s.r = integer("r");
        s.q = integer("q");
        s.n = integer("n");
        s.SSA = io::rational_from_json(io::require(j, "SSA"), "SSA");
        s.SSB = io::rational_from_json(io::require(j, "SSB"), "SSB");
        s.SSAB = io::rational_from_json(io::require(j, "SSAB"), "SSAB");
        s.SSE = io::rational_from_json(io::require(j, "SSE"), "SSE");
        have_mean = j.contains("mean");
        if (have_mean) s.grand_mean = io::rational_from_json(j["mean"], "mean");
      }
      TwoWayModel m = model == "additive" ? TwoWayModel::additive : TwoWayModel::interaction;
      TwoWayFitReport rep = fit_twoway(s, m, width);
      if (emit) {
        emit_poly(out, rep.elimination.quartic);
      } else {
        out << twoway_json(rep, have_mean).dump(2) << "\n";
      }
      return rep.tie || rep.elimination.degenerate || rep.system.degenerate ? degenerate : ok;
    }

    std::vector<Method> methods;
    if (method != "REML") methods.push_back(Method::ML);
    if (method != "ML") methods.push_back(Method::REML);

    std::vector<FitReport> reports;
    bool covariates = false;
    if (!stats.empty()) {
      OneWayStats s = io::oneway_stats_from_json(io::parse_json(io::read_file(stats)));
      for (Method m : methods) reports.push_back(m == Method::ML ? ml_fit(s, width) : reml_fit(s, width));
    } else {
      io::LongFormat lf = io::parse_long_csv(io::read_file(csv));
      covariates = !lf.covariate_names.empty() || intercept;
      if (covariates) {
        DesignProblem d = DesignProblem::from_grouped(lf.values, lf.covariates, intercept);
        for (Method m : methods) reports.push_back(fit_x(d, m, width));
      } else {
        OneWayStats s = summarize(GroupedData{lf.values});
        for (Method m : methods) reports.push_back(m == Method::ML ? ml_fit(s, width) : reml_fit(s, width));
      }
    }
    bool tie = false;
    if (emit) {
      for (std::size_t k = 0; k < reports.size(); ++k) {
        if (k > 0) out << "\n";
        emit_poly(out, reports[k].equation.numerator);
      }
    } else {
      ordered_json j;
      for (const auto& r : reports) j[to_string(r.equation.method)] = report_json(r, covariates);
      out << j.dump(2) << "\n";
    }
    for (const auto& r : reports) tie = tie || r.tie;
    return tie ? degenerate : ok;
  } catch (const InputError& e) {
    return write_error(out, "input", e.what(), input_error);
  } catch (const ModelAssumptionError& e) {
    return write_error(out, "model_assumption", e.what(), model_error);
  } catch (const DegenerateDataError& e) {
    return write_error(out, "degenerate_data", e.what(), degenerate);
  } catch (const std::exception& e) {
    return write_error(out, "internal", e.what(), internal_error);
  }
}

}  // namespace vcalg::cli
