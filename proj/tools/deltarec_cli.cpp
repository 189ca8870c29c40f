// deltarec command-line front end.
//
// Every subcommand builds one JSON document, printed to stdout or written to
// --out. Tabular data goes to --csv and survival documents to --member-out.
// Files are written only after the computation succeeded, so a validation
// error never leaves partial output behind.
//
// Exit status: 0 success, 2 invalid input or mathematically infeasible
// request, 1 internal failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deltarec/constructors.hpp"
#include "deltarec/core.hpp"
#include "deltarec/criteria.hpp"
#include "deltarec/dde.hpp"
#include "deltarec/errors.hpp"
#include "deltarec/io.hpp"
#include "deltarec/lattice.hpp"
#include "deltarec/simulate.hpp"
#include "deltarec/transforms.hpp"

using nlohmann::json;
using namespace deltarec;

namespace {

// ---------------------------------------------------------------- parsing --

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw ValidationError("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty list '" + text + "'");
  return out;
}

/// "lo:hi:step" → lo, lo + step, … ≤ hi.
std::vector<double> parse_range(const std::string& text) {
  std::string spec = text;
  std::replace(spec.begin(), spec.end(), ':', ',');
  const auto parts = parse_list(spec);
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ValidationError("range must be lo:hi:step with step > 0, got '" + text + "'");
  }
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) out.push_back(parts[0] + parts[2] * static_cast<double>(i));
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

/// poly:a0,a1,… | table:path.csv | lattice:v0,…,vδ
InitialFunction parse_phi(const std::string& spec, double delta) {
  if (starts_with(spec, "poly:")) return InitialFunction::polynomial(parse_list(spec.substr(5)), delta);
  if (starts_with(spec, "table:")) {
    const auto t = io::read_csv(spec.substr(6));
    if (std::fabs(t.x.back() - delta) > 1e-12 * std::max(1.0, delta)) {
      throw ValidationError("table initial function ends at x = " + io::format_g10(t.x.back()) +
                            " but delta = " + io::format_g10(delta));
    }
    return InitialFunction::table(t.x, t.G);
  }
  if (starts_with(spec, "lattice:")) return InitialFunction::lattice(parse_list(spec.substr(8)));
  throw ValidationError("initial function must be poly:..., table:file.csv or lattice:..., got '" +
                        spec + "'");
}

unsigned env_unsigned(const char* name, unsigned fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  try {
    const long parsed = std::stol(v);
    if (parsed > 0) return static_cast<unsigned>(parsed);
  } catch (const std::exception&) {
  }
  std::cerr << "deltarec: ignoring invalid " << name << "='" << v << "'\n";
  return fallback;
}

// ----------------------------------------------------------------- output --

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json params_json(const ProblemParams& p) { return {{"c", p.c}, {"delta", p.delta}}; }

json residual_json(const ResidualReport& r) {
  return {{"residual_sup", num(r.sup)}, {"worst_x", num(r.worst_x)},
          {"tolerance", num(r.tolerance)}, {"probes", r.probes}, {"member", r.member}};
}

json verdict_json(const PositivityVerdict& v) {
  return {{"positive", v.positive_on_horizon},
          {"first_nonpositive_t", opt_num(v.first_nonpositive_t)},
          {"machine_zero_reached", v.machine_zero_reached},
          {"scanned_to", num(v.scanned_to)}};
}

/// Pending artifacts, flushed together once the command succeeded.
struct Outputs {
  std::string out_path;
  std::string csv_path;
  std::string member_path;
  json doc;
  std::optional<std::string> csv;
  std::optional<json> member;

  void flush() const {
    if (!csv_path.empty()) {
      if (!csv) throw ValidationError("--csv is not supported by this subcommand");
      io::write_atomic(csv_path, *csv);
    }
    if (!member_path.empty()) {
      if (!member) throw ValidationError("--member-out is not supported by this subcommand");
      io::write_atomic(member_path, member->dump(1) + "\n");
    }
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      io::write_atomic(out_path, text);
    }
  }
};

void attach_survival(Outputs& o, const Survival& s, const ProblemParams& p) {
  o.member = io::survival_to_json(s, p);
  if (!o.csv_path.empty()) o.csv = io::to_csv(io::survival_rows(s, p));
}

/// Member documents are either a survival document or a wrapper with a
/// "member" field (as written by `construct --out`).
io::LoadedMember load_member(const std::string& path, const std::optional<double>& c,
                             const std::optional<double>& delta) {
  json doc;
  try {
    doc = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
  auto loaded = io::survival_from_json(doc.contains("member") ? doc.at("member") : doc);
  if (c) loaded.params.c = *c;
  if (delta) loaded.params.delta = *delta;
  loaded.params.validate();
  return loaded;
}

// --------------------------------------------------------------- commands --

struct Common {
  double c = 0.0;
  double delta = 0.0;
  ProblemParams params() const {
    ProblemParams p{c, delta};
    p.validate();
    return p;
  }
};

json certificate(const Survival& s, const ProblemParams& p) { return residual_json(residual_sup(s, p)); }

void cmd_neg_delta(Outputs& o, const Common& cm, const std::string& gaps, double g0,
                   std::size_t n, double a0, bool use_consistent) {
  const ProblemParams p = cm.params();
  std::vector<double> gap_values;
  if (starts_with(gaps, "uniform:")) {
    const double h = parse_list(gaps.substr(8)).at(0);
    gap_values.assign(n, h);
  } else {
    gap_values = parse_list(gaps);
  }
  std::vector<double> points{a0};
  for (double g : gap_values) points.push_back(points.back() + g);
  const double consistent = consistent_g0(p, points);
  const double used_g0 = use_consistent ? consistent : g0;
  const auto d = construct_neg_delta(p, points, used_g0, n);
  o.doc = {{"construction", "neg-delta"}, {"anchor", "thm:2.2"}, {"params", params_json(p)},
           {"g0", used_g0}, {"consistent_g0", consistent}, {"member", io::survival_to_json(d, p)},
           {"certificate", certificate(d, p)}};
  attach_survival(o, d, p);
}

void cmd_bounded(Outputs& o, const Common& cm, const std::string& pts, double g0) {
  const ProblemParams p = cm.params();
  const auto points = parse_list(pts);
  const auto d = construct_bounded(p, points, g0);
  o.doc = {{"construction", "bounded"}, {"anchor", "thm:3.2"}, {"params", params_json(p)},
           {"member", io::survival_to_json(d, p)},
           {"certificate", residual_json(residual_sup(d, p, points))}};
  attach_survival(o, d, p);
}

json roots_json(const RateRoots& r) {
  json roots = json::array();
  for (double v : r.roots) roots.push_back(v);
  return {{"regime", std::string(to_string(r.regime))}, {"roots", roots}};
}

void cmd_exp_roots(Outputs& o, const Common& cm) {
  const ProblemParams p = cm.params();
  const auto r = solve_exponential_rates(p);
  o.doc = roots_json(r);
  o.doc["family"] = "exponential";
  o.doc["params"] = params_json(p);
  o.doc["threshold"] = continuous_threshold();
  o.doc["anchor"] = "ex:3.1";
  json members = json::array();
  for (double theta : r.roots) {
    members.push_back({{"theta", theta}, {"certificate", certificate(exponential_law(theta), p)}});
  }
  o.doc["members"] = members;
  if (!r.roots.empty()) {
    o.doc["member"] = io::survival_to_json(exponential_law(r.roots.front()), p);
    attach_survival(o, exponential_law(r.roots.front()), p);
  }
}

void cmd_geom_roots(Outputs& o, const Common& cm) {
  const ProblemParams p = cm.params();
  const auto r = solve_geometric_params(p);
  o.doc = roots_json(r);
  o.doc["family"] = "geometric";
  o.doc["params"] = params_json(p);
  o.doc["threshold"] = threshold_lattice(lattice_delta(p));
  o.doc["anchor"] = "ex:3.4";
  json members = json::array();
  for (double q : r.roots) {
    members.push_back({{"p", q}, {"certificate", certificate(geometric_law(q), p)}});
  }
  o.doc["members"] = members;
  if (!r.roots.empty()) {
    o.doc["member"] = io::survival_to_json(geometric_law(r.roots.front()), p);
    attach_survival(o, geometric_law(r.roots.front()), p);
  }
}

void cmd_gamma_mix(Outputs& o, double delta, double alpha, std::size_t resolution,
                   double horizon_delays) {
  const auto g = gamma_exp_mixture(delta, alpha, resolution, horizon_delays);
  o.doc = {{"construction", "gamma-mix"}, {"anchor", "ex:3.2"}, {"params", params_json(g.params)},
           {"alpha", alpha}, {"member", io::survival_to_json(g.law, g.params)},
           {"certificate", certificate(g.law, g.params)},
           {"grid_certificate", certificate(g.grid, g.params)}};
  o.member = io::survival_to_json(g.law, g.params);
  if (!o.csv_path.empty()) o.csv = io::to_csv(io::survival_rows(g.grid, g.params));
}

void cmd_negbin_mix(Outputs& o, double delta, double alpha, std::size_t n) {
  if (delta != std::floor(delta) || delta < 1.0) {
    throw ValidationError("negbin-mix needs a positive integer delta");
  }
  const auto nb = geom_negbin_mixture(static_cast<int>(delta), alpha, n);
  o.doc = {{"construction", "negbin-mix"}, {"anchor", "ex:3.4"}, {"params", params_json(nb.params)},
           {"alpha", alpha}, {"member", io::survival_to_json(nb.law, nb.params)},
           {"certificate", certificate(nb.law, nb.params)},
           {"table_certificate", certificate(nb.table, nb.params)}};
  o.member = io::survival_to_json(nb.law, nb.params);
  if (!o.csv_path.empty()) o.csv = io::to_csv(io::survival_rows(nb.table, nb.params));
}

StepSolverConfig solver_config(double delta, double horizon, std::size_t resolution,
                               double tolerance) {
  StepSolverConfig cfg;
  cfg.points_per_delay = resolution;
  if (horizon < 0.0 || !std::isfinite(horizon)) {
    throw ValidationError("horizon must be a non-negative finite time (0 selects the default)");
  }
  if (horizon > 0.0) {
    cfg.horizon_delays = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(horizon / delta - 1e-9)));
  }
  cfg.positivity_tolerance = tolerance;
  cfg.validate();
  return cfg;
}

void cmd_solve_dde(Outputs& o, const Common& cm, const std::string& phi_spec, double horizon,
                   std::size_t resolution, double tolerance) {
  const ProblemParams p = cm.params();
  const auto phi = parse_phi(phi_spec, p.delta);
  const auto cfg = solver_config(p.delta, horizon, resolution, tolerance);
  const auto sol = solve_steps(p, phi, cfg);
  const auto verdict = positivity_scan(sol, tolerance);
  const auto step = step_identity_residual(sol);
  json doc = {{"params", params_json(p)},
              {"points_per_delay", sol.points_per_delay},
              {"horizon", sol.horizon()},
              {"verdict", verdict_json(verdict)},
              {"positive", verdict.positive_on_horizon},
              {"first_nonpositive_t", opt_num(verdict.first_nonpositive_t)},
              {"step_residual", {{"max_abs", num(step.max_abs)}, {"estimate", num(step.estimate)},
                                 {"worst_t", num(step.worst_t)}, {"within", step.within()}}},
              {"quadrature_error", num(sol.quadrature_error)},
              {"tail_beyond", num(sol.tail_beyond)},
              {"tail_bound", num(sol.tail_bound)}};
  if (verdict.positive_on_horizon) doc["decay_envelope_violation"] = num(decay_envelope_check(sol));
  json at_delays = json::array();
  for (std::size_t i = 0; i < sol.size(); i += sol.points_per_delay) {
    at_delays.push_back({{"t", sol.knot(i)}, {"y", sol.values[i]}});
  }
  doc["values_at_delays"] = at_delays;
  o.doc = std::move(doc);
  attach_survival(o, sol, p);
}

void cmd_solve_lattice(Outputs& o, const Common& cm, const std::string& phi_spec, std::size_t n,
                       double tolerance) {
  const ProblemParams p = cm.params();
  lattice_delta(p);
  const auto phi = InitialFunction::lattice(
      parse_list(starts_with(phi_spec, "lattice:") ? phi_spec.substr(8) : phi_spec));
  const auto sol = solve_steps_lattice(p, phi, n);
  const auto verdict = positivity_scan_lattice(sol, tolerance);
  json values = json::array();
  for (double v : sol.values) values.push_back(v);
  o.doc = {{"params", params_json(p)}, {"n", n}, {"verdict", verdict_json(verdict)},
           {"positive", verdict.positive_on_horizon},
           {"first_nonpositive_t", opt_num(verdict.first_nonpositive_t)},
           {"threshold", threshold_lattice(lattice_delta(p))}, {"values", values}};
  if (verdict.positive_on_horizon && p.c < 1.0) o.doc["decay_bound_violation"] = num(decay_bound_check(sol));
  if (verdict.positive_on_horizon) {
    attach_survival(o, sol.to_survival(), p);
  } else if (!o.csv_path.empty()) {
    io::Table t;
    for (std::size_t i = 0; i < sol.size(); ++i) {
      t.x.push_back(static_cast<double>(i));
      t.G.push_back(sol.values[i]);
    }
    o.csv = io::to_csv(t);
  }
}

json report_json(const CriterionReport& r) {
  json doc = {{"regime", r.lattice ? "lattice" : "continuous"},
              {"a", r.a},
              {"functionals", {{r.lattice ? "S1" : "I1", r.functionals.first},
                               {r.lattice ? "S2" : "I2", r.functionals.second}}},
              {"phi_delta", r.phi_delta},
              {"necessary_bound", r.necessary_bound},
              {"sufficient_bound", opt_num(r.sufficient_bound)},
              {"uniform_bound", opt_num(r.uniform_bound)},
              {"verdict", std::string(to_string(r.verdict))},
              {"anchors", r.lattice ? json{"prop:3.6", "prop:3.7"}
                                    : json{"prop:3.2", "prop:3.3", "cor:3.1"}}};
  if (r.recurrence) {
    doc["recurrence"] = {{"D", r.recurrence->D}, {"lambda1", r.recurrence->lambda1},
                         {"lambda2", r.recurrence->lambda2}};
  }
  return doc;
}

void cmd_check(Outputs& o, const Common& cm, const std::string& regime, const std::string& phi_spec,
               bool resolve, std::size_t resolution, double horizon, double tolerance) {
  const ProblemParams p = cm.params();
  const bool lattice = regime == "lattice";
  const auto phi = parse_phi(lattice && !starts_with(phi_spec, "lattice:") ? "lattice:" + phi_spec
                                                                           : phi_spec,
                             p.delta);
  const auto r = lattice ? check_lattice(phi, p) : check_continuous(phi, p);
  o.doc = report_json(r);
  o.doc["params"] = params_json(p);
  if (resolve && r.verdict == Verdict::inconclusive) {
    PositivityVerdict v;
    if (lattice) {
      const std::size_t n = static_cast<std::size_t>(std::max(30.0, horizon) * p.delta);
      v = positivity_scan_lattice(solve_steps_lattice(p, phi, n));
    } else {
      v = positivity_scan(solve_steps(p, phi, solver_config(p.delta, horizon, resolution, tolerance)),
                          tolerance);
    }
    o.doc["resolution"] = verdict_json(v);
  }
}

void cmd_gap_table(Outputs& o, const std::string& ratios, const std::string& grid) {
  const auto r = parse_list(ratios);
  const auto a = parse_range(grid);
  const auto rows = gap_region_table(r, a);
  json out = json::array();
  std::string csv = "a,r,N,S\n";
  for (const auto& row : rows) {
    out.push_back({row.a, row.r, row.necessary, row.sufficient});
    csv += io::format_g10(row.a) + "," + io::format_g10(row.r) + "," +
           io::format_g10(row.necessary) + "," + io::format_g10(row.sufficient) + "\n";
  }
  o.doc = {{"columns", {"a", "r", "N", "S"}}, {"rows", out}, {"anchor", "fig:1"}};
  o.csv = csv;
}

void cmd_bounds(Outputs& o, const Common& cm, const std::string& phi_spec, std::size_t n,
                std::size_t resolution) {
  const ProblemParams p = cm.params();
  const auto phi = parse_phi(phi_spec, p.delta);
  const auto rows = sandwich_bounds(phi, p, n);
  const auto sol = solve_steps(p, phi, solver_config(p.delta, rows.back().t, resolution, 1e-9));
  json out = json::array();
  std::string csv = "x,lower,y,upper\n";
  for (const auto& row : rows) {
    const double y = eval_survival(sol, row.t);
    out.push_back({{"k", row.k}, {"x", row.t}, {"lower", row.lower}, {"y", y}, {"upper", row.upper}});
    csv += io::format_g10(row.t) + "," + io::format_g10(row.lower) + "," + io::format_g10(y) + "," +
           io::format_g10(row.upper) + "\n";
  }
  o.doc = {{"params", params_json(p)}, {"anchor", "prop:3.5"}, {"rows", out}};
  o.csv = csv;
}

void cmd_transform(Outputs& o, const std::string& member_path, const std::optional<double>& c,
                   const std::optional<double>& delta, const std::string& us,
                   std::size_t n_moments) {
  const auto m = load_member(member_path, c, delta);
  o.doc = {{"params", params_json(m.params)}, {"anchors", {"eq:genfun", "eq:recmom"}}};
  if (!us.empty()) {
    json lap = json::object();
    for (double u : parse_list(us)) lap[io::format_g10(u)] = laplace(m.member, m.params, u);
    o.doc["laplace"] = lap;
  }
  if (n_moments > 0) {
    const auto t = moments(m.member, m.params, n_moments);
    json mu = json::object();
    json cond = json::object();
    for (std::size_t n = 1; n <= t.mu.size(); ++n) {
      mu[std::to_string(n)] = num(t.mu[n - 1]);
      cond[std::to_string(n)] = num(t.condition[n - 1]);
    }
    o.doc["moments"] = mu;
    o.doc["condition"] = cond;
    o.doc["mu1_seed_numeric"] = true;
    o.doc["mu1_identity"] = num(t.origin + t.mu1_identity);
    o.doc["l0_consistency"] = num(t.l0_consistency);
  }
}

void cmd_verify_mc(Outputs& o, const std::string& member_path, const std::optional<double>& c,
                   const std::optional<double>& delta, const MartingaleConfig& cfg,
                   std::size_t probe_bins) {
  const auto m = load_member(member_path, c, delta);
  const auto r = martingale_test(m.member, m.params, cfg);
  json doc = {{"params", params_json(m.params)},
              {"anchor", "lemma:1"},
              {"replicates", r.replicates},
              {"n", r.horizon},
              {"seed", cfg.seed},
              {"pooled_increment", num(r.pooled_increment)},
              {"pooled_se", num(r.pooled_se)},
              {"reference", num(r.reference)},
              {"mean_Z_final", num(r.mean_Z.empty() ? NAN : r.mean_Z.back())},
              {"Z_se_final", num(r.Z_se.empty() ? NAN : r.Z_se.back())},
              {"increment_pass", r.increment_pass},
              {"z_pass", r.z_pass},
              {"stable", r.stable},
              {"pass", r.pass}};
  json mz = json::array();
  for (double v : r.mean_Z) mz.push_back(num(v));
  doc["mean_Z"] = mz;
  if (probe_bins > 0) {
    json bins = json::array();
    for (const auto& b : conditional_residual_probe(m.member, m.params, probe_bins, cfg.replicates,
                                                    cfg.n, cfg.seed)) {
      bins.push_back({{"m_lo", num(b.m_lo)}, {"m_hi", num(b.m_hi)}, {"count", b.count},
                      {"mean_increment", num(b.mean_increment)}, {"se", num(b.se)},
                      {"h_center", num(b.h_center)}, {"h_mean", num(b.h_mean)},
                      {"underpopulated", b.underpopulated}, {"consistent", b.consistent}});
    }
    doc["probe"] = bins;
  }
  o.doc = std::move(doc);
  std::string csv = "n,mean_Z,SE\n";
  for (std::size_t i = 0; i < r.mean_Z.size(); ++i) {
    csv += std::to_string(i + 1) + "," + io::format_g10(r.mean_Z[i]) + "," +
           io::format_g10(r.Z_se[i]) + "\n";
  }
  o.csv = csv;
}

void cmd_residual(Outputs& o, const std::string& member_path, const std::optional<double>& c,
                  const std::optional<double>& delta, const std::string& probes,
                  const std::optional<double>& tolerance) {
  const auto m = load_member(member_path, c, delta);
  const auto pts = probes.empty() ? default_probes(m.member, m.params) : parse_list(probes);
  o.doc = residual_json(residual_sup(m.member, m.params, pts, tolerance));
  o.doc["params"] = params_json(m.params);
}

int fail(int code, const std::string& kind, const std::string& message,
         std::optional<double> witness = std::nullopt) {
  json diag = {{"error", kind}, {"message", message}, {"exit_code", code}};
  if (witness) diag["witness"] = num(*witness);
  if (message.find("thm:3.3") != std::string::npos) diag["anchor"] = "thm:3.3";
  if (message.find("thm:3.4") != std::string::npos) diag["anchor"] = "thm:3.4";
  std::cout << diag.dump(2) << "\n";
  std::cerr << "deltarec: " << message << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deltarec: distributions making N_n - c*M_n a martingale"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Outputs out;
  auto add_outputs = [&](CLI::App* sub, bool csv, bool member) {
    sub->add_option("--out", out.out_path, "Write the JSON document here instead of stdout");
    if (csv) sub->add_option("--csv", out.csv_path, "Also write tabular data (CSV) here");
    if (member) sub->add_option("--member-out", out.member_path, "Also write the survival document here");
  };
  auto add_params = [](CLI::App* sub, Common& cm) {
    sub->add_option("--c", cm.c, "Rate c > 0")->required();
    sub->add_option("--delta", cm.delta, "Shift delta != 0")->required();
  };

  // construct
  auto* construct = app.add_subcommand("construct", "Explicit members of P_{c,delta}");
  construct->require_subcommand(1);
  Common nd_cm, b_cm, er_cm, gr_cm;
  std::string nd_gaps, b_points;
  double nd_g0 = 0.5, b_g0 = 0.5, nd_a0 = 0.0;
  std::size_t nd_n = 50;
  bool nd_consistent = false;
  auto* neg = construct->add_subcommand("neg-delta", "Discrete solution for delta < 0");
  add_params(neg, nd_cm);
  neg->add_option("--gaps", nd_gaps, "Gaps a_{n+1}-a_n as a list, or uniform:h")->required();
  neg->add_option("--g0", nd_g0, "G(a_0) in (0,1)");
  neg->add_option("--n", nd_n, "Number of atoms (needs n gaps)");
  neg->add_option("--a0", nd_a0, "First atom");
  neg->add_flag("--consistent-g0", nd_consistent, "Use the G(a_0) for which H(a_0) = 0 as well");
  add_outputs(neg, true, true);
  auto* bounded = construct->add_subcommand("bounded", "Bounded-support solution for delta > 0");
  add_params(bounded, b_cm);
  bounded->add_option("--points", b_points, "Atoms a_0 < ... < a_m")->required();
  bounded->add_option("--g0", b_g0, "G(a_0) in (0,1)");
  add_outputs(bounded, true, true);
  auto* exp_roots = construct->add_subcommand("exp-roots", "Roots of theta*exp(-theta*delta) = c");
  add_params(exp_roots, er_cm);
  add_outputs(exp_roots, true, true);
  auto* geom_roots = construct->add_subcommand("geom-roots", "Roots of p*(1-p)^delta = c");
  add_params(geom_roots, gr_cm);
  add_outputs(geom_roots, true, true);
  double gm_delta = 1.0, gm_alpha = 0.0, gm_horizon = 30.0;
  std::size_t gm_res = 1024;
  auto* gamma = construct->add_subcommand("gamma-mix", "Gamma(2)/Exp mixture at c*delta = 1/e");
  gamma->add_option("--delta", gm_delta, "delta > 0")->required();
  gamma->add_option("--alpha", gm_alpha, "alpha in [0, 1/delta]")->required();
  gamma->add_option("--resolution", gm_res, "Grid points per delay for --csv");
  gamma->add_option("--horizon-delays", gm_horizon, "Tabulation horizon in delays");
  add_outputs(gamma, true, true);
  double nb_delta = 1.0, nb_alpha = 0.0;
  std::size_t nb_n = 200;
  auto* negbin = construct->add_subcommand("negbin-mix", "Geometric/negative-binomial mixture");
  negbin->add_option("--delta", nb_delta, "Integer delta >= 1")->required();
  negbin->add_option("--alpha", nb_alpha, "alpha in [0, 1/delta)")->required();
  negbin->add_option("--n", nb_n, "Table length");
  add_outputs(negbin, true, true);

  const double default_tol = 1e-9;

  // solve-dde
  Common sd_cm;
  std::string sd_phi;
  double sd_horizon = 0.0, sd_tol = default_tol;
  std::size_t sd_res = 1024;
  auto* solve_dde = app.add_subcommand("solve-dde", "Method of steps for y' = -c y(t - delta)");
  add_params(solve_dde, sd_cm);
  solve_dde->add_option("--phi", sd_phi, "poly:a0,a1,... | table:file.csv")->required();
  solve_dde->add_option("--horizon", sd_horizon, "Solve up to this t (default 30 delays)");
  solve_dde->add_option("--resolution", sd_res, "Grid points per delay");
  solve_dde->add_option("--tolerance", sd_tol, "Relative positivity tolerance");
  add_outputs(solve_dde, true, true);

  // solve-lattice
  Common sl_cm;
  std::string sl_phi;
  std::size_t sl_n = 200;
  double sl_tol = 1e-12;
  auto* solve_lat = app.add_subcommand("solve-lattice", "Discrete method of steps on Z+");
  add_params(solve_lat, sl_cm);
  solve_lat->add_option("--phi", sl_phi, "v0,v1,...,v_delta")->required();
  solve_lat->add_option("--n", sl_n, "Last index");
  solve_lat->add_option("--tolerance", sl_tol, "Relative positivity tolerance");
  add_outputs(solve_lat, true, true);

  // check
  Common ck_cm;
  std::string ck_regime = "continuous", ck_phi;
  bool ck_resolve = false;
  std::size_t ck_res = 1024;
  double ck_horizon = 0.0, ck_tol = default_tol;
  auto* check = app.add_subcommand("check", "Positivity criteria for an initial function");
  add_params(check, ck_cm);
  check->add_option("--regime", ck_regime, "continuous | lattice")
      ->check(CLI::IsMember({"continuous", "lattice"}));
  check->add_option("--phi", ck_phi, "poly:... | table:file.csv | lattice:...")->required();
  check->add_flag("--resolve-by-solving", ck_resolve, "Solve when the verdict is inconclusive");
  check->add_option("--resolution", ck_res, "Grid points per delay when solving");
  check->add_option("--horizon", ck_horizon, "Horizon when solving");
  add_outputs(check, false, false);

  // gap-table
  std::string gt_r = "0.55,0.75,0.95", gt_grid = "0:0.17:0.002";
  auto* gap = app.add_subcommand("gap-table", "Necessary and sufficient curves (a, r, N, S)");
  gap->add_option("--r", gt_r, "Ratios I2/I1 in [1/2, 1]");
  gap->add_option("--a-grid", gt_grid, "lo:hi:step");
  add_outputs(gap, true, false);

  // bounds
  Common bd_cm;
  std::string bd_phi;
  std::size_t bd_n = 18, bd_res = 1024;
  auto* bounds = app.add_subcommand("bounds", "Sandwich bounds at multiples of delta");
  add_params(bounds, bd_cm);
  bounds->add_option("--phi", bd_phi, "poly:... | table:file.csv")->required();
  bounds->add_option("--n", bd_n, "Largest n (rows k = 0..n+2)");
  bounds->add_option("--resolution", bd_res, "Grid points per delay for the y column");
  add_outputs(bounds, true, false);

  // member-based commands
  std::string member_path;
  std::optional<double> m_c, m_delta;
  auto add_member = [&](CLI::App* sub) {
    sub->add_option("--member", member_path, "Survival JSON document")->required();
    sub->add_option("--c", m_c, "Override c from the document");
    sub->add_option("--delta", m_delta, "Override delta from the document");
  };
  std::string tr_u;
  std::size_t tr_moments = 0;
  auto* transform = app.add_subcommand("transform", "Laplace transform and moments");
  add_member(transform);
  transform->add_option("--laplace", tr_u, "u1,u2,...");
  transform->add_option("--moments", tr_moments, "Number of moments");
  add_outputs(transform, false, false);

  MartingaleConfig mc;
  mc.threads = env_unsigned("DELTAREC_THREADS", 1);
  mc.seed = env_unsigned("DELTAREC_SEED", 1);
  std::size_t mc_bins = 0;
  auto* verify = app.add_subcommand("verify-mc", "Monte Carlo martingale check");
  add_member(verify);
  verify->add_option("--n", mc.n, "Path length");
  verify->add_option("--replicates", mc.replicates, "Number of paths");
  verify->add_option("--seed", mc.seed, "RNG seed");
  verify->add_option("--threads", mc.threads, "Worker threads (results do not depend on it)");
  verify->add_option("--probe-bins", mc_bins, "Also report the conditional residual probe");
  add_outputs(verify, true, false);

  std::string rs_probes;
  std::optional<double> rs_tol;
  auto* residual = app.add_subcommand("residual", "sup |H| over probe points");
  add_member(residual);
  residual->add_option("--probes", rs_probes, "x1,x2,... (default: representation-specific)");
  residual->add_option("--tolerance", rs_tol, "Membership tolerance");
  add_outputs(residual, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(2, "usage", e.what());
  }

  try {
    if (neg->parsed()) {
      cmd_neg_delta(out, nd_cm, nd_gaps, nd_g0, nd_n, nd_a0, nd_consistent);
    } else if (bounded->parsed()) {
      cmd_bounded(out, b_cm, b_points, b_g0);
    } else if (exp_roots->parsed()) {
      cmd_exp_roots(out, er_cm);
    } else if (geom_roots->parsed()) {
      cmd_geom_roots(out, gr_cm);
    } else if (gamma->parsed()) {
      cmd_gamma_mix(out, gm_delta, gm_alpha, gm_res, gm_horizon);
    } else if (negbin->parsed()) {
      cmd_negbin_mix(out, nb_delta, nb_alpha, nb_n);
    } else if (solve_dde->parsed()) {
      cmd_solve_dde(out, sd_cm, sd_phi, sd_horizon, sd_res, sd_tol);
    } else if (solve_lat->parsed()) {
      cmd_solve_lattice(out, sl_cm, sl_phi, sl_n, sl_tol);
    } else if (check->parsed()) {
      cmd_check(out, ck_cm, ck_regime, ck_phi, ck_resolve, ck_res, ck_horizon, ck_tol);
    } else if (gap->parsed()) {
      cmd_gap_table(out, gt_r, gt_grid);
    } else if (bounds->parsed()) {
      cmd_bounds(out, bd_cm, bd_phi, bd_n, bd_res);
    } else if (transform->parsed()) {
      cmd_transform(out, member_path, m_c, m_delta, tr_u, tr_moments);
    } else if (verify->parsed()) {
      if (mc.threads == 0) mc.threads = std::max(1u, std::thread::hardware_concurrency());
      cmd_verify_mc(out, member_path, m_c, m_delta, mc, mc_bins);
    } else if (residual->parsed()) {
      cmd_residual(out, member_path, m_c, m_delta, rs_probes, rs_tol);
    }
    out.flush();
  } catch (const EmptyProblemError& e) {
    return fail(2, "empty-problem", e.what(), e.witness());
  } catch (const ValidationError& e) {
    return fail(2, "validation", e.what(), e.witness());
  } catch (const OutOfRangeError& e) {
    return fail(2, "out-of-range", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
  return 0;
}
