#pragma once

// Command-line front end: configuration ingestion, dispatch and report
// emission. run_cli() is the whole program; tools/infobound.cpp only forwards
// argv.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "infobound/bounds.hpp"
#include "infobound/cgf.hpp"
#include "infobound/common.hpp"
#include "infobound/harness.hpp"
#include "infobound/posterior.hpp"

namespace infobound::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitCertificationFailed = 1;
inline constexpr int kExitUsage = 2;

inline const char* kCsvHeader = "bound,name,n,beta,delta,kl,value,vacuous,seed";

// ---------------------------------------------------------------------------
// Schema helpers
// ---------------------------------------------------------------------------

inline void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

/// Numbers may be given as JSON numbers or as "inf".
inline double as_number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError(where + ": expected a number");
}

inline double number_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return as_number(obj.at(key), key);
}

inline std::optional<double> optional_number(const json& obj, const std::string& key) {
  if (!obj.contains(key)) return std::nullopt;
  return as_number(obj.at(key), key);
}

inline std::size_t count_or(const json& obj, const std::string& key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const double v = as_number(obj.at(key), key);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw ConfigError(key + ": expected a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, where));
  return out;
}

/// Non-finite doubles are written as strings so records stay valid JSON.
inline json number_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline const std::set<std::string> kTopLevelKeys = {"name",  "bound",      "seed",  "model", "params",
                                                    "sweep", "experiment", "problem", "output"};
inline const std::set<std::string> kParamKeys = {
    "n",     "delta", "beta", "empirical_risk", "kl", "mi", "cmi", "sigma", "c", "alpha",
    "v",     "epsilon", "moment_bound", "delta_function", "lambda", "h", "w_p", "w_q",
    "b",     "m", "delta_prime", "mc_empirical_risk"};
inline const std::set<std::string> kExperimentKeys = {"trials", "algorithm", "prior", "cmi_prior",
                                                      "bound_offset", "threads"};

inline void validate_config(const json& cfg) {
  check_keys(cfg, kTopLevelKeys, "config");
  if (cfg.contains("name") && !cfg["name"].is_string()) throw ConfigError("name: expected a string");
  if (cfg.contains("bound") && !cfg["bound"].is_string()) throw ConfigError("bound: expected a string");
  if (cfg.contains("model")) check_keys(cfg["model"], {"family", "sigma", "c"}, "model");
  if (cfg.contains("params")) check_keys(cfg["params"], kParamKeys, "params");
  if (cfg.contains("sweep"))
    check_keys(cfg["sweep"], {"param", "values", "start", "stop", "count", "scale"}, "sweep");
  if (cfg.contains("experiment")) {
    check_keys(cfg["experiment"], kExperimentKeys, "experiment");
    if (cfg["experiment"].contains("algorithm"))
      check_keys(cfg["experiment"]["algorithm"], {"kind", "beta_alg", "base", "posterior"},
                 "experiment.algorithm");
  }
  if (cfg.contains("problem")) check_keys(cfg["problem"], {"losses", "mu", "n"}, "problem");
  if (cfg.contains("output")) check_keys(cfg["output"], {"path", "unit", "format"}, "output");
}

// ---------------------------------------------------------------------------
// Config -> domain objects
// ---------------------------------------------------------------------------

inline LossModel parse_model(const json& cfg, const LossModel& fallback) {
  if (!cfg.contains("model")) return fallback;
  const auto& m = cfg["model"];
  const std::string family = m.value("family", std::string("bounded_unit"));
  LossModel model;
  if (family == "bernoulli01") {
    model = Bernoulli01{};
  } else if (family == "bounded_unit") {
    model = BoundedUnit{};
  } else if (family == "sub_gaussian") {
    model = SubGaussian{number_or(m, "sigma", 1.0)};
  } else if (family == "sub_gamma") {
    model = SubGamma{number_or(m, "sigma", 1.0), number_or(m, "c", 0.0)};
  } else {
    throw ConfigError("model.family: unknown loss family '" + family + "'");
  }
  validate(model);
  return model;
}

inline json params_of(const json& cfg) { return cfg.contains("params") ? cfg["params"] : json::object(); }

inline BoundRequest parse_request(const json& cfg, const LossModel& model) {
  const json p = params_of(cfg);
  BoundRequest req;
  req.n = count_or(p, "n", 1);
  req.delta = number_or(p, "delta", 1.0);
  req.beta = optional_number(p, "beta");
  req.empirical_risk = number_or(p, "empirical_risk", 0.0);
  req.kl = number_or(p, "kl", 0.0);
  req.model = model;
  return req;
}

inline FiniteProblem parse_problem(const json& cfg) {
  if (!cfg.contains("problem")) return standard_problem();
  const auto& p = cfg["problem"];
  if (!p.contains("losses") || !p["losses"].is_array()) throw ConfigError("problem.losses: required matrix");
  std::vector<std::vector<double>> losses;
  for (const auto& row : p["losses"]) losses.push_back(number_list(row, "problem.losses"));
  const std::size_t nz = losses.empty() ? 0 : losses.front().size();
  DiscreteDist mu = p.contains("mu") ? DiscreteDist(number_list(p["mu"], "problem.mu")) : DiscreteDist::uniform(nz);
  return FiniteProblem(std::move(losses), std::move(mu), count_or(p, "n", 50));
}

inline Algorithm parse_algorithm(const json& exp) {
  if (!exp.contains("algorithm")) return GibbsAlg{5.0, {}};
  const auto& a = exp["algorithm"];
  const std::string kind = a.value("kind", std::string("gibbs"));
  if (kind == "erm") return ErmAlg{};
  if (kind == "gibbs") {
    GibbsAlg g{number_or(a, "beta_alg", 5.0), {}};
    if (!(g.beta_alg >= 0.0)) throw ConfigError("experiment.algorithm.beta_alg must be nonnegative");
    if (a.contains("base")) g.base = number_list(a["base"], "experiment.algorithm.base");
    return g;
  }
  if (kind == "fixed") {
    if (!a.contains("posterior")) throw ConfigError("experiment.algorithm.posterior: required for kind 'fixed'");
    return FixedAlg{number_list(a["posterior"], "experiment.algorithm.posterior")};
  }
  throw ConfigError("experiment.algorithm.kind: unknown algorithm '" + kind + "'");
}

inline LossModel default_model(const FiniteProblem& problem) {
  if (problem.losses_binary()) return Bernoulli01{};
  return BoundedUnit{};
}

// ---------------------------------------------------------------------------
// Bound evaluation
// ---------------------------------------------------------------------------

struct Evaluation {
  BoundResult result;
  std::size_t n = 1;
  double beta = std::nan("");
  double delta = std::nan("");
  double info = 0.0;  // the information-quantity input (kl, mi or cmi), in nats
  std::vector<BoundComponent> extras;  // reported next to the bound, not part of it
};

inline BoundResult scalar_result(const std::string& name, double v, bool unit_range) {
  BoundResult r;
  r.components = {{name, v}};
  r.raw_value = v;
  r.value = v;
  r.vacuous = is_infinite(v) || (unit_range && v > 1.0);
  return r;
}

/// Names accepted by `bound compute` and `bound sweep`.
inline const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names = {
      "zhang",      "zhang-gen",         "zhang-gen-expectation", "xu-raginsky", "subgamma-mi",
      "subgamma-pacbayes", "union-beta", "catoni",   "catoni-linear", "mcallester-linear",
      "pac-bayes-kl", "delta",           "cmi-pac",  "cmi-expectation", "fano",
      "dp-prior",   "dp-prior-gen",      "occam",    "pacbayes-sgd"};
  return names;
}

inline Evaluation evaluate_bound(const std::string& name, const json& cfg) {
  const json p = params_of(cfg);
  const LossModel model = parse_model(cfg, BoundedUnit{});
  const BoundRequest req = parse_request(cfg, model);
  Evaluation ev;
  ev.n = req.n;
  ev.delta = req.delta;
  ev.info = req.kl;
  if (req.beta) ev.beta = *req.beta;
  const bool unit = is_unit_interval(model);

  if (name == "zhang") {
    ev.result = zhang_high_prob(req);
  } else if (name == "zhang-gen") {
    ev.result = zhang_gen_high_prob(req);
  } else if (name == "zhang-gen-expectation") {
    ev.result = scalar_result("value", zhang_gen_expectation(req.kl, req.n, model), unit);
  } else if (name == "xu-raginsky") {
    ev.info = number_or(p, "mi", 0.0);
    ev.result = scalar_result("value", xu_raginsky(ev.info, req.n, number_or(p, "sigma", 0.5)), unit);
  } else if (name == "subgamma-mi") {
    ev.info = number_or(p, "mi", 0.0);
    ev.result = scalar_result(
        "value", subgamma_mi(ev.info, req.n, number_or(p, "sigma", 1.0), number_or(p, "c", 0.0)), false);
  } else if (name == "subgamma-pacbayes") {
    ev.result = subgamma_pacbayes(req);
  } else if (name == "union-beta") {
    ev.result = union_bound_beta(req, number_or(p, "alpha", 2.0), number_or(p, "v", 10.0));
  } else if (name == "catoni") {
    ev.result = catoni_bound(req);
  } else if (name == "catoni-linear") {
    ev.result = catoni_linear(req);
  } else if (name == "mcallester-linear") {
    ev.result = mcallester_linear(req);
  } else if (name == "pac-bayes-kl") {
    ev.result = pac_bayes_kl(req);
  } else if (name == "delta") {
    const std::string fn = p.contains("delta_function") ? p["delta_function"].get<std::string>() : "kl";
    ev.result = delta_bound(req, parse_delta_function(fn), number_or(p, "moment_bound", 0.0));
  } else if (name == "cmi-pac") {
    ev.result = cmi_pac_high_prob(req);
  } else if (name == "cmi-expectation") {
    ev.info = number_or(p, "cmi", req.kl);
    ev.result = scalar_result("value", cmi_expectation(ev.info, req.n), true);
  } else if (name == "fano") {
    ev.info = number_or(p, "cmi", 0.0);
    ev.result = scalar_result("value", fano_identification_lb(ev.info, req.n), false);
  } else if (name == "dp-prior") {
    ev.result = dp_prior_high_prob(req, number_or(p, "epsilon", 0.0));
  } else if (name == "dp-prior-gen") {
    ev.result = dp_prior_gen_bound(req, number_or(p, "epsilon", 0.0));
  } else if (name == "occam") {
    QuadraticModel qm;
    qm.hessian_eigenvalues = p.contains("h") ? number_list(p["h"], "params.h") : std::vector<double>{};
    qm.w_p = p.contains("w_p") ? number_list(p["w_p"], "params.w_p")
                               : std::vector<double>(qm.hessian_eigenvalues.size(), 0.0);
    qm.w_q = p.contains("w_q") ? number_list(p["w_q"], "params.w_q")
                               : std::vector<double>(qm.hessian_eigenvalues.size(), 0.0);
    qm.lambda = number_or(p, "lambda", 1.0);
    qm.n = req.n;
    qm.beta = req.beta.value_or(1.0);
    ev.beta = qm.beta;
    const auto ob = occam_bound(qm, req.delta, req.empirical_risk);
    ev.result = ob.bound;
    ev.extras.push_back({"occam_factor", ob.occam_factor});
    ev.info = ob.kl_exact;
  } else if (name == "pacbayes-sgd") {
    PacBayesSgdParams sp;
    sp.alpha = number_or(p, "alpha", sp.alpha);
    sp.b = count_or(p, "b", sp.b);
    sp.c = number_or(p, "c", sp.c);
    sp.m = count_or(p, "m", sp.m);
    sp.delta = number_or(p, "delta", sp.delta);
    sp.delta_prime = number_or(p, "delta_prime", sp.delta_prime);
    sp.n = req.n;
    sp.beta = req.beta.value_or(sp.beta);
    sp.lambda = number_or(p, "lambda", sp.lambda);
    sp.mc_empirical_risk = number_or(p, "mc_empirical_risk", req.empirical_risk);
    sp.kl = req.kl;
    ev.beta = sp.beta;
    ev.delta = sp.delta;
    ev.result = pacbayes_sgd_objective(sp);
  } else {
    throw ConfigError("unknown bound '" + name + "'");
  }
  if (std::isnan(ev.beta) && ev.result.beta_used > 0.0) ev.beta = ev.result.beta_used;
  return ev;
}

// ---------------------------------------------------------------------------
// Records and emission
// ---------------------------------------------------------------------------

enum class Unit { kNats, kBits };
enum class Format { kCsv, kJsonLines };

inline Unit parse_unit(const std::string& s) {
  if (s == "nats") return Unit::kNats;
  if (s == "bits") return Unit::kBits;
  throw ConfigError("unit must be 'nats' or 'bits'");
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::kCsv;
  if (s == "json-lines") return Format::kJsonLines;
  throw ConfigError("format must be 'csv' or 'json-lines'");
}

inline std::string unit_name(Unit u) { return u == Unit::kNats ? "nats" : "bits"; }

/// Information quantities are held in nats until this point.
inline double to_unit(double nats, Unit u) { return u == Unit::kBits ? nats_to_bits(nats) : nats; }

inline const std::vector<std::string> kExperimentColumns = {
    "trials", "violations", "rate", "clopper_pearson_upper_95", "true_quantity_mean", "certified"};

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return v.dump();
}

inline std::string csv_row(const json& rec, bool with_experiment) {
  std::ostringstream os;
  const char* cols[] = {"bound", "name", "n", "beta", "delta", "kl", "value", "vacuous", "seed"};
  for (std::size_t i = 0; i < 9; ++i) {
    if (i) os << ',';
    os << (rec.contains(cols[i]) ? csv_cell(rec[cols[i]]) : "");
  }
  if (with_experiment)
    for (const auto& c : kExperimentColumns) os << ',' << (rec.contains(c) ? csv_cell(rec[c]) : "");
  return os.str();
}

inline void emit(const std::vector<json>& records, Format fmt, bool experiment_columns, std::ostream& os) {
  if (fmt == Format::kJsonLines) {
    for (const auto& r : records) os << r.dump() << '\n';
    return;
  }
  os << kCsvHeader;
  if (experiment_columns)
    for (const auto& c : kExperimentColumns) os << ',' << c;
  os << '\n';
  for (const auto& r : records) os << csv_row(r, experiment_columns) << '\n';
}

struct Settings {
  json config = json::object();
  std::uint64_t seed = 0;
  Unit unit = Unit::kNats;
  Format format = Format::kCsv;
  std::string out;
};

inline json bound_record(const Evaluation& ev, const std::string& bound, const Settings& s) {
  json rec;
  rec["bound"] = bound;
  rec["name"] = s.config.value("name", bound);
  rec["n"] = ev.n;
  rec["beta"] = number_json(ev.beta);
  rec["delta"] = number_json(ev.delta);
  rec["kl"] = number_json(to_unit(ev.info, s.unit));
  rec["value"] = number_json(ev.result.value);
  rec["vacuous"] = ev.result.vacuous;
  rec["seed"] = s.seed;
  rec["unit"] = unit_name(s.unit);
  rec["raw_value"] = number_json(ev.result.raw_value);
  rec["beta_used"] = number_json(ev.result.beta_used > 0.0 ? ev.result.beta_used : std::nan(""));
  json comps = json::object();
  for (const auto& c : ev.result.components) comps[c.name] = number_json(c.value);
  rec["components"] = comps;
  for (const auto& x : ev.extras) rec[x.name] = number_json(x.value);
  rec["config"] = s.config;
  return rec;
}

inline json experiment_record(const ViolationReport& r, const std::string& bound, std::size_t n, double beta,
                              const Settings& s) {
  json rec;
  rec["bound"] = bound;
  rec["name"] = s.config.value("name", bound);
  rec["n"] = n;
  rec["beta"] = number_json(beta);
  rec["delta"] = number_json(r.delta);
  rec["kl"] = number_json(to_unit(r.kl_mean, s.unit));
  rec["value"] = number_json(r.bound_mean);
  rec["vacuous"] = r.vacuous == r.trials;
  rec["seed"] = s.seed;
  rec["unit"] = unit_name(s.unit);
  rec["trials"] = r.trials;
  rec["violations"] = r.violations;
  rec["rate"] = number_json(r.rate);
  rec["clopper_pearson_upper_95"] = number_json(r.clopper_pearson_upper_95);
  rec["true_quantity_mean"] = number_json(r.true_quantity_mean);
  rec["vacuous_trials"] = r.vacuous;
  rec["certified"] = r.certified;
  rec["config"] = s.config;
  return rec;
}

inline void write_output(const std::vector<json>& records, bool experiment_columns, const Settings& s,
                         std::ostream& out) {
  if (s.out.empty()) {
    emit(records, s.format, experiment_columns, out);
    return;
  }
  std::ofstream f(s.out);
  if (!f) throw ConfigError("cannot open output file '" + s.out + "'");
  emit(records, s.format, experiment_columns, f);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline std::string require_bound(const Settings& s) {
  if (!s.config.contains("bound")) throw ConfigError("no bound given (use --bound or the 'bound' field)");
  return s.config["bound"].get<std::string>();
}

inline int cmd_bound_compute(const Settings& s, std::ostream& out) {
  const std::string bound = require_bound(s);
  const auto ev = evaluate_bound(bound, s.config);
  write_output({bound_record(ev, bound, s)}, false, s, out);
  return kExitOk;
}

inline std::vector<double> sweep_grid(const json& sw) {
  if (sw.contains("values")) return number_list(sw["values"], "sweep.values");
  if (!sw.contains("count")) throw ConfigError("sweep: give 'values' or 'start'/'stop'/'count'");
  const std::size_t count = count_or(sw, "count", 0);
  const double a = number_or(sw, "start", 0.0);
  const double b = number_or(sw, "stop", 0.0);
  const std::string scale = sw.value("scale", std::string("linear"));
  if (scale != "linear" && scale != "log") throw ConfigError("sweep.scale must be 'linear' or 'log'");
  if (scale == "log" && !(a > 0.0 && b > 0.0)) throw ConfigError("sweep: log scale needs positive ends");
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(scale == "log" ? a * std::pow(b / a, t) : a + (b - a) * t);
  }
  return grid;
}

inline int cmd_bound_sweep(const Settings& s, std::ostream& out) {
  const std::string bound = require_bound(s);
  if (!s.config.contains("sweep")) throw ConfigError("bound sweep needs a 'sweep' section");
  const auto& sw = s.config["sweep"];
  const std::string param = sw.value("param", std::string());
  if (param != "beta" && param != "n" && param != "kl" && param != "delta")
    throw ConfigError("sweep.param must be one of beta, n, kl, delta");
  const auto grid = sweep_grid(sw);
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  std::vector<json> records;
  for (double x : grid) {
    json cfg = s.config;
    if (param == "n") {
      if (!(x >= 1.0) || x != std::floor(x)) throw ConfigError("sweep over n needs positive integers");
      cfg["params"]["n"] = static_cast<std::size_t>(x);
    } else {
      cfg["params"][param] = number_json(x);
    }
    records.push_back(bound_record(evaluate_bound(bound, cfg), bound, s));
  }
  write_output(records, false, s, out);
  return kExitOk;
}

inline json experiment_section(const Settings& s) {
  return s.config.contains("experiment") ? s.config["experiment"] : json::object();
}

inline int finish_experiment(const ViolationReport& rep, const std::string& bound, std::size_t n, double beta,
                             const Settings& s, std::ostream& out) {
  write_output({experiment_record(rep, bound, n, beta, s)}, true, s, out);
  return rep.certified ? kExitOk : kExitCertificationFailed;
}

inline int cmd_experiment_run(const Settings& s, std::ostream& out) {
  const std::string bound = s.config.value("bound", std::string("catoni"));
  const json p = params_of(s.config);
  const json e = experiment_section(s);
  TrialConfig tc;
  tc.seed = s.seed;
  tc.trials = count_or(e, "trials", tc.trials);
  tc.problem = parse_problem(s.config);
  tc.algorithm = parse_algorithm(e);
  tc.bound = parse_bound_kind(bound);
  tc.delta = number_or(p, "delta", 0.05);
  tc.beta = number_or(p, "beta", 1.0);
  tc.model = parse_model(s.config, default_model(tc.problem));
  if (e.contains("prior")) tc.prior = number_list(e["prior"], "experiment.prior");
  tc.alpha = number_or(p, "alpha", tc.alpha);
  tc.v = number_or(p, "v", tc.v);
  tc.bound_offset = number_or(e, "bound_offset", 0.0);
  tc.threads = static_cast<unsigned>(count_or(e, "threads", 0));
  const auto rep = run_violation_experiment(tc);
  return finish_experiment(rep, bound, tc.problem.n(), *tc.beta, s, out);
}

inline int cmd_experiment_cmi(const Settings& s, std::ostream& out) {
  const json p = params_of(s.config);
  const json e = experiment_section(s);
  CmiConfig cc;
  cc.seed = s.seed;
  cc.trials = count_or(e, "trials", cc.trials);
  cc.problem = parse_problem(s.config);
  cc.algorithm = parse_algorithm(e);
  cc.delta = number_or(p, "delta", 0.05);
  cc.beta = number_or(p, "beta", cc.beta);
  if (e.contains("cmi_prior")) cc.prior = parse_cmi_prior(e["cmi_prior"].get<std::string>());
  cc.bound_offset = number_or(e, "bound_offset", 0.0);
  cc.threads = static_cast<unsigned>(count_or(e, "threads", 0));
  const auto rep = run_cmi_experiment(cc);
  return finish_experiment(rep, "cmi-pac", cc.problem.n(), cc.beta, s, out);
}

inline int cmd_experiment_dp_prior(const Settings& s, std::ostream& out) {
  const json p = params_of(s.config);
  const json e = experiment_section(s);
  DpPriorConfig dc;
  dc.seed = s.seed;
  dc.trials = count_or(e, "trials", dc.trials);
  dc.problem = parse_problem(s.config);
  dc.algorithm = parse_algorithm(e);
  dc.delta = number_or(p, "delta", 0.05);
  dc.beta = number_or(p, "beta", dc.beta);
  dc.epsilon = number_or(p, "epsilon", dc.epsilon);
  dc.model = parse_model(s.config, default_model(dc.problem));
  dc.bound_offset = number_or(e, "bound_offset", 0.0);
  dc.threads = static_cast<unsigned>(count_or(e, "threads", 0));
  const auto rep = dp_prior_experiment(dc);
  return finish_experiment(rep, "dp-prior", dc.problem.n(), dc.beta, s, out);
}

/// Sort key component: numbers compare numerically, "inf" above all finite
/// values, missing below.
inline double sort_number(const json& rec, const char* key) {
  if (!rec.contains(key)) return -kInf;
  const auto& v = rec[key];
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  return -kInf;
}

/// Reads json-lines records from each file, checks they share one unit and
/// merges them sorted by (bound, n, beta); ties keep input order.
inline int cmd_report(const std::vector<std::string>& inputs, const Settings& s, std::ostream& out) {
  if (inputs.empty()) throw ConfigError("report: no input files");
  std::vector<json> records;
  std::optional<std::string> unit;
  bool any_experiment = false;
  for (const auto& path : inputs) {
    std::ifstream f(path);
    if (!f) throw ConfigError("report: cannot open '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::exception&) {
        throw ConfigError("report: " + path + ":" + std::to_string(lineno) + " is not a JSON record");
      }
      if (!rec.is_object() || !rec.contains("bound") || !rec.contains("unit"))
        throw ConfigError("report: " + path + ":" + std::to_string(lineno) + " lacks 'bound' or 'unit'");
      const auto u = rec["unit"].get<std::string>();
      if (unit && *unit != u) throw ConfigError("report: mixed units (" + *unit + " and " + u + ")");
      unit = u;
      any_experiment = any_experiment || rec.contains("trials");
      records.push_back(std::move(rec));
    }
  }
  std::stable_sort(records.begin(), records.end(), [](const json& a, const json& b) {
    const auto ba = a["bound"].get<std::string>();
    const auto bb = b["bound"].get<std::string>();
    if (ba != bb) return ba < bb;
    const double na = sort_number(a, "n"), nb = sort_number(b, "n");
    if (na != nb) return na < nb;
    return sort_number(a, "beta") < sort_number(b, "beta");
  });
  write_output(records, any_experiment, s, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return cfg;
}

/// Parses a --param value: a number, "inf", or a JSON literal (arrays for
/// vector parameters), falling back to a plain string.
inline json parse_param_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;
  }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"infobound: information-theoretic generalization bounds"};
  app.require_subcommand(1);

  std::string config_path, out_path, unit_text, format_text, bound_name;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::vector<std::string> param_pairs, report_inputs;

  const auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", config_path, "JSON configuration file");
      sub->add_option("--seed", seed, "random seed (u64)");
      sub->add_option("--trials", trials, "number of trials");
      sub->add_option("--bound", bound_name, "bound name");
      sub->add_option("--param", param_pairs, "parameter override key=value")->allow_extra_args(false);
    }
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format_text, "csv or json-lines");
  };

  auto* bound = app.add_subcommand("bound", "evaluate bounds");
  bound->require_subcommand(1);
  auto* compute = bound->add_subcommand("compute", "evaluate one bound");
  auto* sweep = bound->add_subcommand("sweep", "evaluate a bound over a parameter grid");
  auto* experiment = app.add_subcommand("experiment", "certification experiments");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "violation-rate certification");
  auto* cmi = experiment->add_subcommand("cmi", "supersample CMI certification");
  auto* dp = experiment->add_subcommand("dp-prior", "DP-prior certification");
  auto* report = app.add_subcommand("report", "merge json-lines records");
  for (auto* sub : {compute, sweep, run, cmi, dp}) {
    add_common(sub, true);
    sub->add_option("--unit", unit_text, "nats or bits");
  }
  add_common(report, false);
  report->add_option("inputs", report_inputs, "json-lines record files")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Settings s;
    if (!config_path.empty()) s.config = load_config(config_path);
    if (!s.config.is_object()) throw ConfigError("config: expected a JSON object");
    validate_config(s.config);
    if (!bound_name.empty()) s.config["bound"] = bound_name;
    for (const auto& kv : param_pairs) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + kv + "'");
      s.config["params"][kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1));
    }
    if (seed) s.config["seed"] = *seed;
    if (trials) s.config["experiment"]["trials"] = *trials;
    json output = s.config.contains("output") ? s.config["output"] : json::object();
    if (!out_path.empty()) output["path"] = out_path;
    if (!unit_text.empty()) output["unit"] = unit_text;
    if (!format_text.empty()) output["format"] = format_text;
    if (!output.empty()) s.config["output"] = output;
    validate_config(s.config);

    if (s.config.contains("seed")) {
      const auto& v = s.config["seed"];
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError("seed: expected a nonnegative integer");
      s.seed = v.get<std::uint64_t>();
    }
    s.unit = parse_unit(output.value("unit", std::string("nats")));
    s.format = parse_format(output.value("format", std::string("csv")));
    s.out = output.value("path", std::string());

    if (compute->parsed()) return cmd_bound_compute(s, out);
    if (sweep->parsed()) return cmd_bound_sweep(s, out);
    if (run->parsed()) return cmd_experiment_run(s, out);
    if (cmi->parsed()) return cmd_experiment_cmi(s, out);
    if (dp->parsed()) return cmd_experiment_dp_prior(s, out);
    return cmd_report(report_inputs, s, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "error: malformed configuration: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace infobound::cli
