#pragma once

// Command implementations for the sphint executable. Every command maps
// an `inputs` JSON object to an `outputs` JSON object; the flag parser
// only builds `inputs`, so a report can be replayed from its own inputs.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sphint/sphint.hpp"

namespace sphint::cli {

enum ExitCode { kOk = 0, kInvalid = 2, kNoConvergence = 3 };

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest(const Json& inputs) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(inputs.dump())));
  return buf;
}

inline std::string fmt17(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(detail::parse_double(item, what));
  return out;
}

struct Grid {
  double lo = 0.0, hi = 0.0;
  long n = 0;
  std::vector<double> points() const {
    std::vector<double> p;
    for (long i = 0; i <= n; ++i) p.push_back(i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
    return p;
  }
};

/// "lo:hi:n", n >= 1 intervals, n + 1 points with both endpoints.
inline Grid parse_grid(const std::string& s) {
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos) throw DomainError("grid must look like lo:hi:n");
  Grid g;
  g.lo = detail::parse_double(s.substr(0, a), "grid lo");
  g.hi = detail::parse_double(s.substr(a + 1, b - a - 1), "grid hi");
  const double n = detail::parse_double(s.substr(b + 1), "grid n");
  if (!(n >= 1.0) || n != std::floor(n) || n > 1e7) throw DomainError("grid n must be a positive integer");
  if (!(g.hi >= g.lo)) throw DomainError("grid needs lo <= hi");
  g.n = static_cast<long>(n);
  return g;
}

inline Grid grid_from_json(const Json& j) {
  Grid g;
  g.lo = number_from_json(detail::require(j, "lo", "grid"), "grid lo");
  g.hi = number_from_json(detail::require(j, "hi", "grid"), "grid hi");
  g.n = detail::require(j, "n", "grid").get<long>();
  if (g.n < 1 || !(g.hi >= g.lo)) throw DomainError("grid: need n >= 1 and lo <= hi");
  return g;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw DomainError(path + ": invalid JSON: " + e.what());
  }
}

/// A measure argument is either a JSON file or an inline name.
inline Json resolve_measure_arg(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return measure_to_json(measure_from_json(read_json_file(arg)));
  return measure_to_json(measure_from_json(Json(arg)));
}

inline int get_beta(const Json& in) {
  const int beta = in.value("beta", 1);
  check_beta(beta);
  return beta;
}

inline double get_num(const Json& in, const char* key) {
  return number_from_json(detail::require(in, key, "inputs"), key);
}

inline double get_num_or(const Json& in, const char* key, double fallback) {
  return in.contains(key) ? number_from_json(in.at(key), key) : fallback;
}

inline std::vector<double> get_list(const Json& in, const char* key) {
  return in.contains(key) ? detail::number_list(in.at(key), key) : std::vector<double>{};
}

// ---------------------------------------------------------------- commands

inline Json cmd_j(const Json& in) {
  const auto mu = measure_from_json(detail::require(in, "measure", "inputs"));
  const int beta = get_beta(in);
  const auto r = j_one(mu, get_num(in, "theta"), get_num(in, "lambda"));
  return {{"J", number_to_json(r.value)},
          {"scaled", number_to_json(0.5 * beta * r.value)},
          {"v_star", number_to_json(r.v_star)},
          {"regime", to_string(r.regime)},
          {"normalization", "J is reported without beta/2; scaled = (beta/2) J"}};
}

inline Json cmd_j_multi(const Json& in) {
  const auto mu = measure_from_json(detail::require(in, "measure", "inputs"));
  const int beta = get_beta(in);
  const auto thetas = get_list(in, "thetas");
  const auto lambdas = get_list(in, "lambdas");
  if (thetas.size() != lambdas.size()) throw ShapeError("j-multi: thetas and lambdas differ in length");
  ThetaSpec ts;
  OutlierSpec os;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (thetas[i] < 0.0) {
      ts.bottom.push_back(thetas[i]);
      os.bottom.push_back(lambdas[i]);
    } else {
      ts.top.push_back(thetas[i]);
      os.top.push_back(lambdas[i]);
    }
  }
  const double v = j_multi(mu, ts, os);
  return {{"J", number_to_json(v)},
          {"scaled", number_to_json(0.5 * beta * v)},
          {"normalization", "J is the sum of single-tilt limits without beta/2; scaled = (beta/2) J"}};
}

inline std::string rate_normalization(const std::string& kind) {
  if (kind == "wigner") return "(beta/2) * integral of sqrt(t^2-4) from 2";
  if (kind == "wishart") return "beta/(4(1+alpha)) * integral from lambda+";
  if (kind == "perturbed-wigner") return "per-eigenvalue I_theta without beta; full rate is beta * I_theta";
  if (kind == "perturbed-wishart") return "I_{gamma,alpha} including its beta/(4(1+alpha)) factor";
  throw DomainError("rate: unknown kind \"" + kind + "\"");
}

inline double eval_rate(const Json& in, double x) {
  const auto kind = detail::require(in, "kind", "inputs").get<std::string>();
  const int beta = get_beta(in);
  if (kind == "wigner") return wigner_rate(x, beta);
  if (kind == "wishart") return wishart_rate(x, get_num(in, "alpha"), beta);
  if (kind == "perturbed-wigner") return perturbed_wigner_rate(x, get_num_or(in, "theta", 0.0), beta);
  if (kind == "perturbed-wishart") {
    return perturbed_wishart_rate(x, get_num_or(in, "gamma", 0.0), get_num(in, "alpha"), beta);
  }
  throw DomainError("rate: unknown kind \"" + kind + "\"");
}

inline Json cmd_rate(const Json& in) {
  const auto kind = detail::require(in, "kind", "inputs").get<std::string>();
  Json out{{"normalization", rate_normalization(kind)}};
  if (in.contains("grid")) {
    Json rows = Json::array();
    for (double x : grid_from_json(in.at("grid")).points()) rows.push_back({x, number_to_json(eval_rate(in, x))});
    out["rows"] = rows;
  } else {
    out["value"] = number_to_json(eval_rate(in, get_num(in, "x")));
  }
  if (kind == "perturbed-wigner") out["argmin"] = perturbed_wigner_argmin(get_num_or(in, "theta", 0.0));
  if (kind == "perturbed-wishart") {
    out["argmin"] = perturbed_wishart_argmin(get_num_or(in, "gamma", 0.0), get_num(in, "alpha"), get_beta(in));
  }
  return out;
}

inline Json cmd_annealed(const Json& in) {
  const auto kind = detail::require(in, "kind", "inputs").get<std::string>();
  const std::string norm = "value is reported without the beta/2 prefactor";
  if (kind == "wishart") {
    const double alpha = get_num(in, "alpha");
    if (in.contains("grid")) {
      Json rows = Json::array();
      for (double t : grid_from_json(in.at("grid")).points()) {
        rows.push_back({t, annealed_lambda_wishart(t, alpha).value});
      }
      return {{"rows", rows}, {"normalization", norm}};
    }
    const auto r = annealed_lambda_wishart(get_num(in, "theta"), alpha);
    return {{"value", r.value}, {"maximizer", r.maximizer}, {"residual", r.residual}, {"normalization", norm}};
  }
  if (kind == "profile") {
    const auto prof = profile_from_json(detail::require(in, "profile", "inputs"));
    const bool enforce = in.value("enforce_assumption", true);
    const auto r = annealed_lambda_profile(get_num(in, "theta"), prof, enforce);
    return {{"value", r.value},
            {"maximizer", r.maximizer},
            {"kkt_residual", r.kkt_residual},
            {"assumption",
             {{"negative", r.assumption.negative},
              {"semidefinite_boundary", r.assumption.semidefinite_boundary},
              {"eigenvalues", r.assumption.eigenvalues}}},
            {"normalization", norm}};
  }
  throw DomainError("annealed: unknown kind \"" + kind + "\"");
}

inline Json cmd_interval_cost(const Json& in) {
  const auto& spec = detail::require(in, "spec", "inputs");
  const auto kind = detail::require(spec, "kind", "spec").get<std::string>();
  double edge = 2.0;
  if (kind == "wishart" || kind == "perturbed-wishart") {
    edge = detail::MpGeometry(get_num(spec, "alpha")).lplus;
  } else if (kind != "wigner" && kind != "perturbed-wigner") {
    throw DomainError("interval-cost: unknown rate kind \"" + kind + "\"");
  }
  const auto& ij = detail::require(spec, "intervals", "spec");
  const auto& cj = detail::require(spec, "counts", "spec");
  if (!ij.is_array() || !cj.is_array()) throw DomainError("interval-cost: intervals and counts must be arrays");
  std::vector<Interval> intervals;
  for (const auto& iv : ij) {
    const auto ab = detail::number_list(iv, "interval");
    if (ab.size() != 2) throw DomainError("interval-cost: each interval must be [a, b]");
    intervals.push_back({ab[0], ab[1]});
  }
  std::vector<long long> counts;
  for (const auto& c : cj) {
    if (!c.is_number_integer()) throw DomainError("interval-cost: counts must be integers");
    counts.push_back(c.get<long long>());
  }
  const double cost = outlier_interval_cost(intervals, counts, [&](double x) { return eval_rate(spec, x); }, edge);
  return {{"cost", number_to_json(cost)}, {"edge", edge}, {"normalization", rate_normalization(kind)}};
}

struct McModel {
  std::vector<double> spectrum;  // ascending
  SpectralMeasure limit = SpectralMeasure::semicircle();
};

/// Either a DiscreteModel or {"measure": ..., "top": [...], "bottom": [...]}
/// whose bulk is the quantile grid of the measure.
inline McModel build_mc_model(const Json& model, std::size_t n) {
  McModel m;
  if (model.contains("etas")) {
    const auto dm = model_from_json(model);
    if (n != 0 && static_cast<std::int64_t>(n) != dm.total()) {
      throw ShapeError("mc-verify: n differs from the model size");
    }
    for (std::size_t i = 0; i < dm.size(); ++i) {
      for (std::int64_t c = 0; c < dm.mult[i]; ++c) m.spectrum.push_back(dm.etas[i]);
    }
    m.limit = dm.bulk_measure();
    return m;
  }
  m.limit = measure_from_json(detail::require(model, "measure", "model"));
  const auto top = get_list(model, "top");
  const auto bottom = get_list(model, "bottom");
  if (n < top.size() + bottom.size() + 1) throw ShapeError("mc-verify: n too small for the outliers");
  m.spectrum = quantile_bulk(m.limit, n - top.size() - bottom.size());
  m.spectrum.insert(m.spectrum.end(), top.begin(), top.end());
  m.spectrum.insert(m.spectrum.end(), bottom.begin(), bottom.end());
  std::sort(m.spectrum.begin(), m.spectrum.end());
  return m;
}

inline Json cmd_mc_verify(const Json& in) {
  const auto n = in.value("n", std::size_t{0});
  const auto model = build_mc_model(detail::require(in, "model", "inputs"), n);
  MCConfig cfg;
  cfg.samples = in.value("samples", std::size_t{100000});
  cfg.seed = in.value("seed", std::uint64_t{0});
  cfg.beta = get_beta(in);
  cfg.batches = in.value("batches", std::size_t{50});
  const auto proposal = in.value("proposal", std::string("tilted"));
  if (proposal != "tilted" && proposal != "uniform") throw DomainError("mc-verify: proposal must be tilted or uniform");
  cfg.proposal = proposal == "tilted" ? Proposal::Tilted : Proposal::Uniform;
  ThetaSpec ts;
  for (double t : get_list(in, "thetas")) (t < 0.0 ? ts.bottom : ts.top).push_back(t);
  const auto r = mc_spherical_spectrum(model.spectrum, ts, cfg);
  const auto& x = model.spectrum;
  double asym = 0.0;
  for (std::size_t j = 0; j < ts.top.size(); ++j) asym += j_one(model.limit, ts.top[j], x[x.size() - 1 - j]).value;
  for (std::size_t j = 0; j < ts.bottom.size(); ++j) {
    asym += j_one(model.limit, ts.bottom[j], x[ts.bottom.size() - 1 - j]).value;
  }
  asym *= 0.5 * cfg.beta;
  if (in.contains("dump")) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = x[i];
    write_matrix(in.at("dump").get<std::string>(), d);
  }
  return {{"estimate", number_to_json(r.estimate)},
          {"stderr", number_to_json(r.std_error)},
          {"ess", number_to_json(r.ess)},
          {"samples", r.samples},
          {"asymptotic", number_to_json(asym)},
          {"gap", number_to_json(std::abs(r.estimate - asym))},
          {"normalization", "estimate and asymptotic both include beta/2"}};
}

inline Json cmd_measure(const Json& in) {
  const auto mu = measure_from_json(detail::require(in, "measure", "inputs"));
  const auto e = support_edges(mu);
  Json out{{"left", e.left}, {"right", e.right}};
  if (in.contains("z")) out["stieltjes"] = number_to_json(stieltjes(mu, get_num(in, "z")));
  if (in.contains("theta")) out["inverse"] = number_to_json(stieltjes_inverse(mu, get_num(in, "theta")));
  if (in.contains("v")) out["log_potential"] = number_to_json(log_potential(mu, get_num(in, "v")));
  return out;
}

inline MatrixKind matrix_kind(const std::string& s) {
  if (s == "goe") return MatrixKind::Goe;
  if (s == "gue") return MatrixKind::Gue;
  if (s == "wishart") return MatrixKind::Wishart;
  if (s == "rademacher-wigner") return MatrixKind::RademacherWigner;
  if (s == "uniform-wigner") return MatrixKind::UniformWigner;
  if (s == "profile") return MatrixKind::Profile;
  throw DomainError("sample: unknown kind \"" + s + "\"");
}

inline Json cmd_sample(const Json& in) {
  MatrixSpec spec;
  spec.kind = matrix_kind(detail::require(in, "kind", "inputs").get<std::string>());
  spec.beta = get_beta(in);
  spec.alpha = get_num_or(in, "alpha", 1.0);
  if (spec.kind == MatrixKind::Profile) spec.profile = profile_from_json(detail::require(in, "profile", "inputs"));
  const auto n = detail::require(in, "n", "inputs").get<std::size_t>();
  const auto m = sample_matrix(spec, n, in.value("seed", std::uint64_t{0}));
  const auto ev = hermitian_eigenvalues(m);
  Json out{{"n", n}, {"dtype", std::holds_alternative<Eigen::MatrixXcd>(m) ? "complex" : "real"},
           {"eigen_min", ev.front()}, {"eigen_max", ev.back()}};
  if (in.contains("out")) {
    write_matrix(in.at("out").get<std::string>(), m);
    out["path"] = in.at("out");
  }
  return out;
}

inline Json run(const std::string& command, const Json& inputs) {
  if (command == "j") return cmd_j(inputs);
  if (command == "j-multi") return cmd_j_multi(inputs);
  if (command == "rate") return cmd_rate(inputs);
  if (command == "annealed") return cmd_annealed(inputs);
  if (command == "interval-cost") return cmd_interval_cost(inputs);
  if (command == "mc-verify") return cmd_mc_verify(inputs);
  if (command == "measure") return cmd_measure(inputs);
  if (command == "sample") return cmd_sample(inputs);
  throw DomainError("unknown command \"" + command + "\"");
}

inline bool is_stochastic(const std::string& command) { return command == "mc-verify" || command == "sample"; }

// ------------------------------------------------------------ formatting

inline void print_rows(std::ostream& out, const Json& rows, const std::string& format) {
  if (format == "csv") {
    out << "x,value\n";
  } else {
    out << "# x value\n";
  }
  const char sep = format == "csv" ? ',' : ' ';
  for (const auto& r : rows) {
    out << fmt17(number_from_json(r[0], "x")) << sep << fmt17(number_from_json(r[1], "value")) << '\n';
  }
}

inline void print_flat(std::ostream& out, const Json& outputs, const std::string& format) {
  const char sep = format == "csv" ? ',' : ' ';
  out << (format == "csv" ? "key,value\n" : "# key value\n");
  for (const auto& [k, v] : outputs.items()) {
    if (v.is_number()) {
      out << k << sep << fmt17(v.get<double>()) << '\n';
    } else if (v.is_string() && k != "normalization") {
      out << k << sep << v.get<std::string>() << '\n';
    } else if (v.is_boolean()) {
      out << k << sep << (v.get<bool>() ? "true" : "false") << '\n';
    }
  }
}

// ------------------------------------------------------------------ main

inline int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical integrals, extreme-eigenvalue rate functions and Monte-Carlo checks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  std::string format = "json";
  bool timing = false;
  app.add_option("--format", format, "json, csv or dat")->check(CLI::IsMember({"json", "csv", "dat"}));
  app.add_flag("--timing", timing, "add wall time to the report");

  Json in;
  std::string command;
  std::string measure_arg, grid_arg, thetas_arg, lambdas_arg, model_path, profile_path, spec_path, dump_path,
      out_path, report_path, kind, proposal = "tilted";
  double theta = 0, lambda = 0, x = 0, alpha = 0, gamma = 0, z = 0, v = 0;
  int beta = 1;
  std::size_t n = 0, samples = 100000, batches = 50;
  std::uint64_t seed = 0;
  bool no_enforce = false;

  auto beta_opt = [&](CLI::App* s) { s->add_option("--beta", beta, "1 (real) or 2 (complex)")->check(CLI::IsMember({1, 2})); };

  auto* j = app.add_subcommand("j", "limit J(mu, theta, lambda) of a rank-one spherical integral");
  j->add_option("--measure", measure_arg, "JSON file or semicircle | mp:<alpha> | delta:<x>")->required();
  j->add_option("--theta", theta)->required();
  j->add_option("--lambda", lambda)->required();
  beta_opt(j);

  auto* jm = app.add_subcommand("j-multi", "sum of J over several tilts and outliers");
  jm->add_option("--measure", measure_arg)->required();
  jm->add_option("--thetas", thetas_arg, "comma list; negative values tilt the bottom")->required();
  jm->add_option("--lambdas", lambdas_arg, "comma list paired with --thetas")->required();
  beta_opt(jm);

  auto* rate = app.add_subcommand("rate", "rate functions of extreme eigenvalues");
  rate->add_option("kind", kind, "wigner | wishart | perturbed-wigner | perturbed-wishart")
      ->required()
      ->check(CLI::IsMember({"wigner", "wishart", "perturbed-wigner", "perturbed-wishart"}));
  auto* rx = rate->add_option("--x", x);
  auto* rg = rate->add_option("--grid", grid_arg, "lo:hi:n");
  rx->excludes(rg);
  rate->add_option("--theta", theta);
  rate->add_option("--gamma", gamma);
  rate->add_option("--alpha", alpha);
  beta_opt(rate);

  auto* ann = app.add_subcommand("annealed", "annealed spherical integrals");
  ann->add_option("kind", kind, "wishart | profile")->required()->check(CLI::IsMember({"wishart", "profile"}));
  auto* at = ann->add_option("--theta", theta);
  auto* ag = ann->add_option("--grid", grid_arg, "lo:hi:n over theta (wishart)");
  at->excludes(ag);
  ann->add_option("--alpha", alpha);
  ann->add_option("--profile", profile_path, "JSON file {\"R\": [[...]], \"alpha\": [...]}");
  ann->add_flag("--no-enforce", no_enforce, "skip the negativity requirement on R");

  auto* ic = app.add_subcommand("interval-cost", "cost of outlier counts in disjoint intervals");
  ic->add_option("--spec", spec_path, "JSON file")->required();

  auto* mc = app.add_subcommand("mc-verify", "Monte-Carlo spherical integral against its limit");
  mc->add_option("--model", model_path, "JSON file")->required();
  mc->add_option("--thetas", thetas_arg)->required();
  mc->add_option("--n", n);
  mc->add_option("--samples", samples);
  mc->add_option("--seed", seed);
  mc->add_option("--batches", batches);
  mc->add_option("--proposal", proposal)->check(CLI::IsMember({"tilted", "uniform"}));
  mc->add_option("--dump", dump_path, "write the diagonal test matrix");
  beta_opt(mc);

  auto* ms = app.add_subcommand("measure", "support edges, Stieltjes transform and log potential");
  ms->add_option("--measure", measure_arg)->required();
  ms->add_option("--z", z);
  ms->add_option("--theta", theta);
  ms->add_option("--v", v);

  auto* sm = app.add_subcommand("sample", "draw a random matrix");
  sm->add_option("kind", kind)->required()->check(
      CLI::IsMember({"goe", "gue", "wishart", "rademacher-wigner", "uniform-wigner", "profile"}));
  sm->add_option("--n", n)->required();
  sm->add_option("--seed", seed);
  sm->add_option("--alpha", alpha);
  sm->add_option("--profile", profile_path);
  sm->add_option("--out", out_path, "binary dump path");
  beta_opt(sm);

  auto* rp = app.add_subcommand("replay", "re-run a report from its inputs block");
  rp->add_option("--report", report_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  const auto t0 = std::chrono::steady_clock::now();
  Json outputs;
  try {
    auto* sub = app.get_subcommands().front();
    command = sub->get_name();
    auto set = [&](const char* key, const CLI::App* s, const char* flag, auto value) {
      if (s->count(flag) > 0) in[key] = value;
    };
    if (command == "j") {
      in = {{"measure", resolve_measure_arg(measure_arg)}, {"theta", theta}, {"lambda", lambda}, {"beta", beta}};
    } else if (command == "j-multi") {
      in = {{"measure", resolve_measure_arg(measure_arg)},
            {"thetas", parse_list(thetas_arg, "thetas")},
            {"lambdas", parse_list(lambdas_arg, "lambdas")},
            {"beta", beta}};
    } else if (command == "rate") {
      in = {{"kind", kind}, {"beta", beta}};
      if (rate->count("--grid")) {
        const auto g = parse_grid(grid_arg);
        in["grid"] = {{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}};
      } else if (rate->count("--x")) {
        in["x"] = x;
      } else {
        throw DomainError("rate: give --x or --grid");
      }
      set("theta", rate, "--theta", theta);
      set("gamma", rate, "--gamma", gamma);
      set("alpha", rate, "--alpha", alpha);
    } else if (command == "annealed") {
      in = {{"kind", kind}};
      if (ann->count("--grid")) {
        const auto g = parse_grid(grid_arg);
        in["grid"] = {{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}};
      } else if (ann->count("--theta")) {
        in["theta"] = theta;
      } else {
        throw DomainError("annealed: give --theta or --grid");
      }
      set("alpha", ann, "--alpha", alpha);
      if (kind == "profile") {
        if (profile_path.empty()) throw DomainError("annealed profile: --profile is required");
        in["profile"] = profile_to_json(profile_from_json(read_json_file(profile_path)));
        in["enforce_assumption"] = !no_enforce;
      }
    } else if (command == "interval-cost") {
      in = {{"spec", read_json_file(spec_path)}};
    } else if (command == "mc-verify") {
      Json model = read_json_file(model_path);
      if (model.contains("measure")) model["measure"] = measure_to_json(measure_from_json(model["measure"]));
      in = {{"model", model},
            {"thetas", parse_list(thetas_arg, "thetas")},
            {"n", n},
            {"samples", samples},
            {"seed", seed},
            {"batches", batches},
            {"proposal", proposal},
            {"beta", beta}};
      if (!dump_path.empty()) in["dump"] = dump_path;
    } else if (command == "measure") {
      in = {{"measure", resolve_measure_arg(measure_arg)}};
      set("z", ms, "--z", z);
      set("theta", ms, "--theta", theta);
      set("v", ms, "--v", v);
    } else if (command == "sample") {
      in = {{"kind", kind}, {"n", n}, {"seed", seed}, {"beta", beta}};
      set("alpha", sm, "--alpha", alpha);
      if (!profile_path.empty()) in["profile"] = profile_to_json(profile_from_json(read_json_file(profile_path)));
      if (!out_path.empty()) in["out"] = out_path;
    } else if (command == "replay") {
      const Json report = read_json_file(report_path);
      command = detail::require(report, "command", "report").get<std::string>();
      in = detail::require(report, "inputs", "report");
    }
    outputs = run(command, in);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    // domain, shape and assumption failures, bad files and bad JSON
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  err << "wall time: " << wall << " s\n";

  if (format != "json" && outputs.contains("rows")) {
    print_rows(out, outputs.at("rows"), format);
    return kOk;
  }
  if (format != "json") {
    print_flat(out, outputs, format);
    return kOk;
  }
  Json report{{"command", command},
              {"inputs", in},
              {"inputs_digest", digest(in)},
              {"outputs", outputs},
              {"version", kVersion}};
  if (is_stochastic(command)) report["seed"] = in.value("seed", std::uint64_t{0});
  if (timing) report["wall_time_s"] = wall;
  out << report.dump(2) << '\n';
  return kOk;
}

}  // namespace sphint::cli
