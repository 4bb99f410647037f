/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "haarforge/constants.hpp"
#include "haarforge/ensembles.hpp"
#include "haarforge/matrixcore.hpp"
#include "haarforge/momentproblem.hpp"
#include "haarforge/ratmarkov.hpp"
#include "haarforge/statlab.hpp"
#include "haarforge/weingarten.hpp"

namespace haarforge::cli {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "haarforge-report-v1";
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Which distribution a sampling command draws from.
enum class Family { haar, exp_gue, w2, circuit };

inline Family family_from_string(const std::string& s) {
  if (s == "haar") return Family::haar;
  if (s == "exp-gue") return Family::exp_gue;
  if (s == "w2") return Family::w2;
  if (s == "circuit") return Family::circuit;
  throw invalid_config("unknown ensemble family: " + s);
}

inline ensembles::BasisKind basis_from_string(const std::string& s) {
  if (s == "haar") return ensembles::BasisKind::haar;
  if (s == "circuit") return ensembles::BasisKind::circuit;
  if (s == "hashed-circuit") return ensembles::BasisKind::hashed_circuit;
  throw invalid_config("unknown basis kind: " + s);
}

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::string output_path;    // empty = stdout
  std::string format = "json";

  // Sampling commands.
  Family family = Family::haar;
  ensembles::EnsembleSpec ensemble;
  int theta_k = 0;            // when > 0, resolves ensemble.theta
  long samples = 0;
  int p_max = 1;
  int t_design = 1;           // T for framepot
  long pair_samples = 0;

  // weingarten / semicircle-check.
  int q = 2;
  long dim_n = 8;

  // momentsolve.
  std::vector<std::complex<double>> alpha;
  long solver_n = 0;
  bool include_angles = false;

  // concentration.
  std::string conc_kind = "exp";  // exp | product
  int conc_p = 3;
  std::vector<double> t_grid;

  // calibrate-theta.
  int k = 1;

  static ExperimentConfig from_json(const json& j);
  json to_json() const;
};

inline ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  if (!j.contains("command")) throw invalid_config("config: missing command");
  c.command = j.at("command").get<std::string>();
  c.seed = j.value("seed", std::uint64_t{1});
  c.output_path = j.value("out", std::string{});
  c.format = j.value("format", std::string{"json"});
  if (c.format != "json" && c.format != "csv")
    throw invalid_config("config: format must be json or csv");
  if (j.contains("family")) c.family = family_from_string(j.at("family").get<std::string>());
  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    c.ensemble.dim = e.value("N", 0);
    if (e.contains("n_qubits")) c.ensemble.dim = 1 << e.at("n_qubits").get<int>();
    c.ensemble.m = e.value("m", 1);
    c.ensemble.q = e.value("q", 1);
    c.ensemble.theta = e.value("theta", 0.0);
    c.theta_k = e.value("theta_k", 0);
    if (e.contains("basis"))
      c.ensemble.basis_kind = basis_from_string(e.at("basis").get<std::string>());
    c.ensemble.circuit_length = e.value("circuit_length", 0);
    c.ensemble.seed = c.seed;
    if (c.theta_k > 0) c.ensemble.theta = ratmarkov::calibrate_theta(c.theta_k);
  }
  c.theta_k = j.value("theta_k", c.theta_k);
  c.samples = j.value("samples", 0L);
  c.p_max = j.value("p_max", 1);
  c.t_design = j.value("T", 1);
  c.pair_samples = j.value("pair_samples", 0L);
  c.q = j.value("q", 2);
  c.dim_n = j.value("N", j.contains("ensemble") ? static_cast<long>(c.ensemble.dim) : 8L);
  if (j.contains("alpha")) {
    for (const auto& row : j.at("alpha"))
      c.alpha.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
  }
  c.solver_n = j.value("solver_N", 0L);
  c.include_angles = j.value("include_angles", false);
  c.conc_kind = j.value("kind", std::string{"exp"});
  c.conc_p = j.value("p", 3);
  if (j.contains("t_grid"))
    c.t_grid = j.at("t_grid").get<std::vector<double>>();
  c.k = j.value("k", 1);
  return c;
}

inline json ExperimentConfig::to_json() const {
  json e{{"N", ensemble.dim},       {"m", ensemble.m},
         {"q", ensemble.q},         {"theta", ensemble.theta},
         {"theta_k", theta_k},      {"circuit_length", ensemble.circuit_length}};
  switch (ensemble.basis_kind) {
    case ensembles::BasisKind::haar: e["basis"] = "haar"; break;
    case ensembles::BasisKind::circuit: e["basis"] = "circuit"; break;
    case ensembles::BasisKind::hashed_circuit: e["basis"] = "hashed-circuit"; break;
  }
  json out{{"command", command}, {"seed", seed}, {"format", format}};
  out["ensemble"] = e;
  out["samples"] = samples;
  out["p_max"] = p_max;
  out["T"] = t_design;
  out["pair_samples"] = pair_samples;
  out["q"] = q;
  out["N"] = dim_n;
  out["k"] = k;
  return out;
}

/// One pass/fail flag.  Every threshold names its provenance: "paper" for
/// bounds taken from the published analysis, "pilot" for values frozen from
/// pilot runs.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison = "<=";
  std::string provenance;  // paper | pilot
  bool pass = false;

  json to_json() const {
    return json{{"name", name},           {"value", value},
                {"threshold", threshold}, {"comparison", comparison},
                {"provenance", provenance}, {"pass", pass}};
  }
};

struct ExperimentReport {
  std::string command;
  json config;
  json results;
  std::vector<CheckRow> checks;
  double wall_seconds = 0.0;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  json to_json() const {
    json ch = json::array();
    for (const auto& c : checks) ch.push_back(c.to_json());
    return json{{"schema_version", kSchemaVersion},
                {"artifact_version", kArtifactVersion},
                {"command", command},
                {"config", config},
                {"results", results},
                {"checks", ch},
                {"wall_seconds", wall_seconds}};
  }
};

namespace detail {

inline CheckRow check_leq(std::string name, double value, double threshold,
                          std::string provenance) {
  CheckRow row;
  row.name = std::move(name);
  row.value = value;
  row.threshold = threshold;
  row.comparison = "<=";
  row.provenance = std::move(provenance);
  row.pass = value <= threshold;
  return row;
}

inline statlab::UnitarySampler make_sampler(const ExperimentConfig& c) {
  const auto spec = c.ensemble;
  switch (c.family) {
    case Family::haar:
      return [spec](std::uint64_t i) {
        rng::Stream s(spec.seed, "cli.haar", i);
        return ensembles::sample_haar(spec.dim, s).mat();
      };
    case Family::exp_gue:
      return [spec](std::uint64_t i) {
        rng::Stream s(spec.seed, "cli.gue", i);
        const auto g = ensembles::sample_gue(spec.dim, s);
        return matrixcore::unitary_exp(g, spec.theta).mat();
      };
    case Family::w2:
      return [spec](std::uint64_t i) { return ensembles::sample_w2(spec, i).mat(); };
    case Family::circuit:
      return [spec](std::uint64_t i) {
        rng::Stream s(spec.seed, "cli.circuitseed", i);
        return ensembles::random_local_circuit(spec.n_qubits(),
                                               spec.circuit_length, s.next_u64())
            .mat();
      };
  }
  throw invalid_config("unknown family");
}

inline json moment_report_json(const statlab::MomentReport& r) {
  json rows = json::array();
  for (int p = 1; p <= r.p_max; ++p) {
    const std::size_t i = static_cast<std::size_t>(p - 1);
    rows.push_back(json{{"p", p},
                        {"mean_re", r.mean_btr[i].real()},
                        {"mean_im", r.mean_btr[i].imag()},
                        {"stderr", r.stderr_btr[i]},
                        {"abs_tr_sq_mean", r.mean_abs_tr_sq[i]},
                        {"abs_tr_sq_stderr", r.stderr_abs_tr_sq[i]},
                        {"haar_reference", r.haar_reference[i]}});
  }
  return json{{"dim", r.dim}, {"samples", r.samples}, {"per_p", rows}};
}

inline ExperimentReport run_calibrate_theta(const ExperimentConfig& c) {
  ExperimentReport rep;
  const double theta = ratmarkov::calibrate_theta(c.k);
  const double j1 = ratmarkov::bessel_j1(2.0 * theta);
  rep.results = json{{"k", c.k}, {"theta", theta}, {"j1_at_2theta", j1}};
  rep.checks.push_back(check_leq("j1_zero_residual", std::abs(j1), 1e-8, "paper"));
  return rep;
}

inline ExperimentReport run_weingarten(const ExperimentConfig& c) {
  ExperimentReport rep;
  json rows = json::array();
  for (const auto& pt : weingarten::partitions(c.q)) {
    const auto wg = weingarten::weingarten(pt, c.dim_n);
    std::string label;
    for (std::size_t i = 0; i < pt.size(); ++i)
      label += (i ? "," : "") + std::to_string(pt[i]);
    rows.push_back(json{{"cycle_type", label},
                        {"numerator", wg.num.str()},
                        {"denominator", wg.den.str()},
                        {"value", wg.to_double()},
                        {"leading", weingarten::weingarten_leading(
                                        pt, static_cast<double>(c.dim_n))}});
  }
  rep.results = json{{"q", c.q}, {"N", c.dim_n}, {"values", rows}};
  return rep;
}

inline ExperimentReport run_semicircle_check(const ExperimentConfig& c) {
  ExperimentReport rep;
  const int q = c.q;
  const long n = c.dim_n;
  const auto d = ensembles::semicircle_diagonal(static_cast<int>(n), q);
  double op_norm = 0.0;
  for (double x : d.values) op_norm = std::max(op_norm, std::abs(x));
  json rows = json::array();
  for (int k = 1; k <= q; ++k) {
    const double target = (k % 2 == 1) ? 0.0
                                       : static_cast<double>(
                                             weingarten::detail::catalan(k / 2));
    const double value = d.normalized_trace_power(k).real();
    const double bound = std::pow(2.0, k) * (2.0 * q + 4.0) / static_cast<double>(n);
    rows.push_back(json{{"k", k}, {"moment", value}, {"target", target}, {"bound", bound}});
    rep.checks.push_back(check_leq("moment_error_k" + std::to_string(k),
                                   std::abs(value - target), bound, "paper"));
  }
  rep.checks.push_back(check_leq("operator_norm", op_norm, 2.0, "paper"));
  rep.results = json{{"N", n}, {"q", q}, {"moments", rows}, {"operator_norm", op_norm}};
  return rep;
}

inline ExperimentReport run_moments(const ExperimentConfig& c) {
  if (c.samples < 2) throw invalid_config("moments: samples must be >= 2");
  ExperimentReport rep;
  auto sampler = make_sampler(c);
  const auto report =
      statlab::mc_trace_moments(sampler, c.ensemble.dim, c.p_max, c.samples);
  rep.results = moment_report_json(report);
  const auto [l1, l1_err] = statlab::moment_l1(report);
  rep.results["moment_l1"] = l1;
  rep.results["moment_l1_stderr"] = l1_err;
  return rep;
}

inline ExperimentReport run_w2_suite(const ExperimentConfig& c) {
  if (c.samples < 2) throw invalid_config("w2-suite: samples must be >= 2");
  ExperimentConfig cc = c;
  cc.family = Family::w2;
  ExperimentReport rep;
  auto sampler = make_sampler(cc);
  const auto report =
      statlab::mc_trace_moments(sampler, c.ensemble.dim, c.p_max, c.samples);
  rep.results = moment_report_json(report);
  for (int p = 1; p <= c.p_max; ++p) {
    const std::size_t i = static_cast<std::size_t>(p - 1);
    rep.checks.push_back(check_leq(
        "abs_mean_btr_p" + std::to_string(p), std::abs(report.mean_btr[i]),
        0.05 + 3.0 * report.stderr_btr[i], "pilot"));
  }
  return rep;
}

inline ExperimentReport run_framepot(const ExperimentConfig& c) {
  const long pairs = c.pair_samples > 0 ? c.pair_samples : 2000;
  ExperimentReport rep;
  auto sampler = make_sampler(c);
  const auto [est, err] =
      statlab::frame_potential(sampler, c.ensemble.dim, c.t_design, pairs);
  ExperimentConfig haar_cfg = c;
  haar_cfg.family = Family::haar;
  auto haar_sampler = make_sampler(haar_cfg);
  const auto [haar_est, haar_err] =
      statlab::frame_potential(haar_sampler, c.ensemble.dim, c.t_design, pairs);
  double t_factorial = 1.0;
  for (int i = 2; i <= c.t_design; ++i) t_factorial *= i;
  rep.results = json{{"T", c.t_design},
                     {"pair_samples", pairs},
                     {"estimate", est},
                     {"stderr", err},
                     {"haar_estimate", haar_est},
                     {"haar_stderr", haar_err},
                     {"haar_exact", t_factorial}};
  return rep;
}

inline ExperimentReport run_momentsolve(const ExperimentConfig& c) {
  if (c.alpha.empty()) throw invalid_config("momentsolve: alpha is required");
  momentproblem::MomentVector mv{c.alpha};
  const int t = mv.order();
  long n = c.solver_n;
  if (n == 0)
    n = static_cast<long>(std::ceil(16.0 * (2.0 * t + 1.0) *
                                    std::pow(static_cast<double>(t), 2.5)));
  const auto angles = momentproblem::unitary_moment_solve(mv, n);
  double worst = 0.0;
  json residuals = json::array();
  for (int k = 1; k <= t; ++k) {
    std::complex<double> s = 0.0;
    for (double a : angles) s += std::polar(1.0, k * a);
    s /= static_cast<double>(n);
    const double err = std::abs(s - mv.alpha[static_cast<std::size_t>(k - 1)]);
    worst = std::max(worst, err);
    residuals.push_back(json{{"k", k},
                             {"target_re", mv.alpha[static_cast<std::size_t>(k - 1)].real()},
                             {"target_im", mv.alpha[static_cast<std::size_t>(k - 1)].imag()},
                             {"solved_re", s.real()},
                             {"solved_im", s.imag()},
                             {"abs_error", err}});
  }
  ExperimentReport rep;
  rep.results = json{{"T", t}, {"N", n}, {"max_residual", worst}, {"per_moment", residuals}};
  if (c.include_angles) rep.results["angles"] = angles;
  rep.checks.push_back(check_leq("moment_residual", worst,
                                 tol::moment_end_to_end, "pilot"));
  return rep;
}

inline ExperimentReport run_concentration(const ExperimentConfig& c) {
  if (c.samples < 2) throw invalid_config("concentration: samples must be >= 2");
  const int n = static_cast<int>(c.dim_n);
  const double theta =
      c.theta_k > 0 ? ratmarkov::calibrate_theta(c.theta_k) : c.ensemble.theta;
  if (theta <= 0) throw invalid_config("concentration: needs theta or theta_k");
  std::vector<double> grid = c.t_grid;
  if (grid.empty())
    for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i);

  const std::uint64_t seed = c.seed;
  statlab::ScalarSampler sampler;
  std::function<double(double)> bound;
  // The calibrated theta makes the expected trace vanish, so |btr| measures
  // the deviation directly.
  if (c.conc_kind == "exp") {
    sampler = [n, theta, seed](std::uint64_t i) {
      rng::Stream s(seed, "cli.conc.exp", i);
      const auto g = ensembles::sample_gue(n, s);
      const auto u = matrixcore::unitary_exp(g, theta);
      return std::abs(u.mat().trace()) / static_cast<double>(n);
    };
    bound = [n, theta](double t) {
      return std::exp(-static_cast<double>(n) * t * t / (2.0 * theta * theta));
    };
  } else if (c.conc_kind == "product") {
    const int p = c.conc_p;
    sampler = [n, theta, seed, p](std::uint64_t i) {
      rng::Stream s1(seed, "cli.conc.prod.a", i);
      rng::Stream s2(seed, "cli.conc.prod.b", i);
      const auto g1 = ensembles::sample_gue(n, s1);
      const auto g2 = ensembles::sample_gue(n, s2);
      const Eigen::MatrixXcd w = matrixcore::unitary_exp(g1, theta).mat() *
                                 matrixcore::unitary_exp(g2, theta).mat();
      Eigen::MatrixXcd power = w;
      for (int k = 1; k < p; ++k) power = power * w;
      return std::abs(power.trace()) / static_cast<double>(n);
    };
    bound = [n, theta, p](double t) {
      return std::exp(-static_cast<double>(n) * t * t /
                      (4.0 * p * p * theta * theta));
    };
  } else {
    throw invalid_config("concentration: kind must be exp or product");
  }

  const auto rows = statlab::concentration_tail(sampler, bound, grid, c.samples);
  json out_rows = json::array();
  int flagged = 0;
  for (const auto& r : rows) {
    out_rows.push_back(json{{"t", r.t},
                            {"empirical", r.empirical},
                            {"wilson_low", r.wilson_low},
                            {"wilson_high", r.wilson_high},
                            {"bound", r.bound},
                            {"flagged", r.flagged}});
    if (r.flagged) ++flagged;
  }
  ExperimentReport rep;
  rep.results = json{{"N", n},        {"theta", theta}, {"kind", c.conc_kind},
                     {"samples", c.samples}, {"rows", out_rows}};
  rep.checks.push_back(
      check_leq("flagged_grid_points", static_cast<double>(flagged), 0.0, "paper"));
  return rep;
}

}  // namespace detail

/// Runs one experiment.  Deterministic for fixed (config, seed): the results
/// block is byte-identical across runs and worker counts.
inline ExperimentReport run(const ExperimentConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (c.command == "calibrate-theta")
    rep = detail::run_calibrate_theta(c);
  else if (c.command == "weingarten")
    rep = detail::run_weingarten(c);
  else if (c.command == "semicircle-check")
    rep = detail::run_semicircle_check(c);
  else if (c.command == "moments")
    rep = detail::run_moments(c);
  else if (c.command == "w2-suite")
    rep = detail::run_w2_suite(c);
  else if (c.command == "framepot")
    rep = detail::run_framepot(c);
  else if (c.command == "momentsolve")
    rep = detail::run_momentsolve(c);
  else if (c.command == "concentration")
    rep = detail::run_concentration(c);
  else
    throw invalid_config("unknown command: " + c.command);
  rep.command = c.command;
  rep.config = c.to_json();
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return rep;
}

namespace detail {

inline std::string to_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  const json& r = rep.results;
  if (r.contains("per_p")) {
    out << "p,mean_re,mean_im,stderr,reference\n";
    for (const auto& row : r.at("per_p"))
      out << row.at("p").get<int>() << "," << row.at("mean_re").get<double>()
          << "," << row.at("mean_im").get<double>() << ","
          << row.at("stderr").get<double>() << ","
          << row.at("haar_reference").get<double>() << "\n";
  } else if (r.contains("rows")) {
    out << "t,empirical,wilson_low,wilson_high,bound,flagged\n";
    for (const auto& row : r.at("rows"))
      out << row.at("t").get<double>() << "," << row.at("empirical").get<double>()
          << "," << row.at("wilson_low").get<double>() << ","
          << row.at("wilson_high").get<double>() << ","
          << row.at("bound").get<double>() << "," << row.at("flagged").get<bool>()
          << "\n";
  } else if (r.contains("values")) {
    out << "cycle_type,numerator,denominator\n";
    for (const auto& row : r.at("values"))
      out << "\"" << row.at("cycle_type").get<std::string>() << "\","
          << row.at("numerator").get<std::string>() << ","
          << row.at("denominator").get<std::string>() << "\n";
  } else {
    out << "key,value\n";
    for (auto it = r.begin(); it != r.end(); ++it)
      if (it->is_number())
        out << it.key() << "," << it->get<double>() << "\n";
  }
  return out.str();
}

}  // namespace detail

/// Writes the report as schema-versioned JSON or flattened CSV.
inline void emit(const ExperimentReport& rep, const std::string& format,
                 const std::string& path) {
  std::string payload;
  if (format == "json")
    payload = rep.to_json().dump(2) + "\n";
  else if (format == "csv")
    payload = detail::to_csv(rep);
  else
    throw invalid_config("emit: format must be json or csv");
  if (path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(path);
  if (!out) throw numerical_failure("emit: cannot open output path " + path);
  out << payload;
  if (!out.good()) throw numerical_failure("emit: write failed for " + path);
}

inline ExperimentReport roundtrip_parse(const json& j) {
  ExperimentReport rep;
  rep.command = j.at("command").get<std::string>();
  rep.config = j.at("config");
  rep.results = j.at("results");
  for (const auto& c : j.at("checks")) {
    CheckRow row;
    row.name = c.at("name").get<std::string>();
    row.value = c.at("value").get<double>();
    row.threshold = c.at("threshold").get<double>();
    row.comparison = c.at("comparison").get<std::string>();
    row.provenance = c.at("provenance").get<std::string>();
    row.pass = c.at("pass").get<bool>();
    rep.checks.push_back(row);
  }
  rep.wall_seconds = j.at("wall_seconds").get<double>();
  return rep;
}

}  // namespace haarforge::cli
