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

// Batch experiment driver.  Every subcommand assembles one JSON config,
// hands it to cli::run and emits the report.  Exit codes: 0 success,
// 1 invalid configuration, 2 numerical failure (error object on stderr).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "haarforge/cli.hpp"

namespace hf = haarforge;
using nlohmann::json;

namespace {

int run_config(const json& config_json) {
  const auto config = hf::cli::ExperimentConfig::from_json(config_json);
  const auto report = hf::cli::run(config);
  hf::cli::emit(report, config.format, config.output_path);
  return 0;
}

json error_object(const std::string& type, const std::string& message) {
  return json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"haarforge: random-sum unitary ensembles, moment problems and "
               "Weingarten calculus at desk scale"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
  app.add_option("--config", config_path,
                 "JSON config file ('-' reads standard input)");
  app.add_option("--seed", seed, "master 64-bit seed");
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--format", format, "json|csv");

  json cfg;

  auto* theta = app.add_subcommand("calibrate-theta", "k-th zero of J1, halved");
  int theta_k = 1;
  theta->add_option("--k", theta_k, "zero index (1-based)")->required();

  auto* wg = app.add_subcommand("weingarten", "exact Weingarten values");
  int wg_q = 2;
  long wg_n = 8;
  wg->add_option("--q", wg_q, "symmetric group order")->required();
  wg->add_option("--N", wg_n, "dimension")->required();

  auto* sc = app.add_subcommand("semicircle-check",
                                "moment bounds of the rounded semicircle diagonal");
  int sc_q = 4;
  long sc_n = 1024;
  sc->add_option("--q", sc_q, "moment order")->required();
  sc->add_option("--N", sc_n, "dimension")->required();

  auto* mom = app.add_subcommand("moments", "Monte-Carlo trace moments");
  std::string mom_family = "haar";
  int mom_n = 64, mom_m = 1, mom_q = 1, mom_tk = 0, mom_len = 0, mom_pmax = 4;
  long mom_samples = 100;
  std::string mom_basis = "haar";
  mom->add_option("--family", mom_family, "haar|exp-gue|w2|circuit");
  mom->add_option("--N", mom_n, "dimension");
  mom->add_option("--m", mom_m, "summands");
  mom->add_option("--q", mom_q, "diagonal moment order");
  mom->add_option("--theta-k", mom_tk, "calibrated theta index");
  mom->add_option("--circuit-length", mom_len, "gates per circuit");
  mom->add_option("--basis", mom_basis, "haar|circuit|hashed-circuit");
  mom->add_option("--p-max", mom_pmax, "highest moment");
  mom->add_option("--samples", mom_samples, "sample count");

  auto* w2s = app.add_subcommand("w2-suite", "W2 small-moment checks");
  int w2_n = 64, w2_m = 16, w2_q = 3, w2_tk = 1, w2_len = 0, w2_pmax = 8;
  long w2_samples = 50;
  std::string w2_basis = "haar";
  w2s->add_option("--N", w2_n, "dimension");
  w2s->add_option("--m", w2_m, "summands");
  w2s->add_option("--q", w2_q, "diagonal moment order");
  w2s->add_option("--theta-k", w2_tk, "calibrated theta index");
  w2s->add_option("--circuit-length", w2_len, "gates per circuit");
  w2s->add_option("--basis", w2_basis, "haar|circuit|hashed-circuit");
  w2s->add_option("--p-max", w2_pmax, "highest moment");
  w2s->add_option("--samples", w2_samples, "sample count");

  auto* fp = app.add_subcommand("framepot", "frame potential vs Haar");
  std::string fp_family = "w2";
  int fp_n = 16, fp_m = 16, fp_q = 3, fp_tk = 1, fp_len = 0, fp_t = 2;
  long fp_pairs = 2000;
  std::string fp_basis = "haar";
  fp->add_option("--family", fp_family, "haar|exp-gue|w2|circuit");
  fp->add_option("--N", fp_n, "dimension");
  fp->add_option("--m", fp_m, "summands");
  fp->add_option("--q", fp_q, "diagonal moment order");
  fp->add_option("--theta-k", fp_tk, "calibrated theta index");
  fp->add_option("--circuit-length", fp_len, "gates per circuit");
  fp->add_option("--basis", fp_basis, "haar|circuit|hashed-circuit");
  fp->add_option("--T", fp_t, "design order");
  fp->add_option("--pairs", fp_pairs, "independent pair count");

  auto* ms = app.add_subcommand("momentsolve", "unitary moment problem");
  std::vector<double> ms_alpha;
  long ms_n = 0;
  bool ms_angles = false;
  ms->add_option("--alpha", ms_alpha,
                 "target moments, flat re im pairs (re1 im1 re2 im2 ...)")
      ->required();
  ms->add_option("--N", ms_n, "angle count (0 = threshold)");
  ms->add_flag("--angles", ms_angles, "include angles in the report");

  auto* conc = app.add_subcommand("concentration", "trace concentration tails");
  std::string conc_kind = "exp";
  int conc_n = 128, conc_tk = 1, conc_p = 3;
  long conc_samples = 2000;
  conc->add_option("--kind", conc_kind, "exp|product");
  conc->add_option("--N", conc_n, "dimension");
  conc->add_option("--theta-k", conc_tk, "calibrated theta index");
  conc->add_option("--p", conc_p, "power for the product ensemble");
  conc->add_option("--samples", conc_samples, "sample count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      json j;
      if (config_path == "-") {
        std::cin >> j;
      } else {
        std::ifstream in(config_path);
        if (!in) throw hf::invalid_config("cannot open config " + config_path);
        in >> j;
      }
      if (!j.contains("seed")) j["seed"] = seed;
      if (!out_path.empty()) j["out"] = out_path;
      if (!j.contains("format")) j["format"] = format;
      return run_config(j);
    }

    cfg["seed"] = seed;
    cfg["out"] = out_path;
    cfg["format"] = format;
    if (theta->parsed()) {
      cfg["command"] = "calibrate-theta";
      cfg["k"] = theta_k;
    } else if (wg->parsed()) {
      cfg["command"] = "weingarten";
      cfg["q"] = wg_q;
      cfg["N"] = wg_n;
    } else if (sc->parsed()) {
      cfg["command"] = "semicircle-check";
      cfg["q"] = sc_q;
      cfg["N"] = sc_n;
    } else if (mom->parsed()) {
      cfg["command"] = "moments";
      cfg["family"] = mom_family;
      cfg["ensemble"] = json{{"N", mom_n},        {"m", mom_m},
                             {"q", mom_q},        {"theta_k", mom_tk},
                             {"basis", mom_basis}, {"circuit_length", mom_len}};
      cfg["p_max"] = mom_pmax;
      cfg["samples"] = mom_samples;
    } else if (w2s->parsed()) {
      cfg["command"] = "w2-suite";
      cfg["ensemble"] = json{{"N", w2_n},        {"m", w2_m},
                             {"q", w2_q},        {"theta_k", w2_tk},
                             {"basis", w2_basis}, {"circuit_length", w2_len}};
      cfg["p_max"] = w2_pmax;
      cfg["samples"] = w2_samples;
    } else if (fp->parsed()) {
      cfg["command"] = "framepot";
      cfg["family"] = fp_family;
      cfg["ensemble"] = json{{"N", fp_n},        {"m", fp_m},
                             {"q", fp_q},        {"theta_k", fp_tk},
                             {"basis", fp_basis}, {"circuit_length", fp_len}};
      cfg["T"] = fp_t;
      cfg["pair_samples"] = fp_pairs;
    } else if (ms->parsed()) {
      if (ms_alpha.size() % 2 != 0)
        throw hf::invalid_config("momentsolve: --alpha needs re/im pairs");
      json alpha = json::array();
      for (std::size_t i = 0; i + 1 < ms_alpha.size(); i += 2)
        alpha.push_back(json::array({ms_alpha[i], ms_alpha[i + 1]}));
      cfg["command"] = "momentsolve";
      cfg["alpha"] = alpha;
      cfg["solver_N"] = ms_n;
      cfg["include_angles"] = ms_angles;
    } else if (conc->parsed()) {
      cfg["command"] = "concentration";
      cfg["kind"] = conc_kind;
      cfg["N"] = conc_n;
      cfg["theta_k"] = conc_tk;
      cfg["p"] = conc_p;
      cfg["samples"] = conc_samples;
    } else {
      std::cerr << app.help() << std::endl;
      return 1;
    }
    return run_config(cfg);
  } catch (const hf::invalid_config& e) {
    std::cerr << error_object("invalid-config", e.what()).dump() << std::endl;
    return 1;
  } catch (const hf::invalid_dimension& e) {
    std::cerr << error_object("invalid-config", e.what()).dump() << std::endl;
    return 1;
  } catch (const json::exception& e) {
    std::cerr << error_object("invalid-config", e.what()).dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_object("numerical-failure", e.what()).dump() << std::endl;
    return 2;
  }
}
