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

#include <catch2/catch.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "haarforge/cli.hpp"

using namespace haarforge;
using nlohmann::json;

TEST_CASE("calibrate-theta command") {
  const auto config = cli::ExperimentConfig::from_json(
      json{{"command", "calibrate-theta"}, {"k", 1}});
  const auto report = cli::run(config);
  CHECK(std::floor(report.results.at("theta").get<double>() * 1000) == 1915.0);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].pass);
  CHECK(report.checks[0].provenance == "paper");
}

TEST_CASE("weingarten command prints exact q = 2 fractions") {
  const auto config = cli::ExperimentConfig::from_json(
      json{{"command", "weingarten"}, {"q", 2}, {"N", 5}});
  const auto report = cli::run(config);
  const auto& values = report.results.at("values");
  REQUIRE(values.size() == 2);
  // Reverse-lexicographic order: (2) then (1,1).
  CHECK(values[0].at("cycle_type").get<std::string>() == "2");
  CHECK(values[0].at("numerator").get<std::string>() == "-1");
  CHECK(values[0].at("denominator").get<std::string>() == "120");
  CHECK(values[1].at("cycle_type").get<std::string>() == "1,1");
  CHECK(values[1].at("numerator").get<std::string>() == "1");
  CHECK(values[1].at("denominator").get<std::string>() == "24");
}

TEST_CASE("semicircle-check command passes its own bounds") {
  const auto config = cli::ExperimentConfig::from_json(
      json{{"command", "semicircle-check"}, {"q", 4}, {"N", 1024}});
  const auto report = cli::run(config);
  CHECK(report.all_pass());
  bool tagged = true;
  for (const auto& c : report.checks)
    if (c.provenance != "paper" && c.provenance != "pilot") tagged = false;
  CHECK(tagged);
}

TEST_CASE("results blocks are byte-identical across runs and workers") {
  const json cfg{{"command", "moments"},
                 {"family", "haar"},
                 {"ensemble", json{{"N", 12}}},
                 {"p_max", 3},
                 {"samples", 40},
                 {"seed", 9}};
  setenv("HAARFORGE_THREADS", "1", 1);
  const auto a = cli::run(cli::ExperimentConfig::from_json(cfg));
  setenv("HAARFORGE_THREADS", "2", 1);
  const auto b = cli::run(cli::ExperimentConfig::from_json(cfg));
  unsetenv("HAARFORGE_THREADS");
  CHECK(a.results.dump() == b.results.dump());
}

TEST_CASE("momentsolve command") {
  const json cfg{{"command", "momentsolve"},
                 {"alpha", json::array({json::array({0.1, 0.05}),
                                        json::array({-0.04, 0.02})})},
                 {"solver_N", 0}};
  const auto report = cli::run(cli::ExperimentConfig::from_json(cfg));
  CHECK(report.results.at("N").get<long>() == 453);
  CHECK(report.results.at("max_residual").get<double>() <= 1e-8);
  CHECK(report.all_pass());
}

TEST_CASE("report round-trips through JSON") {
  const auto config = cli::ExperimentConfig::from_json(
      json{{"command", "calibrate-theta"}, {"k", 2}});
  const auto report = cli::run(config);
  const json serialized = report.to_json();
  CHECK(serialized.at("schema_version").get<std::string>() ==
        cli::kSchemaVersion);
  const auto parsed = cli::roundtrip_parse(serialized);
  CHECK(parsed.results.dump() == report.results.dump());
  CHECK(parsed.checks.size() == report.checks.size());
  CHECK(parsed.command == report.command);
}

TEST_CASE("csv emission flattens per-p rows") {
  const json cfg{{"command", "moments"},
                 {"family", "haar"},
                 {"ensemble", json{{"N", 8}}},
                 {"p_max", 4},
                 {"samples", 20},
                 {"seed", 3}};
  const auto report = cli::run(cli::ExperimentConfig::from_json(cfg));
  const std::string path = "test_cli_tmp.csv";
  cli::emit(report, "csv", path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line == "p,mean_re,mean_im,stderr,reference");
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);
  std::remove(path.c_str());
}

TEST_CASE("invalid configurations raise invalid_config") {
  CHECK_THROWS_AS(cli::ExperimentConfig::from_json(json{{"seed", 2}}),
                  invalid_config);
  CHECK_THROWS_AS(
      cli::run(cli::ExperimentConfig::from_json(json{{"command", "nope"}})),
      invalid_config);
  CHECK_THROWS_AS(cli::run(cli::ExperimentConfig::from_json(
                      json{{"command", "moments"},
                           {"family", "haar"},
                           {"ensemble", json{{"N", 8}}},
                           {"samples", 1}})),
                  invalid_config);
}
