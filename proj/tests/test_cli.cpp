// Copyright 2026 The pacguard Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "pacguard/io/config.hpp"

namespace pacguard {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("pacguard_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr,
            std::string* log_text = nullptr) {
  args.insert(args.begin(), "pacguard");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, log;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, log);
  if (out_text) *out_text = out.str();
  if (log_text) *log_text = log.str();
  return code;
}

// --- configuration ------------------------------------------------------------------

TEST(Config, DefaultsRoundTrip) {
  const auto text = run_config_to_json(default_run_config());
  EXPECT_EQ(run_config_to_json(parse_run_config(text)), text);
}

TEST(Config, UnknownKeyNamesField) {
  try {
    parse_run_config(R"({"pipeline": {"n_bound": 10, "nbound": 3}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "pipeline.nbound");
  }
}

TEST(Config, TypeMismatchNamesField) {
  try {
    parse_run_config(R"({"budget": {"delta": "small"}})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "budget.delta");
  }
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_run_config("{\n  \"seed\": 1,\n  \"threads\": ,\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(Config, ValidationErrorsBecomeConfigErrors) {
  EXPECT_THROW(parse_run_config(R"({"budget": {"delta": 1.5}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"prior_training": {"k": -1}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"env": {"kind": "grasp"}})"), ConfigError);
}

TEST(Config, NavDefaultsFollowSensor) {
  const auto cfg = parse_run_config(R"({"env": {"kind": "nav", "nav": {"sensor": {"rays": 16}}},
                                        "pipeline": {"history": 2}})");
  EXPECT_EQ(cfg.pipeline.source.kind, EnvSource::Kind::kNav);
  EXPECT_EQ(cfg.pipeline.architecture.input_dim(), 32u);
  EXPECT_EQ(cfg.pipeline.architecture.activation, Activation::kRelu);
}

TEST(Config, PartialOverrideKeepsOtherDefaults) {
  const auto cfg = parse_run_config(R"({"seed": 9, "posterior_training": {"epochs": 3}})");
  const auto def = default_run_config();
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.pipeline.posterior_training.epochs, 3);
  EXPECT_EQ(cfg.pipeline.posterior_training.gamma, def.pipeline.posterior_training.gamma);
  EXPECT_EQ(cfg.pipeline.n_bound, def.pipeline.n_bound);
}

TEST(Config, HashIsStable) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

// --- command line -----------------------------------------------------------------

TEST(Cli, PrintDefaultsIsParseable) {
  std::string out;
  EXPECT_EQ(run_cli({"--print-defaults"}, &out), cli::kExitOk);
  EXPECT_NO_THROW(parse_run_config(out));
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}), cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run_cli({"pipeline", "--threads", "0"}), cli::kExitUsage);
  EXPECT_EQ(run_cli({"pipeline", "--seed", "abc"}), cli::kExitUsage);
  EXPECT_EQ(run_cli({"pipeline", "--config", "/nonexistent/pacguard.json"}), cli::kExitUsage);
}

TEST(Cli, MalformedConfigExitsTwoWithDiagnostic) {
  const auto dir = scratch("malformed");
  const auto cfg = write_file(dir, "bad.json", "{\n \"toy_verify\": {\"samples\": }\n}");
  std::string log;
  EXPECT_EQ(run_cli({"toy-verify", "--config", cfg.string(), "--out", (dir / "o").string()},
                    nullptr, &log),
            cli::kExitUsage);
  EXPECT_NE(log.find("line 2"), std::string::npos) << log;
}

TEST(Cli, ToyVerifySingleCutoff) {
  const auto dir = scratch("toy_single");
  const auto cfg = write_file(dir, "c.json", R"({"toy_verify": {"c_grid": [0], "samples": 200000}})");
  ASSERT_EQ(run_cli({"toy-verify", "--config", cfg.string(), "--out", (dir / "o").string()}),
            cli::kExitOk);
  std::istringstream csv(slurp(dir / "o" / "tables" / "toy_verify.csv"));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_FALSE(std::getline(csv, extra));
  EXPECT_EQ(row.substr(0, row.find(',', 2)), "0,0.25");
  EXPECT_TRUE(fs::exists(dir / "o" / "plots" / "toy_roc.svg"));
}

TEST(Cli, ToyVerifyFailsOnImpossibleTolerance) {
  const auto dir = scratch("toy_strict");
  const auto cfg = write_file(dir, "c.json", R"({"toy_verify": {"samples": 20000, "z_max": 0.0}})");
  EXPECT_EQ(run_cli({"toy-verify", "--config", cfg.string(), "--out", (dir / "o").string()}),
            cli::kExitCheckFailed);
}

const char* kSmallPipeline = R"({
  "pipeline": {"n_prior": 300, "n_bound": 300, "n_heldout": 1000},
  "posterior_training": {"epochs": 5},
  "sweep": {"omegas": [0.5, 2.0]},
  "conformal": {"draws": 200, "pac_resamples": 2}
})";

TEST(Cli, PipelineWritesOutputTreeAndManifest) {
  const auto dir = scratch("pipeline");
  const auto cfg = write_file(dir, "c.json", kSmallPipeline);
  const auto out = dir / "o";
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", out.string()}),
            cli::kExitOk);
  for (const char* f : {"certificates/misclassification.json", "certificates/fnr.json",
                        "certificates/fpr.json", "checkpoints/prior.json",
                        "checkpoints/posterior.json", "tables/evaluation.csv",
                        "tables/counts.csv", "tables/training_trace.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["command"], "pipeline");
  EXPECT_EQ(manifest["status"], "ok");
  EXPECT_EQ(manifest["master_seed"], 0);
  EXPECT_TRUE(manifest["partition_seeds"].contains("bound_data"));
  std::set<std::string> listed;
  for (const auto& f : manifest["files"]) listed.insert(f["path"].get<std::string>());
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), out).generic_string();
    if (rel != "manifest.json") EXPECT_TRUE(listed.count(rel)) << rel;
  }
}

std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> m;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root).generic_string();
    if (rel.rfind("certificates/", 0) == 0 || e.path().extension() == ".csv") {
      m[rel] = slurp(e.path());
    }
  }
  return m;
}

TEST(Cli, ResultsIndependentOfThreadCount) {
  const auto dir = scratch("threads");
  const auto cfg = write_file(dir, "c.json", kSmallPipeline);
  ASSERT_EQ(run_cli({"sweep-lambda", "--config", cfg.string(), "--out", (dir / "a").string(),
                     "--threads", "1"}),
            cli::kExitOk);
  ASSERT_EQ(run_cli({"sweep-lambda", "--config", cfg.string(), "--out", (dir / "b").string(),
                     "--threads", "3"}),
            cli::kExitOk);
  const auto a = artifacts(dir / "a");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, artifacts(dir / "b"));
}

TEST(Cli, SeedOverrideChangesResults) {
  const auto dir = scratch("seed");
  const auto cfg = write_file(dir, "c.json", kSmallPipeline);
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "a").string()}), 0);
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "b").string(),
                     "--seed", "7"}),
            0);
  EXPECT_NE(slurp(dir / "a" / "certificates" / "misclassification.json"),
            slurp(dir / "b" / "certificates" / "misclassification.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
  EXPECT_EQ(manifest["master_seed"], 7);
}

TEST(Cli, StrictDeltaFlagReachesCertificates) {
  const auto dir = scratch("strict");
  const auto cfg = write_file(dir, "c.json", kSmallPipeline);
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", (dir / "o").string(),
                     "--strict-delta"}),
            0);
  const auto j = nlohmann::json::parse(slurp(dir / "o" / "certificates" / "fnr.json"));
  if (j["format"] == "pacguard.certificate") {
    EXPECT_EQ(j["inputs"]["delta_mode"], "strict_split");
  } else {
    EXPECT_EQ(j["format"], "pacguard.refusal");
  }
}

TEST(Cli, ConformalCompareWritesTables) {
  const auto dir = scratch("conformal");
  const auto cfg = write_file(dir, "c.json", kSmallPipeline);
  const auto out = dir / "o";
  ASSERT_EQ(run_cli({"conformal-compare", "--config", cfg.string(), "--out", out.string()}),
            cli::kExitOk);
  EXPECT_TRUE(fs::exists(out / "tables" / "conformal_coverage.csv"));
  EXPECT_TRUE(fs::exists(out / "tables" / "comparison.csv"));
  EXPECT_TRUE(fs::exists(out / "tables" / "pacbayes_resamples.csv"));
  EXPECT_TRUE(fs::exists(out / "tables" / "conformal_summary.json"));
}

TEST(Cli, NavPipelineProducesFailureRateTable) {
  const auto dir = scratch("nav");
  const auto cfg = write_file(dir, "c.json", R"({
    "env": {"kind": "nav"},
    "pipeline": {"n_prior": 150, "n_bound": 150, "n_heldout": 200, "heldout_m": 5},
    "prior_training": {"epochs": 3}, "posterior_training": {"epochs": 2},
    "budget": {"M": 10}
  })");
  const auto out = dir / "o";
  ASSERT_EQ(run_cli({"pipeline", "--config", cfg.string(), "--out", out.string()}),
            cli::kExitOk);
  const auto eval = slurp(out / "tables" / "evaluation.csv");
  EXPECT_NE(eval.find("failure_rate,"), std::string::npos);
  EXPECT_NE(eval.find("misclassification_bound,"), std::string::npos);
  EXPECT_NE(eval.find("true_expected_misclassification,"), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "tables" / "sample_rollout.csv"));
  EXPECT_TRUE(fs::exists(out / "checkpoints" / "sample_environment.json"));
}

}  // namespace
}  // namespace pacguard
