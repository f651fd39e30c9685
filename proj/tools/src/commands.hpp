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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pacguard/io/config.hpp"

namespace pacguard::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<std::size_t> threads;
  bool strict_delta = false;
};

/// Collects output files and the run manifest under one root directory.
class OutputTree {
 public:
  OutputTree(std::filesystem::path root, std::string command, const RunConfig& cfg);

  void write(const std::string& relative, const std::string& content);
  void set_seeds(const std::map<std::string, std::uint64_t>& seeds);
  void add_note(const std::string& key, const std::string& value);
  /// Rewrites manifest.json with the current inventory.
  void write_manifest(const std::string& status);

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::string command_;
  std::string config_json_;
  std::uint64_t seed_;
  std::size_t threads_;
  std::string started_;
  std::map<std::string, std::uint64_t> seeds_;
  std::map<std::string, std::string> notes_;
  std::vector<std::pair<std::string, std::string>> files_;  // path, content hash
  std::vector<std::uintmax_t> sizes_;
};

/// Applies command-line overrides on top of a loaded configuration.
RunConfig resolve_config(const Options& opts);

int cmd_toy_verify(const RunConfig& cfg, OutputTree& out, std::ostream& log);
int cmd_pipeline(const RunConfig& cfg, OutputTree& out, std::ostream& log);
int cmd_sweep_lambda(const RunConfig& cfg, OutputTree& out, std::ostream& log);
int cmd_conformal_compare(const RunConfig& cfg, OutputTree& out, std::ostream& log);

/// Runs one subcommand end to end; returns the process exit code.
int run(const Options& opts, std::ostream& log);

/// Argument parsing plus run(); never throws.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace pacguard::cli
