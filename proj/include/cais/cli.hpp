#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "cais/campaign.hpp"
#include "cais/explain.hpp"

namespace cais::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitDomain = 1,  ///< validation failure, out-of-domain value, digest mismatch
  kExitIo = 2,      ///< unreadable input, unwritable output, malformed config
  kExitEmpty = 3,   ///< campaign performed no evaluations
};

/// Campaign settings read from a key-value config file. Model and scenario
/// paths are resolved against the config file's directory; the output
/// directory is taken as written.
struct CampaignConfig {
  std::string model;     ///< as written in the file
  std::string scenario;  ///< empty: use the situation's scenario reference
  std::filesystem::path base_dir;
  std::string situation;  ///< empty: the model's first situation
  std::string event;      ///< empty: the situation's first exposed event
  falsify::SearchConfig search;
  falsify::SeedPolicy seeds;
  std::string out = "out";
  double threshold = 0.2;
  explain::TreeParams tree;

  std::filesystem::path model_path() const;
  std::filesystem::path scenario_path() const;
};

/// Keys: model, scenario, situation, event, out, search.*, seeds.base,
/// seeds.replicates, explain.threshold, tree.max_depth, tree.min_leaf,
/// tree.min_gain. Throws IoError for unknown keys and malformed values.
CampaignConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            const std::string& origin = "<config>");
CampaignConfig load_config(const std::filesystem::path& path);

/// Echo of the config as written, stable key order.
nlohmann::json to_json(const CampaignConfig& c);

int cmd_validate(const std::filesystem::path& model, std::ostream& out, std::ostream& err);

int cmd_cases(const std::filesystem::path& model, const std::filesystem::path& out_path, std::ostream& out,
              std::ostream& err);

struct RunOptions {
  std::filesystem::path config;
  std::optional<int> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

/// Writes <out>/archive.csv and <out>/archive.json. Violations are data:
/// the exit code is 0 whether or not any were found.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

struct ExplainOptions {
  std::filesystem::path archive;
  std::filesystem::path model;
  std::filesystem::path out;
  std::optional<double> threshold;
  std::size_t augment = 20;  ///< counterexamples per rule
};

/// Reads the archive and its sibling .json header; writes tree.json,
/// rules.txt, rules.json, augmentation.json, report.json and the
/// likelihood-annotated model.
int cmd_explain(const ExplainOptions& opts, std::ostream& out, std::ostream& err);

struct ReplayOptions {
  std::filesystem::path model;
  std::filesystem::path scenario;
  std::filesystem::path assignment;  ///< JSON object of feature values
  std::filesystem::path out;
  std::string situation;  ///< empty: the model's first situation
  std::uint64_t seed = 1;
  int replicates = 1;
};

/// Writes <out>/trace.csv and <out>/verdict.json for one assignment.
int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace cais::cli
