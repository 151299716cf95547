#include <functional>
#include <map>

#include "cais/cli.hpp"
#include "cais/error.hpp"
#include "cais/io.hpp"

namespace cais::cli {

namespace fs = std::filesystem;

fs::path CampaignConfig::model_path() const { return base_dir / model; }

fs::path CampaignConfig::scenario_path() const { return scenario.empty() ? fs::path() : base_dir / scenario; }

namespace {

using Setter = std::function<void(CampaignConfig&, const std::string&)>;

double as_real(const std::string& v) {
  const auto x = io::parse_double(v);
  if (!x) throw IoError("expects a number, got '" + v + "'");
  return *x;
}

std::int64_t as_int(const std::string& v) {
  const auto x = io::parse_int(v);
  if (!x) throw IoError("expects an integer, got '" + v + "'");
  return *x;
}

bool as_bool(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw IoError("expects true or false, got '" + v + "'");
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"model", [](CampaignConfig& c, const std::string& v) { c.model = v; }},
      {"scenario", [](CampaignConfig& c, const std::string& v) { c.scenario = v; }},
      {"situation", [](CampaignConfig& c, const std::string& v) { c.situation = v; }},
      {"event", [](CampaignConfig& c, const std::string& v) { c.event = v; }},
      {"out", [](CampaignConfig& c, const std::string& v) { c.out = v; }},
      {"search.algorithm", [](CampaignConfig& c, const std::string& v) { c.search.algorithm = falsify::parse_algorithm(v); }},
      {"search.budget", [](CampaignConfig& c, const std::string& v) { c.search.budget = static_cast<int>(as_int(v)); }},
      {"search.seed",
       [](CampaignConfig& c, const std::string& v) {
         const auto s = as_int(v);
         if (s < 0) throw IoError("seed must be >= 0");
         c.search.seed = static_cast<std::uint64_t>(s);
       }},
      {"search.sigma", [](CampaignConfig& c, const std::string& v) { c.search.sigma = as_real(v); }},
      {"search.t0", [](CampaignConfig& c, const std::string& v) { c.search.t0 = as_real(v); }},
      {"search.alpha", [](CampaignConfig& c, const std::string& v) { c.search.alpha = as_real(v); }},
      {"search.population",
       [](CampaignConfig& c, const std::string& v) { c.search.population = static_cast<int>(as_int(v)); }},
      {"search.crossover_rate", [](CampaignConfig& c, const std::string& v) { c.search.crossover_rate = as_real(v); }},
      {"search.tournament",
       [](CampaignConfig& c, const std::string& v) { c.search.tournament = static_cast<int>(as_int(v)); }},
      {"search.restart_after",
       [](CampaignConfig& c, const std::string& v) { c.search.restart_after = static_cast<int>(as_int(v)); }},
      {"search.stop_at_first_violation",
       [](CampaignConfig& c, const std::string& v) { c.search.stop_at_first_violation = as_bool(v); }},
      {"search.threads", [](CampaignConfig& c, const std::string& v) { c.search.threads = static_cast<int>(as_int(v)); }},
      {"seeds.base",
       [](CampaignConfig& c, const std::string& v) {
         const auto s = as_int(v);
         if (s < 0) throw IoError("seed must be >= 0");
         c.seeds.base = static_cast<std::uint64_t>(s);
       }},
      {"seeds.replicates",
       [](CampaignConfig& c, const std::string& v) { c.seeds.replicates = static_cast<int>(as_int(v)); }},
      {"explain.threshold", [](CampaignConfig& c, const std::string& v) { c.threshold = as_real(v); }},
      {"tree.max_depth", [](CampaignConfig& c, const std::string& v) { c.tree.max_depth = static_cast<int>(as_int(v)); }},
      {"tree.min_leaf", [](CampaignConfig& c, const std::string& v) { c.tree.min_leaf = static_cast<int>(as_int(v)); }},
      {"tree.min_gain", [](CampaignConfig& c, const std::string& v) { c.tree.min_gain = as_real(v); }},
  };
  return table;
}

}  // namespace

CampaignConfig parse_config(std::string_view text, const fs::path& base_dir, const std::string& origin) {
  const auto doc = io::KvDocument::parse(text, origin);
  CampaignConfig c;
  c.base_dir = base_dir;
  for (const auto& e : doc.entries()) {
    const std::string where = origin + ":" + std::to_string(e.line) + ": ";
    const auto it = setters().find(e.key);
    if (it == setters().end()) throw IoError(where + "unknown config key '" + e.key + "'");
    try {
      it->second(c, e.value);
    } catch (const Error& err) {
      throw IoError(where + "'" + e.key + "' " + err.what());
    }
  }
  if (c.model.empty()) throw IoError(origin + ": missing 'model'");
  if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw IoError(origin + ": explain.threshold must be in [0, 1]");
  if (c.tree.max_depth < 0 || c.tree.min_leaf < 1) throw IoError(origin + ": tree parameters out of range");
  if (c.seeds.replicates < 1) throw IoError(origin + ": seeds.replicates must be >= 1");
  return c;
}

CampaignConfig load_config(const fs::path& path) {
  return parse_config(io::read_file(path), path.parent_path(), path.string());
}

nlohmann::json to_json(const CampaignConfig& c) {
  const auto& s = c.search;
  return {
      {"model", c.model},
      {"scenario", c.scenario},
      {"situation", c.situation},
      {"event", c.event},
      {"out", c.out},
      {"search",
       {{"algorithm", std::string(falsify::to_string(s.algorithm))},
        {"budget", s.budget},
        {"seed", s.seed},
        {"sigma", s.sigma},
        {"t0", s.t0},
        {"alpha", s.alpha},
        {"population", s.population},
        {"crossover_rate", s.crossover_rate},
        {"tournament", s.tournament},
        {"restart_after", s.restart_after},
        {"stop_at_first_violation", s.stop_at_first_violation},
        {"threads", s.threads}}},
      {"seeds", {{"base", c.seeds.base}, {"replicates", c.seeds.replicates}}},
      {"explain", {{"threshold", c.threshold}}},
      {"tree", {{"max_depth", c.tree.max_depth}, {"min_leaf", c.tree.min_leaf}, {"min_gain", c.tree.min_gain}}},
  };
}

}  // namespace cais::cli
