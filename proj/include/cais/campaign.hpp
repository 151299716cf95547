#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cais/risk_model.hpp"
#include "cais/scenario.hpp"
#include "cais/search.hpp"

namespace cais::falsify {

/// How simulator seeds are chosen per evaluation. Every evaluation uses the
/// same seeds; with replicates > 1 the robustness is the mean over them.
struct SeedPolicy {
  std::uint64_t base = 1;
  int replicates = 1;

  /// Seed of replicate r; replicate 0 uses `base` itself.
  std::uint64_t seed_for(int r) const;
};

struct Campaign {
  model::RiskModel model;
  sim::Scenario scenario;
  std::string situation;
  std::string event;
  SearchConfig search;
  SeedPolicy seeds;
};

/// Bind, simulate and judge one assignment under the seed policy.
/// Throws DomainError when the event is not exposed by the situation.
Evaluator make_evaluator(const model::RiskModel& model, const sim::Scenario& scenario, std::string_view situation,
                         std::string_view event, const SeedPolicy& seeds);

/// Full closed-loop campaign: run_search over the situation's feature space.
Archive run_campaign(const Campaign& c);

/// Events exposed by the situation, in the situation's order.
std::vector<std::string> exposed_events(const model::RiskModel& model, std::string_view situation);

/// One row per evaluation:
///   index,<features...>,robustness,label,triggered,robustness.<event>...
/// `triggered` lists triggered events joined by ';'.
std::string archive_csv(const Archive& a, const FeatureSpace& space, const std::vector<std::string>& events);

/// Inverse of archive_csv. `target` names the event whose robustness fills
/// the robustness column. Throws IoError on malformed rows and DomainError on
/// out-of-domain values or columns that do not match the space.
Archive parse_archive_csv(std::string_view text, const FeatureSpace& space, std::string_view target);

std::string scenario_digest(const sim::Scenario& s);

/// Campaign description stored next to the CSV: search configuration, seed
/// policy, input digests and summary counts.
nlohmann::json archive_header(const Campaign& c, const Archive& a);

}  // namespace cais::falsify
