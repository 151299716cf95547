#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cais/assignment.hpp"
#include "cais/feature_space.hpp"
#include "cais/sim.hpp"

namespace cais::falsify {

enum class Algorithm { kRandom, kHillClimb, kSimulatedAnnealing, kGenetic };

std::string_view to_string(Algorithm a);
/// Accepts random, hill_climb, simulated_annealing, genetic.
Algorithm parse_algorithm(std::string_view name);

struct SearchConfig {
  Algorithm algorithm = Algorithm::kRandom;
  int budget = 100;
  std::uint64_t seed = 0;
  double sigma = 0.1;           ///< Gaussian mutation scale in unit space
  double t0 = 0.05;             ///< initial annealing temperature
  double alpha = 0.98;          ///< cooling factor per evaluation
  int population = 20;
  double crossover_rate = 0.9;
  int tournament = 3;
  int restart_after = 20;       ///< consecutive rejections before a restart
  bool stop_at_first_violation = false;
  int threads = 1;              ///< parallel evaluations within a GA generation
};

/// Throws DomainError naming the first violated constraint.
void check_config(const SearchConfig& c);

/// Result of one evaluator call.
struct Evaluation {
  double robustness = 0.0;
  sim::Verdict verdict;
  std::uint64_t seed = 0;  ///< simulator seed the verdict came from
};

/// Must be deterministic; must be thread-safe when threads > 1.
using Evaluator = std::function<Evaluation(const FeatureAssignment&)>;

struct EvaluatedPoint {
  std::size_t index = 0;
  FeatureAssignment assignment;
  double robustness = 0.0;
  sim::Verdict verdict;
  std::uint64_t seed = 0;
};

struct Archive {
  std::vector<EvaluatedPoint> points;
  std::size_t best = 0;                ///< earliest minimum robustness
  std::vector<std::size_t> violations; ///< robustness < 0, ascending

  void add(EvaluatedPoint p);
  bool empty() const { return points.empty(); }
  /// Index of the first violation, or points.size() when none.
  std::size_t first_violation() const;
};

/// Runs one search. Exactly `budget` evaluator calls unless
/// stop_at_first_violation ends the run early.
Archive run_search(const FeatureSpace& space, const Evaluator& evaluate, const SearchConfig& config);

}  // namespace cais::falsify
