#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cais/assignment.hpp"
#include "cais/feature_space.hpp"
#include "cais/risk_model.hpp"
#include "cais/search.hpp"

namespace cais::explain {

/// Feature rows with binary labels. Values are numeric; categorical values
/// are stored as their category index.
struct LabeledDataset {
  std::vector<model::DomainFeature> columns;
  std::vector<std::vector<double>> rows;
  std::vector<bool> non_compliant;

  std::size_t size() const { return rows.size(); }
  std::size_t count_non_compliant() const;
  /// Appends one row; throws DomainError for arity or domain violations.
  void add(const FeatureAssignment& a, bool nc);
};

/// One row per archived point, columns in the space's order.
/// Throws DomainError("empty archive").
LabeledDataset build_dataset(const falsify::Archive& archive, const falsify::FeatureSpace& space);

/// Numeric columns: value <= threshold goes left. Categorical columns:
/// value == category goes left (one-vs-rest).
struct SplitTest {
  std::size_t feature = 0;
  bool categorical = false;
  double threshold = 0.0;
  std::size_t category = 0;

  bool goes_left(const std::vector<double>& row) const;
  friend bool operator==(const SplitTest&, const SplitTest&) = default;
};

struct Split {
  SplitTest test;
  double gain = 0.0;
};

/// Gains closer than this are treated as equal when breaking ties.
inline constexpr double kGainTolerance = 1e-12;

double gini(std::size_t non_compliant, std::size_t total);

/// Best Gini split of `rows` on one column, considering only candidates that
/// leave at least `min_leaf` rows on each side. Numeric candidates are the
/// midpoints of consecutive distinct values; ties go to the lower threshold.
/// Empty when no candidate separates the rows.
std::optional<Split> best_split(const LabeledDataset& data, const std::vector<std::size_t>& rows,
                                std::size_t column, std::size_t min_leaf = 1);

/// Best split over all columns; ties go to the lower column index.
std::optional<Split> best_split_any(const LabeledDataset& data, const std::vector<std::size_t>& rows,
                                    std::size_t min_leaf = 1);

struct TreeParams {
  int max_depth = 6;
  int min_leaf = 5;
  double min_gain = 1e-6;
};

struct Node {
  bool leaf = true;
  SplitTest test;
  int left = -1;
  int right = -1;
  int depth = 0;
  std::size_t compliant = 0;
  std::size_t non_compliant = 0;

  std::size_t samples() const { return compliant + non_compliant; }
  double likelihood() const;
};

/// CART tree; nodes[0] is the root.
struct DecisionTree {
  std::vector<model::DomainFeature> columns;
  std::vector<Node> nodes;

  /// Index of the leaf a row reaches.
  std::size_t leaf_of(const std::vector<double>& row) const;
  std::size_t depth() const;
};

/// Throws DomainError for an empty dataset.
DecisionTree induce_tree(const LabeledDataset& data, const TreeParams& params = {});

/// Likelihood of the leaf reached by `a`. Throws DomainError for a missing
/// feature or an out-of-domain value.
double predict(const DecisionTree& tree, const FeatureAssignment& a);

/// Constraint on one feature. Numeric features carry an interval whose
/// lower bound is open when it comes from a `>` test; categorical features
/// carry the allowed subset.
struct Constraint {
  std::string feature;
  model::FeatureKind kind = model::FeatureKind::kContinuous;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;
  std::vector<std::string> categories;

  bool admits(const FeatureValue& v) const;
  std::string to_string() const;
};

struct Rule {
  std::size_t id = 0;  ///< 1-based rank
  std::vector<Constraint> constraints;
  double likelihood = 0.0;
  std::size_t support = 0;
  std::size_t leaf = 0;

  /// Values of unconstrained features are ignored.
  bool satisfied_by(const FeatureAssignment& a) const;
  const Constraint* find(std::string_view feature) const;
  std::string to_string() const;  ///< "rule #k: ... → non-compliance, likelihood p, support n"
};

/// One rule per leaf whose likelihood is at least `threshold`, ordered by
/// descending likelihood, then descending support. Throws DomainError when
/// the threshold is outside [0, 1].
std::vector<Rule> extract_rules(const DecisionTree& tree, double threshold = 0.2);

struct AugmentationSet {
  std::size_t rule_id = 0;
  std::vector<FeatureAssignment> assignments;
};

/// n assignments drawn uniformly from the rule's region intersected with the
/// feature domains. Throws DomainError("empty region") when that
/// intersection has no interior.
AugmentationSet generate_counterexamples(const Rule& rule, const falsify::FeatureSpace& space, std::size_t n,
                                         std::uint64_t seed);

/// Non-compliance fraction and row count. Throws DomainError when empty.
model::Likelihood estimate_event_likelihood(const LabeledDataset& data);

nlohmann::json to_json(const DecisionTree& tree);
nlohmann::json to_json(const Rule& rule);
nlohmann::json to_json(const std::vector<Rule>& rules);
nlohmann::json to_json(const AugmentationSet& set);

/// Plain-text report, one line per rule.
std::string rules_report(const std::vector<Rule>& rules);

}  // namespace cais::explain
