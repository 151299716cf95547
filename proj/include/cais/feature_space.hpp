#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cais/assignment.hpp"
#include "cais/risk_model.hpp"

namespace cais::falsify {

/// Ordered search dimensions taken from one situation's domain features.
/// All search algorithms work in the unit hypercube [0, 1]^n; encode/decode
/// translate between that cube and typed feature assignments.
class FeatureSpace {
 public:
  explicit FeatureSpace(std::vector<model::DomainFeature> dims);

  const std::vector<model::DomainFeature>& dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }
  const model::DomainFeature& dim(std::size_t i) const { return dims_[i]; }
  /// Index of a dimension by feature name, or size() when absent.
  std::size_t index_of(std::string_view name) const;

  /// Continuous dims map affinely onto [0, 1]; integer dims likewise;
  /// categorical dims map to the centre of their equal-width bucket.
  /// Throws DomainError for missing or out-of-domain values.
  std::vector<double> encode(const FeatureAssignment& a) const;

  /// Inverse of encode. Components are clamped to [0, 1]; integer dims round
  /// to nearest, categorical dims pick the bucket containing the component.
  FeatureAssignment decode(const std::vector<double>& unit) const;

 private:
  std::vector<model::DomainFeature> dims_;
};

/// Dimensions in the situation's feature order.
/// Throws DomainError for an unknown situation.
FeatureSpace make_feature_space(const model::RiskModel& model, std::string_view situation);

enum class Direction { kMinimize, kMaximize };

/// What a search optimizes for a target event: drive `metric` in
/// `direction`; the search itself always minimizes robustness.
struct Objective {
  std::string event;
  std::string metric;
  Direction direction = Direction::kMinimize;
  double threshold = 0.0;
};

/// Throws DomainError("unknown event ...").
Objective objective_from_event(const model::RiskModel& model, std::string_view event);

}  // namespace cais::falsify
