#include "cais/feature_space.hpp"

#include <algorithm>
#include <cmath>

namespace cais::falsify {

using model::FeatureKind;

FeatureSpace::FeatureSpace(std::vector<model::DomainFeature> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("feature space needs at least one dimension");
  for (const auto& d : dims_) {
    const bool empty = d.kind == FeatureKind::kCategorical ? d.categories.empty() : !(d.lo < d.hi);
    if (empty) throw DomainError("feature " + d.name + " has an empty domain");
  }
}

std::size_t FeatureSpace::index_of(std::string_view name) const {
  const auto it = std::find_if(dims_.begin(), dims_.end(), [&](const auto& d) { return d.name == name; });
  return static_cast<std::size_t>(it - dims_.begin());
}

std::vector<double> FeatureSpace::encode(const FeatureAssignment& a) const {
  std::vector<double> out;
  out.reserve(dims_.size());
  for (const auto& d : dims_) {
    const auto it = a.find(d.name);
    if (it == a.end()) throw DomainError("assignment misses feature " + d.name);
    check_in_domain(d, it->second);
    if (d.kind == FeatureKind::kCategorical) {
      const double idx = numeric_value(d, it->second);
      out.push_back((idx + 0.5) / static_cast<double>(d.categories.size()));
    } else {
      out.push_back((numeric_value(d, it->second) - d.lo) / (d.hi - d.lo));
    }
  }
  return out;
}

FeatureAssignment FeatureSpace::decode(const std::vector<double>& unit) const {
  if (unit.size() != dims_.size()) throw DomainError("unit vector has wrong arity");
  FeatureAssignment out;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    const double x = std::clamp(unit[i], 0.0, 1.0);
    switch (d.kind) {
      case FeatureKind::kContinuous:
        out[d.name] = std::clamp(d.lo + x * (d.hi - d.lo), d.lo, d.hi);
        break;
      case FeatureKind::kInteger:
        out[d.name] = static_cast<std::int64_t>(std::llround(d.lo + x * (d.hi - d.lo)));
        break;
      case FeatureKind::kCategorical: {
        const auto k = d.categories.size();
        const auto idx = std::min(static_cast<std::size_t>(x * static_cast<double>(k)), k - 1);
        out[d.name] = d.categories[idx];
        break;
      }
    }
  }
  return out;
}

FeatureSpace make_feature_space(const model::RiskModel& model, std::string_view situation) {
  const model::Situation* s = model.find_situation(situation);
  if (!s) throw DomainError("unknown situation " + std::string(situation));
  std::vector<model::DomainFeature> dims;
  for (const auto& name : s->features) {
    const model::DomainFeature* f = model.find_feature(name);
    if (!f) throw DomainError("situation " + s->name + " references unknown feature " + name);
    dims.push_back(*f);
  }
  return FeatureSpace(std::move(dims));
}

Objective objective_from_event(const model::RiskModel& model, std::string_view event) {
  const model::Event* e = model.find_event(event);
  if (!e) throw DomainError("unknown event " + std::string(event));
  return {e->name, e->condition.metric,
          e->condition.op == model::CompareOp::kLess ? Direction::kMinimize : Direction::kMaximize,
          e->condition.threshold};
}

}  // namespace cais::falsify
