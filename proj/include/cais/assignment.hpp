#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "json.hpp"

#include "cais/risk_model.hpp"

namespace cais {

/// A feature value typed by its feature kind: continuous -> double,
/// integer -> int64, categorical -> string.
using FeatureValue = std::variant<double, std::int64_t, std::string>;

/// One concrete point of the domain-feature space.
using FeatureAssignment = std::map<std::string, FeatureValue>;

bool in_domain(const model::DomainFeature& f, const FeatureValue& v);

/// Throws DomainError("value out of domain ...") unless `v` has the kind's
/// type and lies inside the feature's domain.
void check_in_domain(const model::DomainFeature& f, const FeatureValue& v);

std::string format_value(const FeatureValue& v);

/// Parses text as a value of the feature's kind (no domain check).
FeatureValue parse_value(const model::DomainFeature& f, std::string_view text);

/// Numeric view: continuous/integer as double, categorical as its index.
double numeric_value(const model::DomainFeature& f, const FeatureValue& v);

nlohmann::json to_json(const FeatureAssignment& a);

/// Reads `{"feature": value, ...}`; values are interpreted via the model's
/// feature kinds. Throws DomainError for unknown features and type mismatches.
FeatureAssignment assignment_from_json(const nlohmann::json& j, const model::RiskModel& model);

}  // namespace cais
