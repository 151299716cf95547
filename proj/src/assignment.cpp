#include "cais/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "cais/io.hpp"

namespace cais {

using model::DomainFeature;
using model::FeatureKind;

bool in_domain(const DomainFeature& f, const FeatureValue& v) {
  switch (f.kind) {
    case FeatureKind::kContinuous: {
      const double* x = std::get_if<double>(&v);
      return x && std::isfinite(*x) && *x >= f.lo && *x <= f.hi;
    }
    case FeatureKind::kInteger: {
      const std::int64_t* x = std::get_if<std::int64_t>(&v);
      return x && static_cast<double>(*x) >= f.lo && static_cast<double>(*x) <= f.hi;
    }
    case FeatureKind::kCategorical: {
      const std::string* x = std::get_if<std::string>(&v);
      return x && std::find(f.categories.begin(), f.categories.end(), *x) != f.categories.end();
    }
  }
  return false;
}

void check_in_domain(const DomainFeature& f, const FeatureValue& v) {
  if (!in_domain(f, v)) throw DomainError("value out of domain for feature " + f.name + ": " + format_value(v));
}

std::string format_value(const FeatureValue& v) {
  if (const double* x = std::get_if<double>(&v)) return io::format_double(*x);
  if (const std::int64_t* x = std::get_if<std::int64_t>(&v)) return std::to_string(*x);
  return std::get<std::string>(v);
}

FeatureValue parse_value(const DomainFeature& f, std::string_view text) {
  text = io::trim(text);
  switch (f.kind) {
    case FeatureKind::kContinuous:
      if (auto x = io::parse_double(text)) return *x;
      break;
    case FeatureKind::kInteger:
      if (auto x = io::parse_int(text)) return *x;
      break;
    case FeatureKind::kCategorical:
      return std::string(text);
  }
  throw DomainError("malformed value '" + std::string(text) + "' for feature " + f.name);
}

double numeric_value(const DomainFeature& f, const FeatureValue& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  if (const std::int64_t* x = std::get_if<std::int64_t>(&v)) return static_cast<double>(*x);
  const auto& s = std::get<std::string>(v);
  const auto it = std::find(f.categories.begin(), f.categories.end(), s);
  return static_cast<double>(it - f.categories.begin());
}

nlohmann::json to_json(const FeatureAssignment& a) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, v] : a) {
    std::visit([&](const auto& x) { j[name] = x; }, v);
  }
  return j;
}

FeatureAssignment assignment_from_json(const nlohmann::json& j, const model::RiskModel& model) {
  if (!j.is_object()) throw DomainError("assignment must be a JSON object");
  FeatureAssignment out;
  for (const auto& [name, val] : j.items()) {
    const DomainFeature* f = model.find_feature(name);
    if (!f) throw DomainError("unknown feature " + name);
    switch (f->kind) {
      case FeatureKind::kContinuous:
        if (!val.is_number()) throw DomainError("feature " + name + " expects a number");
        out[name] = val.get<double>();
        break;
      case FeatureKind::kInteger:
        if (val.is_number_integer()) {
          out[name] = val.get<std::int64_t>();
        } else if (val.is_number() && std::floor(val.get<double>()) == val.get<double>()) {
          out[name] = static_cast<std::int64_t>(val.get<double>());
        } else {
          throw DomainError("feature " + name + " expects an integer");
        }
        break;
      case FeatureKind::kCategorical:
        if (!val.is_string()) throw DomainError("feature " + name + " expects a category name");
        out[name] = val.get<std::string>();
        break;
    }
  }
  return out;
}

}  // namespace cais
