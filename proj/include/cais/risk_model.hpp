#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cais/error.hpp"

namespace cais::model {

/// Where a declaration started in its source file (1-based). Positions are
/// provenance only: they never take part in structural equality.
struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

enum class Polarity { kPositive, kNegative };
enum class CompareOp { kLess, kGreater };
enum class ImpactSign { kPlus, kMinus };
enum class FeatureKind { kContinuous, kInteger, kCategorical };

std::string_view to_string(Polarity p);
std::string_view to_string(CompareOp op);
std::string_view to_string(FeatureKind k);

struct Actor {
  std::string name;
  SourcePos pos;
  friend bool operator==(const Actor&, const Actor&) = default;
};

struct Goal {
  std::string name;
  std::string owner;
  std::string description;
  SourcePos pos;
  friend bool operator==(const Goal&, const Goal&) = default;
};

/// Single comparison `metric op threshold` over a trace metric.
struct Condition {
  std::string metric;
  CompareOp op = CompareOp::kLess;
  double threshold = 0.0;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Impact {
  std::string goal;
  ImpactSign sign = ImpactSign::kMinus;
  friend bool operator==(const Impact&, const Impact&) = default;
};

/// Observed event frequency together with the number of runs behind it.
struct Likelihood {
  double fraction = 0.0;
  std::int64_t samples = 0;
  friend bool operator==(const Likelihood&, const Likelihood&) = default;
};

struct Event {
  std::string name;
  Polarity polarity = Polarity::kNegative;
  Condition condition;
  std::vector<Impact> impacts;
  std::optional<Likelihood> likelihood;
  SourcePos pos;
  friend bool operator==(const Event&, const Event&) = default;
};

struct Indicator {
  std::string name;
  std::string situation;
  std::string metric;
  SourcePos pos;
  friend bool operator==(const Indicator&, const Indicator&) = default;
};

/// A quantifiable characteristic of the environment; one dimension of the
/// search space. `lo`/`hi` apply to interval kinds, `categories` to
/// categorical ones. `binding` is a dotted scenario parameter path.
struct DomainFeature {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::string> categories;
  std::string units;
  std::string binding;
  SourcePos pos;
  friend bool operator==(const DomainFeature&, const DomainFeature&) = default;
};

struct Situation {
  std::string name;
  std::string description;
  std::string scenario_ref;
  std::vector<std::string> exposes;
  std::vector<std::string> features;
  std::vector<std::string> indicators;
  SourcePos pos;
  friend bool operator==(const Situation&, const Situation&) = default;
};

struct RiskModel {
  std::vector<Actor> actors;
  std::vector<Goal> goals;
  std::vector<Situation> situations;
  std::vector<Event> events;
  std::vector<Indicator> indicators;
  std::vector<DomainFeature> features;

  const Actor* find_actor(std::string_view name) const;
  const Goal* find_goal(std::string_view name) const;
  const Situation* find_situation(std::string_view name) const;
  const Event* find_event(std::string_view name) const;
  const Indicator* find_indicator(std::string_view name) const;
  const DomainFeature* find_feature(std::string_view name) const;

  friend bool operator==(const RiskModel&, const RiskModel&) = default;
};

/// A problem with one named element of a model.
struct Diagnostic {
  std::string kind;     ///< "actor", "goal", "event", ... or "syntax"
  std::string element;  ///< element name (empty for syntax errors)
  std::string message;
  SourcePos pos;

  std::string to_string() const;
};

/// Thrown by the parser; carries every diagnostic found.
class ModelError : public DomainError {
 public:
  explicit ModelError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Parses `.riskml` source. Syntax errors report line/column and the
/// expected tokens; the parsed model is then validated and any diagnostic
/// is raised as a ModelError.
RiskModel parse_risk_model(std::string_view text);

/// Checks every structural invariant. Empty result means the model is valid.
std::vector<Diagnostic> validate(const RiskModel& model);

/// Canonical DSL text; parse_risk_model(serialize_model(m)) == m.
std::string serialize_model(const RiskModel& model);

/// Returns a copy with the likelihood of each named event set.
/// Throws DomainError("unknown event ...") for names not in the model and for
/// fractions outside [0, 1].
RiskModel annotate_likelihoods(const RiskModel& model,
                               const std::map<std::string, Likelihood>& estimates);

/// Digest of the model's structure, ignoring likelihood annotations,
/// comments, layout and declaration positions.
std::string model_digest(const RiskModel& model);

}  // namespace cais::model
