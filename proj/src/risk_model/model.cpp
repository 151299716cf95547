#include <algorithm>
#include <cmath>
#include <set>

#include "cais/io.hpp"
#include "cais/metrics.hpp"
#include "cais/risk_model.hpp"

namespace cais::model {

std::string_view to_string(Polarity p) { return p == Polarity::kPositive ? "positive" : "negative"; }
std::string_view to_string(CompareOp op) { return op == CompareOp::kLess ? "<" : ">"; }

std::string_view to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::kContinuous:
      return "continuous";
    case FeatureKind::kInteger:
      return "integer";
    case FeatureKind::kCategorical:
      return "categorical";
  }
  return "?";
}

namespace {

template <class T>
const T* find_named(const std::vector<T>& items, std::string_view name) {
  const auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return x.name == name; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

const Actor* RiskModel::find_actor(std::string_view n) const { return find_named(actors, n); }
const Goal* RiskModel::find_goal(std::string_view n) const { return find_named(goals, n); }
const Situation* RiskModel::find_situation(std::string_view n) const { return find_named(situations, n); }
const Event* RiskModel::find_event(std::string_view n) const { return find_named(events, n); }
const Indicator* RiskModel::find_indicator(std::string_view n) const { return find_named(indicators, n); }
const DomainFeature* RiskModel::find_feature(std::string_view n) const { return find_named(features, n); }

std::string Diagnostic::to_string() const {
  std::string out;
  if (pos.line > 0) out += std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
  if (!element.empty()) out += kind + " " + element + ": ";
  return out + message;
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "\n";
    out += d.to_string();
  }
  return out;
}

}  // namespace

ModelError::ModelError(std::vector<Diagnostic> diagnostics)
    : DomainError(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

// --- validation -------------------------------------------------------------

namespace {

class Validator {
 public:
  explicit Validator(const RiskModel& m) : m_(m) {}

  std::vector<Diagnostic> run() {
    unique(m_.actors, "actor");
    unique(m_.goals, "goal");
    unique(m_.events, "event");
    unique(m_.features, "feature");
    unique(m_.situations, "situation");
    unique(m_.indicators, "indicator");

    for (const auto& a : m_.actors) {
      if (a.name.empty()) add("actor", a.name, "empty name", a.pos);
    }
    for (const auto& g : m_.goals) {
      if (!m_.find_actor(g.owner)) add("goal", g.name, "unresolved actor " + g.owner, g.pos);
    }
    for (const auto& e : m_.events) check_event(e);
    for (const auto& f : m_.features) check_feature(f);
    for (const auto& s : m_.situations) check_situation(s);
    for (const auto& i : m_.indicators) {
      const Situation* s = m_.find_situation(i.situation);
      if (!s) {
        add("indicator", i.name, "unresolved situation " + i.situation, i.pos);
      } else if (std::find(s->indicators.begin(), s->indicators.end(), i.name) == s->indicators.end()) {
        add("indicator", i.name, "not listed by situation " + i.situation, i.pos);
      }
      if (!is_trace_metric(i.metric)) add("indicator", i.name, "unknown metric " + i.metric, i.pos);
    }
    return std::move(out_);
  }

 private:
  void add(const std::string& kind, const std::string& name, const std::string& msg, SourcePos pos) {
    out_.push_back({kind, name, msg, pos});
  }

  template <class T>
  void unique(const std::vector<T>& items, const std::string& kind) {
    std::set<std::string> seen;
    for (const auto& x : items) {
      if (!seen.insert(x.name).second) add(kind, x.name, "duplicate name", x.pos);
    }
  }

  void check_event(const Event& e) {
    if (e.impacts.empty()) add("event", e.name, "no impacts", e.pos);
    for (const auto& imp : e.impacts) {
      if (!m_.find_goal(imp.goal)) add("event", e.name, "unresolved goal " + imp.goal, e.pos);
      if (e.polarity == Polarity::kNegative && imp.sign != ImpactSign::kMinus) {
        add("event", e.name, "negative event must impact goal " + imp.goal + " with '-'", e.pos);
      }
    }
    if (!is_trace_metric(e.condition.metric)) {
      add("event", e.name, "unknown metric " + e.condition.metric, e.pos);
    }
    if (!std::isfinite(e.condition.threshold)) add("event", e.name, "threshold not finite", e.pos);
    if (e.likelihood) {
      const auto& l = *e.likelihood;
      if (!(l.fraction >= 0.0 && l.fraction <= 1.0)) add("event", e.name, "likelihood outside [0, 1]", e.pos);
      if (l.samples < 0) add("event", e.name, "negative sample count", e.pos);
    }
  }

  void check_feature(const DomainFeature& f) {
    if (f.binding.empty()) add("feature", f.name, "missing binding", f.pos);
    if (f.kind == FeatureKind::kCategorical) {
      if (f.categories.empty()) add("feature", f.name, "empty domain", f.pos);
      std::set<std::string> seen;
      for (const auto& c : f.categories) {
        if (!seen.insert(c).second) add("feature", f.name, "duplicate category " + c, f.pos);
      }
      return;
    }
    if (!std::isfinite(f.lo) || !std::isfinite(f.hi) || !(f.lo < f.hi)) {
      add("feature", f.name, "empty domain", f.pos);
    } else if (f.kind == FeatureKind::kInteger && (std::floor(f.lo) != f.lo || std::floor(f.hi) != f.hi)) {
      add("feature", f.name, "integer bounds must be integral", f.pos);
    }
  }

  void check_situation(const Situation& s) {
    if (s.exposes.empty()) add("situation", s.name, "exposes no events", s.pos);
    if (s.features.empty()) add("situation", s.name, "references no domain features", s.pos);
    for (const auto& e : s.exposes) {
      if (!m_.find_event(e)) add("situation", s.name, "unresolved event " + e, s.pos);
    }
    for (const auto& f : s.features) {
      if (!m_.find_feature(f)) add("situation", s.name, "unresolved feature " + f, s.pos);
    }
    for (const auto& i : s.indicators) {
      const Indicator* ind = m_.find_indicator(i);
      if (!ind) {
        add("situation", s.name, "unresolved indicator " + i, s.pos);
      } else if (ind->situation != s.name) {
        add("situation", s.name, "indicator " + i + " belongs to " + ind->situation, s.pos);
      }
    }
  }

  const RiskModel& m_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const RiskModel& model) { return Validator(model).run(); }

// --- serialization ----------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + xs[i];
  return out;
}

}  // namespace

std::string serialize_model(const RiskModel& m) {
  std::string out;
  for (const auto& a : m.actors) out += "actor " + a.name + "\n";
  for (const auto& g : m.goals) out += "goal " + g.name + " owner " + g.owner + " " + quote(g.description) + "\n";
  for (const auto& f : m.features) {
    out += "feature " + f.name + " " + std::string(to_string(f.kind)) + " ";
    if (f.kind == FeatureKind::kCategorical) {
      out += "{" + join(f.categories) + "}";
    } else {
      out += "[" + io::format_double(f.lo) + ", " + io::format_double(f.hi) + "] " + f.units;
    }
    out += " binds " + f.binding + "\n";
  }
  for (const auto& e : m.events) {
    out += "event " + e.name + " " + std::string(to_string(e.polarity)) + " when " + e.condition.metric + " " +
           std::string(to_string(e.condition.op)) + " " + io::format_double(e.condition.threshold) + " impacts ";
    for (std::size_t i = 0; i < e.impacts.size(); ++i) {
      out += (i ? ", " : "");
      out += (e.impacts[i].sign == ImpactSign::kMinus ? "-" : "+") + e.impacts[i].goal;
    }
    if (e.likelihood) {
      out += " likelihood " + io::format_double(e.likelihood->fraction) + " of " +
             std::to_string(e.likelihood->samples);
    }
    out += "\n";
  }
  for (const auto& s : m.situations) {
    out += "situation " + s.name + " " + quote(s.description) + "\n    scenario " + quote(s.scenario_ref) +
           "\n    exposes " + join(s.exposes) + "\n    features " + join(s.features);
    if (!s.indicators.empty()) {
      out += "\n    indicators ";
      for (std::size_t i = 0; i < s.indicators.size(); ++i) {
        const Indicator* ind = m.find_indicator(s.indicators[i]);
        out += (i ? ", " : "") + s.indicators[i] + ":" + (ind ? ind->metric : std::string("?"));
      }
    }
    out += "\n";
  }
  return out;
}

RiskModel annotate_likelihoods(const RiskModel& model, const std::map<std::string, Likelihood>& estimates) {
  RiskModel out = model;
  for (const auto& [name, l] : estimates) {
    auto it = std::find_if(out.events.begin(), out.events.end(), [&](const Event& e) { return e.name == name; });
    if (it == out.events.end()) throw DomainError("unknown event " + name);
    if (!(l.fraction >= 0.0 && l.fraction <= 1.0) || l.samples < 0) {
      throw DomainError("likelihood for " + name + " outside [0, 1]");
    }
    it->likelihood = l;
  }
  return out;
}

std::string model_digest(const RiskModel& model) {
  RiskModel stripped = model;
  for (auto& e : stripped.events) e.likelihood.reset();
  return io::sha256_hex(serialize_model(stripped));
}

}  // namespace cais::model
