#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "cais/error.hpp"
#include "cais/explain.hpp"
#include "cais/rng.hpp"

namespace cais::explain {

using model::FeatureKind;

namespace {

std::string short_number(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

Constraint unconstrained(const model::DomainFeature& f) {
  Constraint c;
  c.feature = f.name;
  c.kind = f.kind;
  c.lo = f.lo;
  c.hi = f.hi;
  c.categories = f.categories;
  return c;
}

void tighten(Constraint& c, const model::DomainFeature& f, const SplitTest& t, bool left) {
  if (t.categorical) {
    const std::string& cat = f.categories[t.category];
    if (left) {
      const bool present = std::find(c.categories.begin(), c.categories.end(), cat) != c.categories.end();
      c.categories = present ? std::vector<std::string>{cat} : std::vector<std::string>{};
    } else {
      std::erase(c.categories, cat);
    }
    return;
  }
  if (left) {
    if (t.threshold < c.hi) {
      c.hi = t.threshold;
      c.hi_closed = true;
    }
  } else if (t.threshold >= c.lo) {
    c.lo = t.threshold;
    c.lo_closed = false;
  }
}

}  // namespace

bool Constraint::admits(const FeatureValue& v) const {
  if (kind == FeatureKind::kCategorical) {
    const auto* s = std::get_if<std::string>(&v);
    return s && std::find(categories.begin(), categories.end(), *s) != categories.end();
  }
  double x = 0.0;
  if (const auto* d = std::get_if<double>(&v)) {
    x = *d;
  } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
    x = static_cast<double>(*i);
  } else {
    return false;
  }
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

std::string Constraint::to_string() const {
  if (kind == FeatureKind::kCategorical) {
    std::string s = feature + " in {";
    for (std::size_t i = 0; i < categories.size(); ++i) s += (i ? ", " : "") + categories[i];
    return s + "}";
  }
  return feature + " in " + (lo_closed ? "[" : "(") + short_number(lo) + ", " + short_number(hi) +
         (hi_closed ? "]" : ")");
}

const Constraint* Rule::find(std::string_view feature) const {
  for (const auto& c : constraints) {
    if (c.feature == feature) return &c;
  }
  return nullptr;
}

bool Rule::satisfied_by(const FeatureAssignment& a) const {
  for (const auto& c : constraints) {
    const auto it = a.find(c.feature);
    if (it == a.end() || !c.admits(it->second)) return false;
  }
  return true;
}

std::string Rule::to_string() const {
  std::string s = "rule #" + std::to_string(id) + ": ";
  if (constraints.empty()) s += "any assignment";
  for (std::size_t i = 0; i < constraints.size(); ++i) s += (i ? " and " : "") + constraints[i].to_string();
  return s + " → non-compliance, likelihood " + short_number(likelihood, "%.3f") + ", support " +
         std::to_string(support);
}

std::vector<Rule> extract_rules(const DecisionTree& tree, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("rule threshold must be in [0, 1]");
  std::vector<Rule> rules;
  std::map<std::size_t, Constraint> path;

  auto visit = [&](auto&& self, std::size_t id) -> void {
    const Node& node = tree.nodes[id];
    if (node.leaf) {
      if (node.samples() == 0 || node.likelihood() < threshold) return;
      Rule r;
      for (const auto& [col, c] : path) r.constraints.push_back(c);
      r.likelihood = node.likelihood();
      r.support = node.samples();
      r.leaf = id;
      rules.push_back(std::move(r));
      return;
    }
    const std::size_t col = node.test.feature;
    const auto& f = tree.columns[col];
    const bool had = path.count(col) > 0;
    const Constraint saved = had ? path.at(col) : unconstrained(f);
    for (const bool left : {true, false}) {
      Constraint c = saved;
      tighten(c, f, node.test, left);
      path[col] = c;
      self(self, static_cast<std::size_t>(left ? node.left : node.right));
    }
    if (had) {
      path[col] = saved;
    } else {
      path.erase(col);
    }
  };
  visit(visit, 0);

  std::stable_sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
    if (a.likelihood != b.likelihood) return a.likelihood > b.likelihood;
    return a.support > b.support;
  });
  for (std::size_t i = 0; i < rules.size(); ++i) rules[i].id = i + 1;
  return rules;
}

AugmentationSet generate_counterexamples(const Rule& rule, const falsify::FeatureSpace& space, std::size_t n,
                                         std::uint64_t seed) {
  struct Sampler {
    const model::DomainFeature* f;
    double lo, hi;
    bool lo_closed, hi_closed;
    std::vector<std::string> cats;
  };
  std::vector<Sampler> samplers;
  for (const auto& f : space.dims()) {
    Constraint c = unconstrained(f);
    if (const Constraint* rc = rule.find(f.name)) {
      c = *rc;
      if (f.kind != FeatureKind::kCategorical) {
        if (c.lo < f.lo) {
          c.lo = f.lo;
          c.lo_closed = true;
        }
        if (c.hi > f.hi) {
          c.hi = f.hi;
          c.hi_closed = true;
        }
      } else {
        std::erase_if(c.categories, [&](const std::string& s) {
          return std::find(f.categories.begin(), f.categories.end(), s) == f.categories.end();
        });
      }
    }
    Sampler s{&f, c.lo, c.hi, c.lo_closed, c.hi_closed, c.categories};
    bool empty = false;
    switch (f.kind) {
      case FeatureKind::kContinuous:
        empty = !(s.lo < s.hi);
        break;
      case FeatureKind::kInteger:
        s.lo = s.lo_closed ? std::ceil(s.lo) : std::floor(s.lo) + 1.0;
        s.hi = s.hi_closed ? std::floor(s.hi) : std::ceil(s.hi) - 1.0;
        empty = s.lo > s.hi;
        break;
      case FeatureKind::kCategorical:
        empty = s.cats.empty();
        break;
    }
    if (empty) throw DomainError("empty region for rule #" + std::to_string(rule.id) + " on feature " + f.name);
    samplers.push_back(std::move(s));
  }

  AugmentationSet out;
  out.rule_id = rule.id;
  Rng rng(derive_seed(seed, rule.id));
  for (std::size_t k = 0; k < n; ++k) {
    FeatureAssignment a;
    for (const auto& s : samplers) {
      switch (s.f->kind) {
        case FeatureKind::kContinuous: {
          double x;
          do {
            x = std::min(s.hi, s.lo + (s.hi - s.lo) * rng.uniform());
          } while ((!s.lo_closed && x <= s.lo) || (!s.hi_closed && x >= s.hi));
          a[s.f->name] = x;
          break;
        }
        case FeatureKind::kInteger: {
          const auto span = static_cast<std::uint64_t>(s.hi - s.lo) + 1;
          a[s.f->name] = static_cast<std::int64_t>(s.lo) + static_cast<std::int64_t>(rng.below(span));
          break;
        }
        case FeatureKind::kCategorical:
          a[s.f->name] = s.cats[rng.below(s.cats.size())];
          break;
      }
    }
    out.assignments.push_back(std::move(a));
  }
  return out;
}

nlohmann::json to_json(const DecisionTree& tree) {
  auto node_json = [&](auto&& self, std::size_t id) -> nlohmann::json {
    const Node& n = tree.nodes[id];
    nlohmann::json j = {{"samples", n.samples()}, {"non_compliance", n.non_compliant}, {"likelihood", n.likelihood()}};
    if (n.leaf) return j;
    const auto& f = tree.columns[n.test.feature];
    j["feature"] = f.name;
    if (n.test.categorical) {
      j["test"] = {{"op", "=="}, {"category", f.categories[n.test.category]}};
    } else {
      j["test"] = {{"op", "<="}, {"threshold", n.test.threshold}};
    }
    j["left"] = self(self, static_cast<std::size_t>(n.left));
    j["right"] = self(self, static_cast<std::size_t>(n.right));
    return j;
  };
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : tree.columns) columns.push_back(c.name);
  return {{"features", columns}, {"depth", tree.depth()}, {"nodes", tree.nodes.size()}, {"root", node_json(node_json, 0)}};
}

nlohmann::json to_json(const Rule& rule) {
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : rule.constraints) {
    if (c.kind == FeatureKind::kCategorical) {
      cs.push_back({{"feature", c.feature}, {"categories", c.categories}});
    } else {
      cs.push_back({{"feature", c.feature},
                    {"lo", c.lo},
                    {"hi", c.hi},
                    {"lo_closed", c.lo_closed},
                    {"hi_closed", c.hi_closed}});
    }
  }
  return {{"id", rule.id}, {"constraints", cs}, {"likelihood", rule.likelihood}, {"support", rule.support},
          {"text", rule.to_string()}};
}

nlohmann::json to_json(const std::vector<Rule>& rules) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rules) j.push_back(to_json(r));
  return j;
}

nlohmann::json to_json(const AugmentationSet& set) {
  nlohmann::json as = nlohmann::json::array();
  for (const auto& a : set.assignments) as.push_back(cais::to_json(a));
  return {{"rule", set.rule_id}, {"assignments", as}};
}

std::string rules_report(const std::vector<Rule>& rules) {
  std::string out;
  for (const auto& r : rules) out += r.to_string() + "\n";
  return out;
}

}  // namespace cais::explain
