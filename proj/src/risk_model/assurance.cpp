#include "cais/assurance.hpp"

#include <algorithm>

namespace cais::model {

std::string_view to_string(EvidenceStatus s) {
  switch (s) {
    case EvidenceStatus::kPending:
      return "pending";
    case EvidenceStatus::kSupported:
      return "supported";
    case EvidenceStatus::kRefuted:
      return "refuted";
  }
  return "?";
}

namespace {

bool impacts_negatively(const Event& e, const std::string& goal) {
  return std::any_of(e.impacts.begin(), e.impacts.end(),
                     [&](const Impact& i) { return i.goal == goal && i.sign == ImpactSign::kMinus; });
}

}  // namespace

std::vector<AssuranceCase> derive_assurance_cases(const RiskModel& model) {
  std::vector<AssuranceCase> cases;
  for (const auto& s : model.situations) {
    for (const auto& g : model.goals) {
      AssuranceCase c;
      for (const auto& name : s.exposes) {
        const Event* e = model.find_event(name);
        if (!e || e->polarity != Polarity::kNegative || !impacts_negatively(*e, g.name)) continue;
        c.sub_claims.push_back({e->name, "risk of event " + e->name + " is acceptable in situation " + s.name});
        c.evidence.push_back({e->name, EvidenceStatus::kPending, ""});
      }
      if (c.sub_claims.empty()) continue;
      c.situation = s.name;
      c.goal = g.name;
      c.top_claim = "goal " + g.name + " holds in situation " + s.name;
      c.strategy = "argue over each negative event exposed by " + s.name + " that impacts " + g.name +
                   ", with simulation-based falsification campaigns as evidence";
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

nlohmann::json to_json(const AssuranceCase& c) {
  nlohmann::json children = nlohmann::json::array();
  for (const auto& sc : c.sub_claims) children.push_back({{"event", sc.event}, {"claim", sc.text}});
  nlohmann::json evidence = nlohmann::json::array();
  for (const auto& ev : c.evidence) {
    evidence.push_back({{"event", ev.event},
                        {"status", std::string(to_string(ev.status))},
                        {"campaign", ev.campaign.empty() ? nlohmann::json(nullptr) : nlohmann::json(ev.campaign)}});
  }
  return {{"situation", c.situation},
          {"goal", c.goal},
          {"claim", {{"text", c.top_claim}, {"strategy", c.strategy}, {"subclaims", children}}},
          {"evidence", evidence}};
}

nlohmann::json assurance_document(const std::vector<AssuranceCase>& cases) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : cases) arr.push_back(to_json(c));
  return {{"case_count", cases.size()}, {"cases", arr}};
}

}  // namespace cais::model
