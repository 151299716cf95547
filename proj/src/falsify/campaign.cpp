#include "cais/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cais/error.hpp"
#include "cais/io.hpp"
#include "cais/rng.hpp"
#include "cais/sim.hpp"

namespace cais::falsify {

using namespace cais::io;

std::uint64_t SeedPolicy::seed_for(int r) const {
  return r == 0 ? base : derive_seed(base, static_cast<std::uint64_t>(r));
}

std::vector<std::string> exposed_events(const model::RiskModel& model, std::string_view situation) {
  const model::Situation* s = model.find_situation(situation);
  if (!s) throw DomainError("unknown situation " + std::string(situation));
  return s->exposes;
}

Evaluator make_evaluator(const model::RiskModel& model, const sim::Scenario& scenario, std::string_view situation,
                         std::string_view event, const SeedPolicy& seeds) {
  const auto events = exposed_events(model, situation);
  if (std::find(events.begin(), events.end(), event) == events.end()) {
    throw DomainError("event " + std::string(event) + " is not exposed by situation " + std::string(situation));
  }
  if (seeds.replicates < 1) throw DomainError("seed replicates must be >= 1");
  return [&model, scenario, sit = std::string(situation), ev = std::string(event), seeds](const FeatureAssignment& a) {
    const sim::Scenario bound = sim::bind_assignment(scenario, model, a);
    if (seeds.replicates == 1) {
      sim::Verdict v = sim::evaluate_events(sim::simulate(bound, seeds.base).summary, model, sit);
      const double r = v.per_event.at(ev).robustness;
      return Evaluation{r, std::move(v), seeds.base};
    }
    std::map<std::string, double> sum;
    for (int k = 0; k < seeds.replicates; ++k) {
      const sim::Verdict v = sim::evaluate_events(sim::simulate(bound, seeds.seed_for(k)).summary, model, sit);
      for (const auto& [name, o] : v.per_event) sum[name] += o.robustness;
    }
    sim::Verdict v;
    for (const auto& [name, total] : sum) {
      const double r = total / seeds.replicates;
      v.per_event[name] = {r < 0.0, r};
      if (r < 0.0 && model.find_event(name)->polarity == model::Polarity::kNegative) {
        v.label = sim::Label::kNonCompliance;
      }
    }
    const double r = v.per_event.at(ev).robustness;
    return Evaluation{r, std::move(v), seeds.base};
  };
}

Archive run_campaign(const Campaign& c) {
  check_config(c.search);
  const FeatureSpace space = make_feature_space(c.model, c.situation);
  const Evaluator evaluate = make_evaluator(c.model, c.scenario, c.situation, c.event, c.seeds);
  return run_search(space, evaluate, c.search);
}

std::string archive_csv(const Archive& a, const FeatureSpace& space, const std::vector<std::string>& events) {
  std::ostringstream out;
  out << "index";
  for (const auto& d : space.dims()) out << ',' << d.name;
  out << ",robustness,label,triggered";
  for (const auto& e : events) out << ",robustness." << e;
  out << '\n';
  for (const auto& p : a.points) {
    out << p.index;
    for (const auto& d : space.dims()) out << ',' << format_value(p.assignment.at(d.name));
    out << ',' << format_double(p.robustness) << ',' << sim::to_string(p.verdict.label) << ',';
    bool first = true;
    for (const auto& e : events) {
      const auto it = p.verdict.per_event.find(e);
      if (it != p.verdict.per_event.end() && it->second.triggered) {
        out << (first ? "" : ";") << e;
        first = false;
      }
    }
    for (const auto& e : events) {
      const auto it = p.verdict.per_event.find(e);
      out << ',' << (it == p.verdict.per_event.end() ? std::string() : format_double(it->second.robustness));
    }
    out << '\n';
  }
  return out.str();
}

Archive parse_archive_csv(std::string_view text, const FeatureSpace& space, std::string_view target) {
  std::vector<std::string> lines;
  for (auto& l : split(text, '\n')) {
    if (!trim(l).empty()) lines.push_back(std::string(trim(l)));
  }
  if (lines.empty()) throw IoError("archive is empty");
  const auto header = split(lines[0], ',');
  const std::size_t n = space.size();
  if (header.size() < n + 4 || header[0] != "index") throw IoError("archive header is malformed");
  for (std::size_t i = 0; i < n; ++i) {
    if (header[i + 1] != space.dim(i).name) {
      throw DomainError("archive column " + header[i + 1] + " does not match feature " + space.dim(i).name);
    }
  }
  if (header[n + 1] != "robustness" || header[n + 2] != "label" || header[n + 3] != "triggered") {
    throw IoError("archive header is malformed");
  }
  std::vector<std::string> events;
  for (std::size_t i = n + 4; i < header.size(); ++i) {
    if (header[i].rfind("robustness.", 0) != 0) throw IoError("archive header is malformed");
    events.push_back(header[i].substr(11));
  }

  Archive a;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto cells = split(lines[row], ',');
    const std::string where = "archive row " + std::to_string(row);
    if (cells.size() != header.size()) throw IoError(where + " has " + std::to_string(cells.size()) + " cells");
    const auto idx = parse_int(cells[0]);
    if (!idx || *idx != static_cast<std::int64_t>(row - 1)) throw IoError(where + " has a bad index");
    EvaluatedPoint p;
    for (std::size_t i = 0; i < n; ++i) {
      const FeatureValue v = parse_value(space.dim(i), cells[i + 1]);
      check_in_domain(space.dim(i), v);
      p.assignment[space.dim(i).name] = v;
    }
    const auto r = parse_double(cells[n + 1]);
    if (!r) throw IoError(where + " has a bad robustness");
    p.robustness = *r;
    if (cells[n + 2] == "non_compliance") {
      p.verdict.label = sim::Label::kNonCompliance;
    } else if (cells[n + 2] != "compliance") {
      throw IoError(where + " has a bad label");
    }
    for (std::size_t k = 0; k < events.size(); ++k) {
      const auto er = parse_double(cells[n + 4 + k]);
      if (!er) throw IoError(where + " has a bad robustness for " + events[k]);
      p.verdict.per_event[events[k]] = sim::EventOutcome{*er < 0.0, *er};
    }
    if (!events.empty()) {
      const auto it = p.verdict.per_event.find(std::string(target));
      if (it == p.verdict.per_event.end()) throw DomainError("archive has no column for event " + std::string(target));
      if (it->second.robustness != p.robustness) throw IoError(where + " robustness disagrees with its event column");
    }
    a.add(std::move(p));
  }
  return a;
}

std::string scenario_digest(const sim::Scenario& s) { return sha256_hex(sim::serialize_scenario(s)); }

nlohmann::json archive_header(const Campaign& c, const Archive& a) {
  const auto& s = c.search;
  nlohmann::json search = {
      {"algorithm", std::string(to_string(s.algorithm))},
      {"budget", s.budget},
      {"seed", s.seed},
      {"sigma", s.sigma},
      {"t0", s.t0},
      {"alpha", s.alpha},
      {"population", s.population},
      {"crossover_rate", s.crossover_rate},
      {"tournament", s.tournament},
      {"restart_after", s.restart_after},
      {"stop_at_first_violation", s.stop_at_first_violation},
  };
  nlohmann::json features = nlohmann::json::array();
  for (const auto& name : c.model.find_situation(c.situation)->features) features.push_back(name);
  std::size_t non_compliant = 0;
  for (const auto& p : a.points) non_compliant += p.verdict.label == sim::Label::kNonCompliance ? 1 : 0;
  nlohmann::json best = nullptr;
  if (!a.empty()) best = {{"index", a.best}, {"robustness", a.points[a.best].robustness}};
  return {
      {"situation", c.situation},
      {"event", c.event},
      {"features", features},
      {"search", search},
      {"simulator_seeds", {{"policy", "fixed"}, {"base", c.seeds.base}, {"replicates", c.seeds.replicates}}},
      {"model_digest", model::model_digest(c.model)},
      {"scenario_digest", scenario_digest(c.scenario)},
      {"evaluations", a.points.size()},
      {"violations", a.violations.size()},
      {"non_compliance", non_compliant},
      {"best", best},
  };
}

}  // namespace cais::falsify
