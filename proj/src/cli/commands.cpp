#include <algorithm>
#include <ostream>

#include "cais/assurance.hpp"
#include "cais/cli.hpp"
#include "cais/error.hpp"
#include "cais/io.hpp"
#include "cais/sim.hpp"

namespace cais::cli {

namespace fs = std::filesystem;

namespace {

// Raised after diagnostics have already been written.
struct Reported : DomainError {
  Reported() : DomainError("") {}
};

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    if (*e.what()) err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::kIo ? kExitIo : kExitDomain;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitIo;
  }
}

model::RiskModel load_model(const fs::path& path, std::ostream& err) {
  const std::string text = io::read_file(path);
  try {
    return model::parse_risk_model(text);
  } catch (const model::ModelError& e) {
    for (const auto& d : e.diagnostics()) err << path.string() << ":" << d.to_string() << '\n';
    throw Reported();
  }
}

const model::Situation& resolve_situation(const model::RiskModel& m, const std::string& name) {
  if (name.empty()) {
    if (m.situations.empty()) throw DomainError("model declares no situation");
    return m.situations.front();
  }
  const auto* s = m.find_situation(name);
  if (!s) throw DomainError("unknown situation " + name);
  return *s;
}

fs::path resolve_scenario(const fs::path& given, const model::Situation& s, const fs::path& model_path) {
  if (!given.empty()) return given;
  if (s.scenario_ref.empty()) throw IoError("no scenario given and situation " + s.name + " names none");
  return model_path.parent_path() / s.scenario_ref;
}

sim::Scenario load_scenario(const fs::path& path) {
  return sim::parse_scenario(io::read_file(path), path.string());
}

void write(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_file_atomic(path, content);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string short_digest(const std::string& d) { return d.substr(0, 12); }

}  // namespace

int cmd_validate(const fs::path& model_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto m = load_model(model_path, err);
    out << model_path.string() << ": ok (" << m.actors.size() << " actors, " << m.goals.size() << " goals, "
        << m.features.size() << " features, " << m.events.size() << " events, " << m.situations.size()
        << " situations)\n";
    return kExitOk;
  });
}

int cmd_cases(const fs::path& model_path, const fs::path& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto m = load_model(model_path, err);
    const auto cases = model::derive_assurance_cases(m);
    if (cases.empty()) err << "warning: model has no negative event impacting a goal; no cases derived\n";
    write(out_path, dump(model::assurance_document(cases)));
    std::size_t claims = 0;
    for (const auto& c : cases) claims += c.sub_claims.size();
    out << cases.size() << " assurance cases, " << claims << " sub-claims -> " << out_path.string() << '\n';
    return kExitOk;
  });
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    CampaignConfig cfg = load_config(opts.config);
    if (opts.budget) cfg.search.budget = *opts.budget;
    if (opts.seed) cfg.search.seed = *opts.seed;
    if (opts.out) cfg.out = *opts.out;

    const fs::path model_path = cfg.model_path();
    falsify::Campaign c{load_model(model_path, err), {}, {}, {}, cfg.search, cfg.seeds};
    const auto& situation = resolve_situation(c.model, cfg.situation);
    c.situation = situation.name;
    const auto events = falsify::exposed_events(c.model, c.situation);
    c.event = cfg.event.empty() ? events.front() : cfg.event;
    c.scenario = load_scenario(resolve_scenario(cfg.scenario_path(), situation, model_path));
    cfg.situation = c.situation;
    cfg.event = c.event;

    if (c.search.budget == 0) {
      err << "error: budget is 0, no evaluations performed\n";
      return kExitEmpty;
    }
    try {
      falsify::check_config(c.search);
    } catch (const DomainError& e) {
      throw IoError(opts.config.string() + ": " + e.what());
    }

    const auto archive = falsify::run_campaign(c);
    if (archive.empty()) {
      err << "error: no evaluations performed\n";
      return kExitEmpty;
    }
    const auto space = falsify::make_feature_space(c.model, c.situation);
    const std::string csv = falsify::archive_csv(archive, space, events);

    nlohmann::json header = falsify::archive_header(c, archive);
    header["events"] = events;
    header["explain"] = {{"threshold", cfg.threshold},
                         {"tree",
                          {{"max_depth", cfg.tree.max_depth},
                           {"min_leaf", cfg.tree.min_leaf},
                           {"min_gain", cfg.tree.min_gain}}}};
    nlohmann::json identity = nlohmann::json::object();
    for (const char* k : {"situation", "event", "features", "search", "simulator_seeds", "model_digest",
                          "scenario_digest", "explain"}) {
      identity[k] = header[k];
    }
    header["campaign_digest"] = io::sha256_hex(identity.dump());
    header["config"] = to_json(cfg);
    header["archive_sha256"] = io::sha256_hex(csv);

    const fs::path dir = cfg.out;
    write(dir / "archive.csv", csv);
    write(dir / "archive.json", dump(header));

    const auto& best = archive.points[archive.best];
    out << "campaign " << short_digest(header["campaign_digest"]) << ": " << c.situation << " / " << c.event << ", "
        << falsify::to_string(c.search.algorithm) << " seed " << c.search.seed << '\n';
    out << "evaluations " << archive.points.size() << ", violations " << archive.violations.size() << ", non-compliant "
        << header["non_compliance"].get<std::size_t>();
    if (!archive.violations.empty()) out << ", first at #" << archive.violations.front();
    out << ", best robustness " << io::format_double(best.robustness) << " at #" << best.index << '\n';
    out << "archive " << (dir / "archive.csv").string() << '\n';
    return kExitOk;
  });
}

int cmd_explain(const ExplainOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string csv = io::read_file(opts.archive);
    fs::path header_path = opts.archive;
    header_path.replace_extension(".json");
    const auto header = nlohmann::json::parse(io::read_file(header_path));
    const auto m = load_model(opts.model, err);
    if (header.at("model_digest").get<std::string>() != model::model_digest(m)) {
      throw DomainError("model digest mismatch: archive was produced from a different model");
    }

    const auto situation = header.at("situation").get<std::string>();
    const auto event = header.at("event").get<std::string>();
    const auto space = falsify::make_feature_space(m, situation);
    const auto features = header.at("features").get<std::vector<std::string>>();
    std::vector<std::string> dims;
    for (const auto& d : space.dims()) dims.push_back(d.name);
    if (features != dims) throw DomainError("feature mismatch between archive header and model");

    const auto archive = falsify::parse_archive_csv(csv, space, event);
    if (archive.points.size() != header.at("evaluations").get<std::size_t>()) {
      throw IoError(opts.archive.string() + " has " + std::to_string(archive.points.size()) +
                    " rows but its header reports " + header.at("evaluations").dump());
    }

    const auto& ex = header.at("explain");
    const double threshold = opts.threshold.value_or(ex.at("threshold").get<double>());
    explain::TreeParams params;
    params.max_depth = ex.at("tree").at("max_depth").get<int>();
    params.min_leaf = ex.at("tree").at("min_leaf").get<int>();
    params.min_gain = ex.at("tree").at("min_gain").get<double>();
    const std::uint64_t seed = header.at("search").at("seed").get<std::uint64_t>();

    const auto data = explain::build_dataset(archive, space);
    const auto tree = explain::induce_tree(data, params);
    const auto rules = explain::extract_rules(tree, threshold);
    nlohmann::json augmentation = nlohmann::json::array();
    for (const auto& r : rules) {
      augmentation.push_back(explain::to_json(explain::generate_counterexamples(r, space, opts.augment, seed)));
    }

    std::map<std::string, model::Likelihood> estimates;
    const auto events = header.at("events").get<std::vector<std::string>>();
    for (const auto& e : events) {
      std::int64_t hits = 0;
      for (const auto& p : archive.points) hits += p.verdict.per_event.at(e).triggered ? 1 : 0;
      estimates[e] = {static_cast<double>(hits) / static_cast<double>(archive.points.size()),
                      static_cast<std::int64_t>(archive.points.size())};
    }
    const auto annotated = model::annotate_likelihoods(m, estimates);
    const auto overall = explain::estimate_event_likelihood(data);

    const fs::path dir = opts.out;
    const std::string model_name = opts.model.stem().string() + ".annotated.riskml";
    write(dir / "tree.json", dump(explain::to_json(tree)));
    write(dir / "rules.txt", explain::rules_report(rules));
    write(dir / "rules.json", dump(explain::to_json(rules)));
    write(dir / "augmentation.json", dump(augmentation));
    write(dir / model_name, model::serialize_model(annotated));

    std::size_t leaves = 0;
    for (const auto& n : tree.nodes) leaves += n.leaf ? 1 : 0;
    nlohmann::json top = nlohmann::json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(rules.size(), 5); ++i) top.push_back(explain::to_json(rules[i]));
    nlohmann::json per_event = nlohmann::json::object();
    for (const auto& [name, l] : estimates) per_event[name] = {{"fraction", l.fraction}, {"samples", l.samples}};
    const auto& best = archive.points[archive.best];
    nlohmann::json report = {
        {"campaign_digest", header.at("campaign_digest")},
        {"inputs",
         {{"archive_sha256", io::sha256_hex(csv)},
          {"model_digest", header.at("model_digest")},
          {"scenario_digest", header.at("scenario_digest")}}},
        {"situation", situation},
        {"event", event},
        {"search", header.at("search")},
        {"simulator_seeds", header.at("simulator_seeds")},
        {"evaluations",
         {{"budget", header.at("search").at("budget")},
          {"count", archive.points.size()},
          {"violations", archive.violations.size()},
          {"first_violation", archive.violations.empty() ? nlohmann::json(nullptr)
                                                         : nlohmann::json(archive.violations.front())},
          {"best_index", best.index},
          {"best_robustness", best.robustness}}},
        {"likelihood",
         {{"non_compliance", {{"fraction", overall.fraction}, {"samples", overall.samples}}}, {"events", per_event}}},
        {"threshold", threshold},
        {"tree", {{"depth", tree.depth()}, {"nodes", tree.nodes.size()}, {"leaves", leaves}}},
        {"rules", rules.size()},
        {"top_rules", top},
        {"artifacts",
         {{"tree", "tree.json"},
          {"rules", "rules.txt"},
          {"rules_json", "rules.json"},
          {"augmentation", "augmentation.json"},
          {"model", model_name},
          {"report", "report.json"}}},
    };
    write(dir / "report.json", dump(report));

    out << archive.points.size() << " evaluations, " << archive.violations.size() << " violations, "
        << "non-compliance likelihood " << io::format_double(overall.fraction) << " over " << overall.samples
        << " samples\n";
    out << rules.size() << " rules at threshold " << io::format_double(threshold) << '\n';
    out << explain::rules_report(rules);
    out << "report " << (dir / "report.json").string() << '\n';
    return kExitOk;
  });
}

int cmd_replay(const ReplayOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto m = load_model(opts.model, err);
    const auto& situation = resolve_situation(m, opts.situation);
    const auto scenario = load_scenario(resolve_scenario(opts.scenario, situation, opts.model));
    const auto assignment =
        assignment_from_json(nlohmann::json::parse(io::read_file(opts.assignment)), m);
    if (opts.replicates < 1) throw IoError("replicates must be >= 1");

    const falsify::SeedPolicy seeds{opts.seed, opts.replicates};
    const sim::Scenario bound = sim::bind_assignment(scenario, m, assignment);
    const sim::Trace trace = sim::simulate(bound, seeds.base);
    sim::Verdict verdict;
    if (seeds.replicates == 1) {
      verdict = sim::evaluate_events(trace.summary, m, situation.name);
    } else {
      const auto events = falsify::exposed_events(m, situation.name);
      verdict = falsify::make_evaluator(m, scenario, situation.name, events.front(), seeds)(assignment).verdict;
    }

    const nlohmann::json result = {
        {"situation", situation.name},
        {"assignment", cais::to_json(assignment)},
        {"seed", seeds.base},
        {"replicates", seeds.replicates},
        {"metrics", sim::to_json(trace.summary)},
        {"verdict", sim::to_json(verdict)},
    };
    const fs::path dir = opts.out;
    write(dir / "trace.csv", sim::trace_csv(trace));
    write(dir / "verdict.json", dump(result));

    out << sim::to_string(verdict.label);
    for (const auto& [name, o] : verdict.per_event) {
      out << ", " << name << " " << io::format_double(o.robustness) << (o.triggered ? " (triggered)" : "");
    }
    out << '\n';
    return kExitOk;
  });
}

}  // namespace cais::cli
