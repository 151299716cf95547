#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "cais/campaign.hpp"
#include "cais/error.hpp"
#include "cais/io.hpp"
#include "cais/rng.hpp"

using namespace cais;
using namespace cais::falsify;

namespace {

model::DomainFeature continuous(const std::string& name, double lo, double hi) {
  model::DomainFeature f;
  f.name = name;
  f.lo = lo;
  f.hi = hi;
  return f;
}

FeatureSpace unit_cube(int n) {
  std::vector<model::DomainFeature> d;
  for (int i = 0; i < n; ++i) d.push_back(continuous("x" + std::to_string(i), 0.0, 1.0));
  return FeatureSpace(d);
}

Evaluation sphere(const FeatureAssignment& a) {
  double r = 0.0;
  for (const auto& [k, v] : a) r += (std::get<double>(v) - 0.5) * (std::get<double>(v) - 0.5);
  return {r, {}, 0};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

model::RiskModel default_model() { return model::parse_risk_model(io::read_file(CAIS_DATA_DIR "/default_model.riskml")); }

}  // namespace

TEST_CASE("feature space from the default model") {
  const auto m = default_model();
  const auto s = make_feature_space(m, "close_collaboration");
  REQUIRE(s.size() == 6);
  const char* names[] = {"illuminance", "belt_speed", "hand_intrusion", "operator_speed", "contrast", "camera_yaw"};
  for (std::size_t i = 0; i < 6; ++i) CHECK(s.dim(i).name == names[i]);
  CHECK(s.index_of("contrast") == 4);
  CHECK_THROWS_AS(make_feature_space(m, "nowhere"), DomainError);
}

TEST_CASE("single categorical dimension") {
  model::DomainFeature f;
  f.name = "colour";
  f.kind = model::FeatureKind::kCategorical;
  f.categories = {"red", "green"};
  const FeatureSpace s({f});
  CHECK(s.size() == 1);
  CHECK(std::get<std::string>(s.decode({0.2}).at("colour")) == "red");
  CHECK(std::get<std::string>(s.decode({0.7}).at("colour")) == "green");
  CHECK(std::get<std::string>(s.decode({1.0}).at("colour")) == "green");
  CHECK(s.encode({{"colour", std::string("green")}}) == std::vector<double>{0.75});
}

TEST_CASE("encode and decode are inverse on the domain") {
  model::DomainFeature n = continuous("n", -3.0, 4.0);
  n.kind = model::FeatureKind::kInteger;
  model::DomainFeature c;
  c.name = "c";
  c.kind = model::FeatureKind::kCategorical;
  c.categories = {"a", "b", "c"};
  const FeatureSpace s({continuous("x", 10.0, 1000.0), n, c});
  Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    FeatureAssignment a{{"x", rng.uniform(10.0, 1000.0)},
                        {"n", static_cast<std::int64_t>(rng.below(8)) - 3},
                        {"c", c.categories[rng.below(3)]}};
    const auto back = s.decode(s.encode(a));
    CHECK(std::get<double>(back.at("x")) == doctest::Approx(std::get<double>(a.at("x"))).epsilon(1e-12));
    CHECK(back.at("n") == a.at("n"));
    CHECK(back.at("c") == a.at("c"));
  }
  const auto lo = s.decode({-0.5, -1.0, -2.0});
  CHECK(std::get<double>(lo.at("x")) == 10.0);
  CHECK(std::get<std::int64_t>(lo.at("n")) == -3);
  CHECK_THROWS_AS(s.encode({{"x", 5.0}, {"n", std::int64_t{0}}, {"c", std::string("a")}}), DomainError);
}

TEST_CASE("search configuration is checked") {
  SearchConfig c;
  c.budget = 0;
  CHECK_THROWS_WITH_AS(check_config(c), "budget must be >= 1", DomainError);
  c = {};
  c.sigma = 0.0;
  CHECK_THROWS_AS(check_config(c), DomainError);
  c = {};
  c.alpha = 1.0;
  CHECK_THROWS_AS(check_config(c), DomainError);
  c = {};
  c.t0 = -1.0;
  CHECK_THROWS_AS(check_config(c), DomainError);
  CHECK(parse_algorithm("simulated_annealing") == Algorithm::kSimulatedAnnealing);
  CHECK_THROWS_AS(parse_algorithm("tabu"), DomainError);
}

TEST_CASE("archive bookkeeping") {
  const auto space = unit_cube(2);
  for (auto alg : {Algorithm::kRandom, Algorithm::kHillClimb, Algorithm::kSimulatedAnnealing, Algorithm::kGenetic}) {
    CAPTURE(to_string(alg));
    SearchConfig c;
    c.algorithm = alg;
    c.budget = 1;
    const auto one = run_search(space, sphere, c);
    CHECK(one.points.size() == 1);
    CHECK(one.best == 0);

    c.budget = 50;
    int calls = 0;
    const auto flat = run_search(space, [&](const FeatureAssignment&) { ++calls; return Evaluation{1.0, {}, 0}; }, c);
    CHECK(calls == 50);
    CHECK(flat.points.size() == 50);
    CHECK(flat.violations.empty());
    CHECK(flat.best == 0);

    c.budget = 120;
    const auto shifted = run_search(space, [](const FeatureAssignment& a) {
      return Evaluation{std::get<double>(a.at("x0")) - 0.3, {}, 0};
    }, c);
    std::vector<std::size_t> negatives;
    double lowest = 1e9;
    for (std::size_t i = 0; i < shifted.points.size(); ++i) {
      CHECK(shifted.points[i].index == i);
      if (shifted.points[i].robustness < 0.0) negatives.push_back(i);
      lowest = std::min(lowest, shifted.points[i].robustness);
    }
    CHECK(shifted.violations == negatives);
    CHECK(shifted.points[shifted.best].robustness == lowest);
    for (std::size_t i = 0; i < shifted.best; ++i) CHECK(shifted.points[i].robustness > lowest);
    CHECK(shifted.first_violation() == (negatives.empty() ? shifted.points.size() : negatives.front()));

    c.stop_at_first_violation = true;
    const auto early = run_search(space, [](const FeatureAssignment& a) {
      return Evaluation{std::get<double>(a.at("x0")) - 0.3, {}, 0};
    }, c);
    if (!early.violations.empty()) CHECK(early.points.size() == early.violations.front() + 1);
  }
}

TEST_CASE("random search is uniform") {
  const auto space = unit_cube(3);
  SearchConfig c;
  c.budget = 3000;
  c.seed = 9;
  const auto a = run_search(space, sphere, c);
  const double tol = 3.0 * std::sqrt(1.0 / 12.0 / c.budget);
  for (int d = 0; d < 3; ++d) {
    double sum = 0.0;
    int low = 0;
    for (const auto& p : a.points) {
      const double x = std::get<double>(p.assignment.at("x" + std::to_string(d)));
      sum += x;
      low += x < 0.25 ? 1 : 0;
    }
    CHECK(std::abs(sum / c.budget - 0.5) < tol);
    CHECK(std::abs(low / static_cast<double>(c.budget) - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / c.budget));
  }
}

TEST_CASE("hill climbing converges on a sphere") {
  const auto space = unit_cube(3);
  std::vector<double> best;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SearchConfig c;
    c.algorithm = Algorithm::kHillClimb;
    c.budget = 300;
    c.seed = seed;
    const auto a = run_search(space, sphere, c);
    best.push_back(a.points[a.best].robustness);
  }
  CHECK(median(best) <= 1e-3);
}

TEST_CASE("search runs are reproducible and share their first point") {
  const auto space = unit_cube(4);
  SearchConfig c;
  c.budget = 80;
  c.seed = 31;
  const auto r = run_search(space, sphere, c);
  c.algorithm = Algorithm::kHillClimb;
  const auto h1 = run_search(space, sphere, c);
  const auto h2 = run_search(space, sphere, c);
  CHECK(r.points[0].assignment == h1.points[0].assignment);
  for (std::size_t i = 0; i < h1.points.size(); ++i) CHECK(h1.points[i].assignment == h2.points[i].assignment);

  SUBCASE("annealing at near-zero temperature is hill climbing") {
    c.algorithm = Algorithm::kSimulatedAnnealing;
    c.t0 = 1e-12;
    const auto s = run_search(space, sphere, c);
    REQUIRE(s.points.size() == h1.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i) CHECK(s.points[i].assignment == h1.points[i].assignment);
  }
  SUBCASE("genetic result does not depend on thread count") {
    c.algorithm = Algorithm::kGenetic;
    c.population = 10;
    const auto g1 = run_search(space, sphere, c);
    c.threads = 4;
    const auto g4 = run_search(space, sphere, c);
    REQUIRE(g1.points.size() == g4.points.size());
    for (std::size_t i = 0; i < g1.points.size(); ++i) CHECK(g1.points[i].assignment == g4.points[i].assignment);
  }
}

TEST_CASE("campaigns over the default cell") {
  const auto m = default_model();
  const auto s = sim::parse_scenario(io::read_file(CAIS_DATA_DIR "/default_cell.scenario"));
  CHECK_THROWS_WITH_AS(make_evaluator(m, s, "close_collaboration", "missing", {}),
                       "event missing is not exposed by situation close_collaboration", DomainError);
  Campaign c{m, s, "close_collaboration", "insufficient_distance", {}, {}};
  c.search.budget = 0;
  CHECK_THROWS_AS(run_campaign(c), DomainError);

  c.search.algorithm = Algorithm::kHillClimb;
  c.search.budget = 200;
  c.search.seed = 7;
  const auto a = run_campaign(c);
  CHECK(a.points.size() == 200);
  CHECK(!a.violations.empty());
  for (const auto& p : a.points) {
    CHECK(p.robustness == p.verdict.per_event.at("insufficient_distance").robustness);
    CHECK(p.seed == 1);
  }

  const auto space = make_feature_space(m, c.situation);
  const auto events = exposed_events(m, c.situation);
  const std::string csv = archive_csv(a, space, events);
  const auto back = parse_archive_csv(csv, space, c.event);
  REQUIRE(back.points.size() == a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(back.points[i].assignment == a.points[i].assignment);
    CHECK(back.points[i].robustness == a.points[i].robustness);
    CHECK(back.points[i].verdict == a.points[i].verdict);
  }
  CHECK(archive_csv(back, space, events) == csv);
  CHECK(back.violations == a.violations);

  const auto header = archive_header(c, a);
  CHECK(header.at("evaluations") == 200);
  CHECK(header.at("simulator_seeds").at("policy") == "fixed");
  CHECK(header.at("model_digest") == model::model_digest(m));

  SUBCASE("replicates average robustness over derived seeds") {
    const SeedPolicy two{1, 2};
    CHECK(two.seed_for(0) == 1);
    CHECK(two.seed_for(1) == derive_seed(1, 1));
    const FeatureAssignment x = a.points[0].assignment;
    const auto e = make_evaluator(m, s, c.situation, c.event, two)(x);
    const auto bound = sim::bind_assignment(s, m, x);
    const double r0 = sim::simulate(bound, two.seed_for(0)).summary.min_margin;
    const double r1 = sim::simulate(bound, two.seed_for(1)).summary.min_margin;
    CHECK(e.robustness == doctest::Approx((r0 + r1) / 2.0));
  }
  SUBCASE("malformed archives are rejected") {
    CHECK_THROWS_AS(parse_archive_csv("", space, c.event), IoError);
    std::string bad = csv;
    bad.replace(bad.find("\n1,"), 3, "\n7,");
    CHECK_THROWS_AS(parse_archive_csv(bad, space, c.event), IoError);
  }
}
