#include <cmath>

#include "doctest.h"

#include "cais/error.hpp"
#include "cais/io.hpp"
#include "cais/rng.hpp"
#include "cais/sim.hpp"

using namespace cais;
using namespace cais::sim;

namespace {

model::RiskModel default_model() { return model::parse_risk_model(io::read_file(CAIS_DATA_DIR "/default_model.riskml")); }
Scenario default_scenario() { return parse_scenario(io::read_file(CAIS_DATA_DIR "/default_cell.scenario")); }

}  // namespace

TEST_CASE("protective distance") {
  ControllerParams c;
  c.reaction_time = 0.1;
  c.human_speed = 1.6;
  c.clearance = 0.1;
  CHECK(protective_distance(1.0, c, 2.0) == doctest::Approx(0.16 + 0.10 + 0.25 + 0.10).epsilon(1e-14));
  CHECK(protective_distance(0.5, c, 2.0) < protective_distance(1.0, c, 2.0));
  c.human_speed = 0.0;
  c.reaction_time = 0.7;
  CHECK(protective_distance(0.0, c, 2.0) == 0.1);
  CHECK_THROWS_WITH_AS(protective_distance(1.0, c, 0.0), "non-braking robot", DomainError);
}

TEST_CASE("detection probability") {
  PerceptionParams p;
  p.p_base = 0.99;
  CHECK(detection_probability(100.0, 0.7, 0.2, p) == 0.0);
  CHECK(detection_probability(50.0, 1.0, 0.0, p) == 0.0);
  CHECK(detection_probability(1000.0, 1.0, 0.0, p) == doctest::Approx(0.99));
  CHECK(detection_probability(400.0, 1.0, 1.0, p) == 0.0);
  CHECK(detection_probability(400.0, 0.0, 0.0, p) == 0.0);
  p.p_base = 1.0;
  CHECK(detection_probability(316.2, 1.0, 0.0, p) == doctest::Approx(0.5).epsilon(1e-4));
  // Log gate of 562.34 lux is 0.75; contrast 0.5 with gamma 2 gives 0.25.
  p.contrast_gamma = 2.0;
  CHECK(detection_probability(std::pow(10.0, 2.75), 0.5, 0.5, p) == doctest::Approx(0.75 * 0.25 * 0.5));

  SUBCASE("nondecreasing in illuminance") {
    PerceptionParams q;
    double prev = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double e = 10.0 * std::pow(10.0, i / 100.0);
      const double d = detection_probability(e, 0.8, 0.1, q);
      CHECK(d >= prev);
      CHECK(d <= 1.0);
      prev = d;
    }
  }
}

TEST_CASE("occlusion fraction") {
  CameraParams cam;
  cam.position = {0.0, 0.0};
  cam.yaw = 0.0;
  cam.fov_half_angle = 0.5;
  const Blockers none;
  CHECK(occlusion_fraction(cam, {0.0, 1.0}, none) == 1.0);
  CHECK(occlusion_fraction(cam, {1.0, 0.0}, none) == 0.0);

  // A link across the ray, wider than the hand disc, hides every sample.
  Blockers wall;
  wall.segments.push_back({{{0.5, -0.3}, {0.5, 0.3}}, kLinkRadius});
  CHECK(occlusion_fraction(cam, {1.0, 0.0}, wall) == 1.0);

  // A disc at the camera's side of the hand blocks part of it.
  Blockers small;
  small.discs.push_back({{0.9, 0.04}, 0.02});
  const double f = occlusion_fraction(cam, {1.0, 0.0}, small);
  CHECK(f > 0.0);
  CHECK(f < 1.0);
  CHECK(std::fmod(f * kOcclusionSamples, 1.0) == 0.0);
}

TEST_CASE("event robustness is sign-normalized") {
  model::Condition lt{"min_margin", model::CompareOp::kLess, 0.0};
  CHECK(robustness(lt, 0.23) == doctest::Approx(0.23));
  CHECK(robustness(lt, -0.05) == doctest::Approx(-0.05));
  model::Condition gt{"objects_fallen", model::CompareOp::kGreater, 0.0};
  CHECK(robustness(gt, 2.0) == -2.0);
  CHECK(robustness(gt, 0.0) == 0.0);
}

TEST_CASE("verdict label follows negative events") {
  const auto m = default_model();
  TraceMetrics t;
  t.min_margin = 0.2;
  t.min_distance = 0.3;
  Verdict v = evaluate_events(t, m, "close_collaboration");
  CHECK(v.label == Label::kCompliance);
  CHECK_FALSE(v.per_event.at("insufficient_distance").triggered);
  t.min_margin = -0.01;
  v = evaluate_events(t, m, "close_collaboration");
  CHECK(v.label == Label::kNonCompliance);
  CHECK(v.per_event.at("insufficient_distance").triggered);
  CHECK(v.per_event.at("insufficient_distance").robustness == doctest::Approx(-0.01));
  CHECK_FALSE(v.per_event.at("contact").triggered);
  CHECK_THROWS_AS(evaluate_events(t, m, "nowhere"), DomainError);
}

TEST_CASE("binding writes features through to the scenario") {
  const auto m = default_model();
  const auto s = default_scenario();
  CHECK(bind_assignment(s, m, {}) == s);
  const auto b = bind_assignment(s, m, {{"belt_speed", 0.5}});
  CHECK(b.belt.speed == 0.5);
  Scenario expect = s;
  expect.belt.speed = 0.5;
  CHECK(b == expect);
  CHECK(bind_assignment(s, m, {{"illuminance", 20.0}}).environment.illuminance == 20.0);
  CHECK_THROWS_AS(bind_assignment(s, m, {{"illuminance", 1e6}}), DomainError);
  CHECK_THROWS_AS(bind_assignment(s, m, {{"nope", 1.0}}), DomainError);
}

TEST_CASE("scenario file round-trip and invariants") {
  const auto s = default_scenario();
  CHECK(s == Scenario{});
  CHECK(parse_scenario(serialize_scenario(s)) == s);
  CHECK_THROWS_AS(parse_scenario("belt.colour = red\n"), IoError);
  CHECK_THROWS_AS(parse_scenario("dt = 0\n"), DomainError);
  CHECK_THROWS_AS(parse_scenario("camera.fov_half_angle = 4\n"), DomainError);
  CHECK_THROWS_AS(parse_scenario("perception.e_min = 2000\n"), DomainError);
  CHECK_THROWS_AS(parse_scenario("arm.a_max = 0.5\n"), DomainError);
}

TEST_CASE("simulation traces are well formed and deterministic") {
  const auto m = default_model();
  const auto s = default_scenario();
  const Trace a = simulate(s, 3);
  const Trace b = simulate(s, 3);
  REQUIRE(a.steps.size() == static_cast<std::size_t>(std::floor(s.duration / s.dt + 1e-9)));
  CHECK(trace_csv(a) == trace_csv(b));
  double prev = 0.0;
  int misses = 0;
  for (const auto& st : a.steps) {
    CHECK(st.t > prev);
    CHECK(st.d >= 0.0);
    CHECK(st.s_p >= s.controller.clearance);
    prev = st.t;
    misses += st.detected ? 0 : 1;
  }
  const auto& sum = a.summary;
  CHECK(sum.min_distance >= 0.0);
  CHECK(sum.min_margin <= sum.min_distance);
  CHECK(sum.detection_miss_ratio >= 0.0);
  CHECK(sum.detection_miss_ratio <= 1.0);
  CHECK(trace_csv(a).rfind("t,d,S_p,v_r,detected,ee_x,ee_y,hand_x,hand_y", 0) == 0);

  SUBCASE("operator who never approaches") {
    Scenario q = s;
    q.op.approach_time = q.duration + 1.0;
    const Trace t = simulate(q, 5);
    CHECK(t.summary.collision == 0);
    CHECK(t.summary.min_distance > 0.3);
    for (const auto& st : t.steps) CHECK(st.hand == q.op.start);
  }
}

TEST_CASE("nominal light: slow belt complies, fast belt with deep reach does not") {
  const auto m = default_model();
  const auto s = default_scenario();
  CHECK(s.environment.illuminance == 5000.0);
  const auto slow = simulate(bind_assignment(s, m, {{"belt_speed", 0.1}}), 1);
  CHECK(evaluate_events(slow.summary, m, "close_collaboration").label == Label::kCompliance);
  CHECK(slow.summary.min_margin > 0.0);
  const auto fast = simulate(bind_assignment(s, m, {{"belt_speed", 0.5}, {"hand_intrusion", 0.4}}), 1);
  const auto v = evaluate_events(fast.summary, m, "close_collaboration");
  CHECK(v.label == Label::kNonCompliance);
  CHECK(v.per_event.at("insufficient_distance").triggered);
  CHECK(fast.summary.objects_fallen >= 1);
}

TEST_CASE("perfect perception keeps the protective distance") {
  const auto m = default_model();
  Scenario s = default_scenario();
  s.perception.p_base = 1.0;
  s.perception.occlusion = false;
  s.environment.illuminance = s.perception.e_sat;
  s.environment.contrast = 1.0;
  Rng rng(77);
  for (int k = 0; k < 40; ++k) {
    Scenario q = s;
    q.belt.speed = rng.uniform(0.1, 0.5);
    q.op.intrusion = rng.uniform(0.1, 0.45);
    q.op.hand_speed = rng.uniform(0.2, 1.2);
    q.camera.yaw = rng.uniform(-0.45, -0.28);
    CHECK(simulate(q, static_cast<std::uint64_t>(k)).summary.min_margin >= 0.0);
  }
}
