#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "cais/io.hpp"
#include "cais/metrics.hpp"
#include "cais/rng.hpp"
#include "cais/sim.hpp"

namespace cais::sim {

using geom::dist;
using geom::norm;
using geom::Segment;

double protective_distance(double robot_speed, const ControllerParams& c, double a_brake) {
  if (!(a_brake > 0.0)) throw DomainError("non-braking robot");
  if (!(robot_speed >= 0.0)) throw DomainError("robot speed must be >= 0");
  return c.human_speed * c.reaction_time + robot_speed * c.reaction_time +
         robot_speed * robot_speed / (2.0 * a_brake) + c.clearance;
}

double detection_probability(double illuminance, double contrast, double occlusion, const PerceptionParams& p) {
  if (!(illuminance > 0.0)) throw DomainError("illuminance must be > 0");
  if (!(contrast >= 0.0 && contrast <= 1.0)) throw DomainError("contrast must be in [0, 1]");
  if (!(occlusion >= 0.0 && occlusion <= 1.0)) throw DomainError("occlusion must be in [0, 1]");
  if (illuminance <= p.e_min || occlusion >= 1.0 || contrast <= 0.0) return 0.0;
  const double ramp = (std::log10(illuminance) - std::log10(p.e_min)) / (std::log10(p.e_sat) - std::log10(p.e_min));
  const double gate = std::clamp(ramp, 0.0, 1.0);
  return std::clamp(p.p_base * gate * std::pow(contrast, p.contrast_gamma) * (1.0 - occlusion), 0.0, 1.0);
}

double occlusion_fraction(const CameraParams& camera, Vec2 hand, const Blockers& blockers) {
  const Vec2 to_hand = hand - camera.position;
  if (norm(to_hand) == 0.0) return 1.0;
  const double bearing = std::atan2(to_hand.y, to_hand.x);
  if (std::abs(geom::wrap_angle(bearing - camera.yaw)) > camera.fov_half_angle) return 1.0;

  int blocked = 0;
  for (int i = 0; i < kOcclusionSamples; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / kOcclusionSamples;
    const Segment ray{camera.position, hand + kHandRadius * Vec2{std::cos(ang), std::sin(ang)}};
    const bool hit =
        std::any_of(blockers.segments.begin(), blockers.segments.end(),
                    [&](const ThickSegment& s) { return geom::segment_segment_distance(ray, s.seg) <= s.radius; }) ||
        std::any_of(blockers.discs.begin(), blockers.discs.end(),
                    [&](const Disc& d) { return geom::point_segment_distance(d.center, ray) <= d.radius; });
    if (hit) ++blocked;
  }
  return static_cast<double>(blocked) / kOcclusionSamples;
}

double TraceMetrics::value(std::string_view metric) const {
  if (metric == "min_margin") return min_margin;
  if (metric == "min_distance") return min_distance;
  if (metric == "objects_fallen") return objects_fallen;
  if (metric == "detection_miss_ratio") return detection_miss_ratio;
  if (metric == "collision") return collision;
  throw DomainError("condition references unknown metric " + std::string(metric));
}

namespace {

/// Parking / repositioning speed when no object puts the robot under time pressure.
constexpr double kIdleSpeed = 0.3;

enum class ObjState { kPending, kOnBelt, kHeld, kPlaced, kFallen };

struct Object {
  double spawn_time = 0.0;
  ObjState state = ObjState::kPending;
  Vec2 pos;
};

class Cell {
 public:
  Cell(const Scenario& s, std::uint64_t seed) : s_(s), rng_(derive_seed(seed, 0x5eed)) {
    belt_dir_ = (1.0 / dist(s.belt.start, s.belt.end)) * (s.belt.end - s.belt.start);
    belt_len_ = dist(s.belt.start, s.belt.end);
    reach_ = s.arm.link1 + s.arm.link2;

    // Pick station: the belt point closest to the arm base.
    const double s_proj = std::clamp(geom::dot(s.arm.base - s.belt.start, belt_dir_), 0.0, belt_len_);
    pick_s_ = s_proj;
    pick_ = clamp_reach(belt_point(pick_s_));
    const double offset = dist(s.arm.base, belt_point(s_proj));
    const double r = 0.995 * reach_;
    const double half = offset < r ? std::sqrt(r * r - offset * offset) : 0.0;
    reach_end_s_ = std::min(belt_len_, s_proj + half);

    for (int k = 0; k < s.belt.object_count; ++k) objects_.push_back({k * s.belt.spawn_interval, ObjState::kPending, {}});

    ee_ = clamp_reach(s.arm.bin);
    elbow_ = solve_elbow(ee_);

    // The hand approaches along the normal from the torso to the belt line.
    const Vec2 foot = belt_point(geom::dot(s.op.start - s.belt.start, belt_dir_));
    const Vec2 to_belt = foot - s.op.start;
    approach_dir_ = norm(to_belt) > 0.0 ? (1.0 / norm(to_belt)) * to_belt : Vec2{0.0, -1.0};
  }

  Trace run() {
    const auto n = static_cast<std::size_t>(std::floor(s_.duration / s_.dt + 1e-9));
    Trace trace;
    trace.steps.reserve(n);
    double min_margin = std::numeric_limits<double>::infinity();
    double min_d = std::numeric_limits<double>::infinity();
    std::size_t misses = 0;

    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k + 1) * s_.dt;
      advance_belt(t);
      const Vec2 hand = hand_at(t);
      const bool detected = perceive(hand, k);
      if (!detected) ++misses;
      control(t, k);

      TraceStep st;
      st.t = t;
      st.d = std::min(distance_to_arm(hand), distance_to_arm(s_.op.start));
      st.v_r = speed_;
      st.s_p = protective_distance(speed_, s_.controller, s_.arm.a_brake);
      st.detected = detected;
      st.ee = ee_;
      st.elbow = elbow_;
      st.hand = hand;
      st.objects_on_belt = static_cast<int>(std::count_if(
          objects_.begin(), objects_.end(), [](const Object& o) { return o.state == ObjState::kOnBelt; }));
      min_margin = std::min(min_margin, st.d - st.s_p);
      min_d = std::min(min_d, st.d);
      trace.steps.push_back(st);
    }

    TraceMetrics& m = trace.summary;
    m.min_margin = min_margin;
    m.min_distance = min_d;
    m.objects_fallen = fallen_;
    m.detection_miss_ratio = n ? static_cast<double>(misses) / static_cast<double>(n) : 0.0;
    m.collision = min_d < kContactEpsilon ? 1 : 0;
    return trace;
  }

 private:
  Vec2 belt_point(double along) const { return s_.belt.start + along * belt_dir_; }

  Vec2 clamp_reach(Vec2 p) const {
    const Vec2 d = p - s_.arm.base;
    const double r = norm(d);
    const double r_max = 0.995 * reach_;
    const double r_min = std::max(std::abs(s_.arm.link1 - s_.arm.link2), 0.05 * reach_) * 1.005;
    if (r == 0.0) return s_.arm.base + Vec2{0.0, r_min};
    if (r > r_max) return s_.arm.base + (r_max / r) * d;
    if (r < r_min) return s_.arm.base + (r_min / r) * d;
    return p;
  }

  /// Elbow of the two-link arm for end-effector `ee`, always on the
  /// clockwise side of the base->ee direction.
  Vec2 solve_elbow(Vec2 ee) const {
    const Vec2 d = ee - s_.arm.base;
    const double r = norm(d);
    const double l1 = s_.arm.link1;
    const double l2 = s_.arm.link2;
    const double a = (l1 * l1 - l2 * l2 + r * r) / (2.0 * r);
    const double h = std::sqrt(std::max(0.0, l1 * l1 - a * a));
    const Vec2 unit = (1.0 / r) * d;
    return s_.arm.base + a * unit + h * Vec2{unit.y, -unit.x};
  }

  double distance_to_arm(Vec2 p) const {
    return std::min(geom::point_segment_distance(p, {s_.arm.base, elbow_}),
                    geom::point_segment_distance(p, {elbow_, ee_}));
  }

  void advance_belt(double t) {
    for (auto& o : objects_) {
      if (o.state == ObjState::kPending && t >= o.spawn_time) o.state = ObjState::kOnBelt;
      if (o.state != ObjState::kOnBelt) continue;
      const double along = (t - o.spawn_time) * s_.belt.speed;
      if (along > belt_len_) {
        o.state = ObjState::kFallen;
        ++fallen_;
        continue;
      }
      o.pos = belt_point(along);
    }
  }

  Vec2 hand_at(double t) const {
    const auto& op = s_.op;
    double depth = 0.0;
    if (t > op.approach_time && op.hand_speed > 0.0) {
      const double t_full = op.approach_time + op.intrusion / op.hand_speed;
      if (t <= t_full) {
        depth = op.hand_speed * (t - op.approach_time);
      } else if (t <= t_full + op.dwell) {
        depth = op.intrusion;
      } else {
        depth = std::max(0.0, op.intrusion - op.hand_speed * (t - t_full - op.dwell));
      }
    }
    return op.start + std::min(depth, op.intrusion) * approach_dir_;
  }

  bool perceive(Vec2 hand, std::size_t step) {
    double occ = 0.0;
    if (s_.perception.occlusion) {
      Blockers b;
      b.segments.push_back({{s_.arm.base, elbow_}, kLinkRadius});
      b.segments.push_back({{elbow_, ee_}, kLinkRadius});
      for (const auto& o : objects_) {
        if (o.state == ObjState::kOnBelt || o.state == ObjState::kHeld) b.discs.push_back({o.pos, kObjectRadius});
      }
      occ = occlusion_fraction(s_.camera, hand, b);
    }
    const double e = std::max(s_.environment.illuminance, std::numeric_limits<double>::min());
    const double p = detection_probability(e, s_.environment.contrast, occ, s_.perception);
    const bool detected = rng_.uniform() < p;
    if (detected) {
      last_seen_ = hand;
      last_seen_step_ = step;
    }
    return detected;
  }

  std::optional<Vec2> perceived_hand(std::size_t step) const {
    if (!last_seen_) return std::nullopt;
    if (step - last_seen_step_ > static_cast<std::size_t>(s_.perception.miss_horizon)) return std::nullopt;
    return last_seen_;
  }

  /// Time until object `o` reaches the pick station (0 once it is there).
  double arrival_in(const Object& o, double t) const {
    if (s_.belt.speed <= 0.0) return std::numeric_limits<double>::infinity();
    return std::max(0.0, o.spawn_time + pick_s_ / s_.belt.speed - t);
  }

  double along(const Object& o, double t) const { return (t - o.spawn_time) * s_.belt.speed; }

  /// Next object the arm can still intercept, in belt order.
  Object* next_candidate(double t) {
    for (auto& o : objects_) {
      if (o.state == ObjState::kPending) return &o;
      if (o.state == ObjState::kOnBelt && along(o, t) <= reach_end_s_) return &o;
    }
    return nullptr;
  }

  /// Largest speed whose conservative stopping envelope fits in the
  /// perceived separation: the protective distance, plus the distance the
  /// human covers while the arm brakes, plus one step of look-ahead.
  double ssm_speed_limit(double perceived_d) const {
    const auto& c = s_.controller;
    const double a = s_.arm.a_brake;
    const double qa = 1.0 / (2.0 * a);
    const double qb = c.reaction_time + c.human_speed / a + s_.dt;
    const double qc = c.human_speed * c.reaction_time + c.clearance + c.human_speed * s_.dt - perceived_d;
    if (qc >= 0.0) return 0.0;
    return (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
  }

  void control(double t, std::size_t step) {
    const double a = s_.arm.a_max;
    const double u = s_.belt.speed;
    Vec2 target = s_.arm.bin;
    double v_task = kIdleSpeed;

    if (held_) {
      held_->pos = ee_;
      if (dist(ee_, s_.arm.bin) <= s_.arm.pick_radius) {
        held_->state = ObjState::kPlaced;
        held_ = nullptr;
      }
    }
    if (!held_) {
      if (Object* c = next_candidate(t); c && c->state == ObjState::kOnBelt && dist(ee_, c->pos) <= s_.arm.pick_radius) {
        c->state = ObjState::kHeld;
        held_ = c;
      }
    }

    if (held_) {
      target = s_.arm.bin;
      held_->pos = ee_;
      const Object* next = next_candidate(t);
      if (next) {
        const double path = dist(ee_, s_.arm.bin) + dist(s_.arm.bin, pick_);
        v_task = path / std::max(arrival_in(*next, t), s_.dt);
      }
      v_task = std::min(v_task, std::sqrt(2.0 * a * dist(ee_, target)));
    } else if (const Object* c = next_candidate(t)) {
      if (c->state == ObjState::kPending || along(*c, t) < pick_s_) {
        target = pick_;
        v_task = dist(ee_, pick_) / std::max(arrival_in(*c, t), s_.dt);
        v_task = std::min(v_task, std::sqrt(2.0 * a * dist(ee_, target)));
      } else {
        // Late: chase the object before it leaves the reachable stretch.
        target = clamp_reach(c->pos);
        const double left = u > 0.0 ? (reach_end_s_ - along(*c, t)) / u : 0.0;
        v_task = dist(ee_, target) / std::max(left, s_.dt) + u;
        v_task = std::min(v_task, std::sqrt(2.0 * a * dist(ee_, target)) + u);
      }
    } else {
      v_task = std::min(v_task, std::sqrt(2.0 * a * dist(ee_, target)));
    }
    v_task = std::min(v_task, s_.arm.v_max);

    double v_allow = std::numeric_limits<double>::infinity();
    if (const auto seen = perceived_hand(step)) {
      if (s_.controller.mode == ControlMode::kSsm) {
        v_allow = ssm_speed_limit(distance_to_arm(*seen));
      } else if (dist(*seen, s_.arm.base) < reach_ + s_.controller.clearance) {
        v_allow = 0.0;
      }
    }

    const double v_des = std::min(v_task, v_allow);
    const double v_cmd = std::clamp(v_des, std::max(0.0, speed_ - a * s_.dt), speed_ + a * s_.dt);
    move_toward(target, v_cmd);
  }

  /// Moves the end-effector toward `target` so that no arm point travels
  /// faster than `v_cmd`; updates the measured arm speed.
  void move_toward(Vec2 target, double v_cmd) {
    const Vec2 goal = clamp_reach(target);
    const double gap = dist(ee_, goal);
    const double budget = v_cmd * s_.dt;
    if (gap <= 0.0 || budget <= 0.0) {
      speed_ = 0.0;
      return;
    }
    const Vec2 dir = (1.0 / gap) * (goal - ee_);
    double step_len = std::min(budget, gap);
    Vec2 ee = ee_;
    Vec2 elbow = elbow_;
    double disp = 0.0;
    for (int iter = 0; iter < 6; ++iter) {
      ee = clamp_reach(ee_ + step_len * dir);
      elbow = solve_elbow(ee);
      disp = std::max(dist(ee, ee_), dist(elbow, elbow_));
      if (disp <= budget * (1.0 + 1e-9)) break;
      step_len *= budget / disp;
    }
    if (disp > budget * (1.0 + 1e-9)) {
      // Near a singular pose the elbow cannot follow; hold still instead.
      speed_ = 0.0;
      return;
    }
    ee_ = ee;
    elbow_ = elbow;
    speed_ = disp / s_.dt;
    if (held_) held_->pos = ee_;
  }

  const Scenario& s_;
  Rng rng_;
  Vec2 belt_dir_;
  double belt_len_ = 0.0;
  double reach_ = 0.0;
  double pick_s_ = 0.0;
  Vec2 pick_;
  double reach_end_s_ = 0.0;
  std::vector<Object> objects_;
  Object* held_ = nullptr;
  int fallen_ = 0;
  Vec2 ee_;
  Vec2 elbow_;
  double speed_ = 0.0;
  Vec2 approach_dir_;
  std::optional<Vec2> last_seen_;
  std::size_t last_seen_step_ = 0;
};

}  // namespace

Trace simulate(const Scenario& scenario, std::uint64_t seed) {
  if (const auto errs = check_scenario(scenario); !errs.empty()) {
    std::string msg = "invalid scenario";
    for (const auto& e : errs) msg += "; " + e;
    throw DomainError(msg);
  }
  protective_distance(0.0, scenario.controller, scenario.arm.a_brake);
  return Cell(scenario, seed).run();
}

std::string_view to_string(Label l) { return l == Label::kCompliance ? "compliance" : "non_compliance"; }

double robustness(const model::Condition& c, double metric_value) {
  return c.op == model::CompareOp::kLess ? metric_value - c.threshold : c.threshold - metric_value;
}

Verdict evaluate_events(const TraceMetrics& metrics, const model::RiskModel& model, std::string_view situation) {
  const model::Situation* s = model.find_situation(situation);
  if (!s) throw DomainError("unknown situation " + std::string(situation));
  Verdict v;
  for (const auto& name : s->exposes) {
    const model::Event* e = model.find_event(name);
    if (!e) throw DomainError("unknown event " + name);
    if (!is_trace_metric(e->condition.metric)) {
      throw DomainError("condition references unknown metric " + e->condition.metric);
    }
    const double r = robustness(e->condition, metrics.value(e->condition.metric));
    v.per_event[name] = {r < 0.0, r};
    if (r < 0.0 && e->polarity == model::Polarity::kNegative) v.label = Label::kNonCompliance;
  }
  return v;
}

std::string trace_csv(const Trace& trace) {
  std::string out = "t,d,S_p,v_r,detected,ee_x,ee_y,hand_x,hand_y\n";
  for (const auto& s : trace.steps) {
    out += io::format_double(s.t) + "," + io::format_double(s.d) + "," + io::format_double(s.s_p) + "," +
           io::format_double(s.v_r) + "," + (s.detected ? "1" : "0") + "," + io::format_double(s.ee.x) + "," +
           io::format_double(s.ee.y) + "," + io::format_double(s.hand.x) + "," + io::format_double(s.hand.y) + "\n";
  }
  return out;
}

nlohmann::json to_json(const TraceMetrics& m) {
  return {{"min_margin", m.min_margin},
          {"min_distance", m.min_distance},
          {"objects_fallen", m.objects_fallen},
          {"detection_miss_ratio", m.detection_miss_ratio},
          {"collision", m.collision}};
}

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json events = nlohmann::json::object();
  for (const auto& [name, o] : v.per_event) events[name] = {{"triggered", o.triggered}, {"robustness", o.robustness}};
  return {{"label", std::string(to_string(v.label))}, {"events", events}};
}

}  // namespace cais::sim
