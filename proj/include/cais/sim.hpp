#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cais/geometry.hpp"
#include "cais/risk_model.hpp"
#include "cais/scenario.hpp"

namespace cais::sim {

inline constexpr double kContactEpsilon = 0.02;  ///< m; below this the hand touches the arm
inline constexpr double kHandRadius = 0.05;      ///< m; disc sampled for occlusion
inline constexpr double kLinkRadius = 0.04;      ///< m; half-width of an arm link
inline constexpr double kObjectRadius = 0.03;    ///< m
inline constexpr int kOcclusionSamples = 16;

/// Speed-and-separation protective distance
///   S_p = v_h*T_r + v_r*T_r + v_r^2 / (2*a_brake) + C.
/// Throws DomainError("non-braking robot") when a_brake <= 0.
double protective_distance(double robot_speed, const ControllerParams& ctrl, double a_brake);

/// Per-frame probability that the surrogate perception detects the hand:
///   p_base * g(E) * contrast^gamma * (1 - occlusion)
/// with g(E) the log-illuminance ramp from e_min (0) to e_sat (1).
double detection_probability(double illuminance, double contrast, double occlusion, const PerceptionParams& p);

/// Segment obstacle with thickness (arm links).
struct ThickSegment {
  geom::Segment seg;
  double radius = kLinkRadius;
};

struct Disc {
  Vec2 center;
  double radius = kObjectRadius;
};

struct Blockers {
  std::vector<ThickSegment> segments;
  std::vector<Disc> discs;
};

/// 1.0 when the hand lies outside the camera's field-of-view cone; otherwise
/// the fraction of 16 points on a disc of radius kHandRadius around the hand
/// whose line of sight from the camera is cut by a blocker.
double occlusion_fraction(const CameraParams& camera, Vec2 hand, const Blockers& blockers);

struct TraceStep {
  double t = 0.0;
  double d = 0.0;    ///< ground-truth human-robot distance
  double s_p = 0.0;  ///< protective distance at the current robot speed
  double v_r = 0.0;  ///< fastest arm point speed
  bool detected = false;
  Vec2 ee;
  Vec2 elbow;
  Vec2 hand;
  int objects_on_belt = 0;
};

struct TraceMetrics {
  double min_margin = 0.0;  ///< min over t of d - S_p
  double min_distance = 0.0;
  int objects_fallen = 0;
  double detection_miss_ratio = 0.0;
  int collision = 0;

  /// Value of a published metric by name; throws DomainError for unknown names.
  double value(std::string_view metric) const;
};

struct Trace {
  std::vector<TraceStep> steps;
  TraceMetrics summary;
};

/// Closed-loop fixed-timestep run of the cell. Identical (scenario, seed)
/// produce bitwise-identical traces. Throws DomainError when the scenario
/// violates its invariants.
Trace simulate(const Scenario& scenario, std::uint64_t seed);

enum class Label { kCompliance, kNonCompliance };
std::string_view to_string(Label l);

struct EventOutcome {
  bool triggered = false;
  double robustness = 0.0;  ///< negative iff the condition holds
  friend bool operator==(const EventOutcome&, const EventOutcome&) = default;
};

struct Verdict {
  std::map<std::string, EventOutcome> per_event;
  Label label = Label::kCompliance;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Sign-normalized robustness of `metric op threshold` for one metric value.
double robustness(const model::Condition& c, double metric_value);

/// Evaluates every event exposed by `situation`. Label is non-compliance iff
/// some exposed negative event triggered.
Verdict evaluate_events(const TraceMetrics& metrics, const model::RiskModel& model, std::string_view situation);

/// Trace CSV: t,d,S_p,v_r,detected,ee_x,ee_y,hand_x,hand_y.
std::string trace_csv(const Trace& trace);

nlohmann::json to_json(const TraceMetrics& m);
nlohmann::json to_json(const Verdict& v);

}  // namespace cais::sim
