#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cais/assignment.hpp"
#include "cais/geometry.hpp"
#include "cais/risk_model.hpp"

namespace cais::sim {

using geom::Vec2;

struct BeltParams {
  Vec2 start{-1.2, 0.0};
  Vec2 end{0.75, 0.0};
  double speed = 0.1;           ///< m/s
  double spawn_interval = 0.8;  ///< s between objects entering at `start`
  int object_count = 5;
  friend bool operator==(const BeltParams&, const BeltParams&) = default;
};

struct ArmParams {
  Vec2 base{0.0, -0.55};
  double link1 = 0.4;
  double link2 = 0.4;
  double v_max = 1.0;        ///< m/s, bound on the fastest point of the arm
  double a_brake = 1.0;      ///< m/s^2, safety-rated braking used by S_p
  double a_max = 4.0;        ///< m/s^2, motion acceleration bound (>= a_brake)
  double pick_radius = 0.03;
  Vec2 bin{0.35, -0.45};
  friend bool operator==(const ArmParams&, const ArmParams&) = default;
};

/// Open-loop operator script: the hand rests at the torso (`start`), moves
/// toward the belt at `approach_time`, holds at full intrusion for `dwell`
/// seconds, then retreats.
struct OperatorParams {
  Vec2 start{0.0, 0.8};
  double intrusion = 0.3;
  double hand_speed = 0.5;
  double approach_time = 0.5;
  double dwell = 3.0;
  friend bool operator==(const OperatorParams&, const OperatorParams&) = default;
};

struct CameraParams {
  Vec2 position{-0.6, 0.9};
  double yaw = -0.37;           ///< rad, optical axis direction
  double fov_half_angle = 0.3;  ///< rad
  friend bool operator==(const CameraParams&, const CameraParams&) = default;
};

struct EnvironmentParams {
  double illuminance = 5000.0;  ///< lux
  double contrast = 0.8;        ///< [0, 1]
  friend bool operator==(const EnvironmentParams&, const EnvironmentParams&) = default;
};

enum class ControlMode { kSsm, kMonitoredStop };

struct ControllerParams {
  ControlMode mode = ControlMode::kSsm;
  double reaction_time = 0.1;  ///< T_r, s
  double human_speed = 1.6;    ///< assumed v_h, m/s
  double clearance = 0.1;      ///< C, m
  friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

struct PerceptionParams {
  double p_base = 0.99;
  double e_min = 100.0;  ///< lux at which detection vanishes
  double e_sat = 1000.0; ///< lux at which the illuminance gate saturates
  double contrast_gamma = 1.0;
  int miss_horizon = 5;  ///< steps a stale detection is trusted
  bool occlusion = true; ///< false forces the occlusion fraction to 0
  friend bool operator==(const PerceptionParams&, const PerceptionParams&) = default;
};

/// Parameterized description of the collaborative cell (planar, metres).
struct Scenario {
  double duration = 6.0;
  double dt = 0.01;
  BeltParams belt;
  ArmParams arm;
  OperatorParams op;
  CameraParams camera;
  EnvironmentParams environment;
  ControllerParams controller;
  PerceptionParams perception;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Invariant violations, one message each; empty when valid.
std::vector<std::string> check_scenario(const Scenario& s);

/// Parses the key-value scenario format. Keys are parameter paths
/// (`belt.speed`, `arm.base`, ...); points are written `x, y`. Keys that are
/// absent keep their built-in value. Throws IoError on unknown keys or
/// malformed values and DomainError when invariants fail.
Scenario parse_scenario(std::string_view text, const std::string& origin = "<scenario>");
std::string serialize_scenario(const Scenario& s);

/// Every bindable parameter path, including point components (`arm.base.x`).
std::vector<std::string> parameter_paths();
bool is_parameter_path(std::string_view path);

/// Writes one value into the scenario field named by `path`.
/// Throws DomainError when the path is unknown or the value has the wrong type.
void set_parameter(Scenario& s, std::string_view path, const FeatureValue& value);
FeatureValue get_parameter(const Scenario& s, std::string_view path);

/// Returns `scenario` with each feature of `a` written through its binding.
/// Throws DomainError for unknown features, unknown binding paths and
/// out-of-domain values.
Scenario bind_assignment(const Scenario& scenario, const model::RiskModel& model, const FeatureAssignment& a);

std::string_view to_string(ControlMode m);

}  // namespace cais::sim
