#include "cais/scenario.hpp"

#include <cmath>
#include <numbers>

#include "cais/io.hpp"

namespace cais::sim {

std::string_view to_string(ControlMode m) { return m == ControlMode::kSsm ? "ssm" : "monitored_stop"; }

namespace {

enum class ParamKind { kReal, kInt, kPoint, kMode, kBool };

struct Param {
  std::string_view path;
  ParamKind kind;
  void* (*ref)(Scenario&);
};

#define CAIS_PARAM(path, kind, member) \
  Param { path, ParamKind::kind, [](Scenario& s) -> void* { return &s.member; } }

const std::vector<Param>& params() {
  static const std::vector<Param> table = {
      CAIS_PARAM("duration", kReal, duration),
      CAIS_PARAM("dt", kReal, dt),
      CAIS_PARAM("belt.start", kPoint, belt.start),
      CAIS_PARAM("belt.end", kPoint, belt.end),
      CAIS_PARAM("belt.speed", kReal, belt.speed),
      CAIS_PARAM("belt.spawn_interval", kReal, belt.spawn_interval),
      CAIS_PARAM("belt.object_count", kInt, belt.object_count),
      CAIS_PARAM("arm.base", kPoint, arm.base),
      CAIS_PARAM("arm.link1", kReal, arm.link1),
      CAIS_PARAM("arm.link2", kReal, arm.link2),
      CAIS_PARAM("arm.v_max", kReal, arm.v_max),
      CAIS_PARAM("arm.a_brake", kReal, arm.a_brake),
      CAIS_PARAM("arm.a_max", kReal, arm.a_max),
      CAIS_PARAM("arm.pick_radius", kReal, arm.pick_radius),
      CAIS_PARAM("arm.bin", kPoint, arm.bin),
      CAIS_PARAM("operator.start", kPoint, op.start),
      CAIS_PARAM("operator.intrusion", kReal, op.intrusion),
      CAIS_PARAM("operator.hand_speed", kReal, op.hand_speed),
      CAIS_PARAM("operator.approach_time", kReal, op.approach_time),
      CAIS_PARAM("operator.dwell", kReal, op.dwell),
      CAIS_PARAM("camera.position", kPoint, camera.position),
      CAIS_PARAM("camera.yaw", kReal, camera.yaw),
      CAIS_PARAM("camera.fov_half_angle", kReal, camera.fov_half_angle),
      CAIS_PARAM("environment.illuminance", kReal, environment.illuminance),
      CAIS_PARAM("environment.contrast", kReal, environment.contrast),
      CAIS_PARAM("controller.mode", kMode, controller.mode),
      CAIS_PARAM("controller.reaction_time", kReal, controller.reaction_time),
      CAIS_PARAM("controller.human_speed", kReal, controller.human_speed),
      CAIS_PARAM("controller.clearance", kReal, controller.clearance),
      CAIS_PARAM("perception.p_base", kReal, perception.p_base),
      CAIS_PARAM("perception.e_min", kReal, perception.e_min),
      CAIS_PARAM("perception.e_sat", kReal, perception.e_sat),
      CAIS_PARAM("perception.contrast_gamma", kReal, perception.contrast_gamma),
      CAIS_PARAM("perception.miss_horizon", kInt, perception.miss_horizon),
      CAIS_PARAM("perception.occlusion", kBool, perception.occlusion),
  };
  return table;
}

#undef CAIS_PARAM

/// Resolved target of a path: the parameter plus, for point components, the
/// axis (0 = x, 1 = y, -1 = whole point).
struct Resolved {
  const Param* param = nullptr;
  int axis = -1;
};

Resolved resolve(std::string_view path) {
  for (const auto& p : params()) {
    if (p.path == path) return {&p, -1};
    if (p.kind == ParamKind::kPoint && path.size() == p.path.size() + 2 && path.substr(0, p.path.size()) == p.path &&
        path[p.path.size()] == '.' && (path.back() == 'x' || path.back() == 'y')) {
      return {&p, path.back() == 'x' ? 0 : 1};
    }
  }
  return {};
}

std::optional<double> as_real(const FeatureValue& v) {
  if (const double* x = std::get_if<double>(&v)) return *x;
  if (const std::int64_t* x = std::get_if<std::int64_t>(&v)) return static_cast<double>(*x);
  return io::parse_double(std::get<std::string>(v));
}

std::optional<bool> as_bool(const FeatureValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) {
    if (*s == "true" || *s == "on" || *s == "1") return true;
    if (*s == "false" || *s == "off" || *s == "0") return false;
    return std::nullopt;
  }
  const auto x = as_real(v);
  if (x && (*x == 0.0 || *x == 1.0)) return *x == 1.0;
  return std::nullopt;
}

std::optional<Vec2> parse_point(std::string_view text) {
  const auto parts = io::split(text, ',');
  if (parts.size() != 2) return std::nullopt;
  const auto x = io::parse_double(parts[0]);
  const auto y = io::parse_double(parts[1]);
  if (!x || !y) return std::nullopt;
  return Vec2{*x, *y};
}

[[noreturn]] void bad_value(std::string_view path, const FeatureValue& v) {
  throw DomainError("value " + format_value(v) + " does not fit scenario parameter " + std::string(path));
}

}  // namespace

std::vector<std::string> parameter_paths() {
  std::vector<std::string> out;
  for (const auto& p : params()) {
    out.emplace_back(p.path);
    if (p.kind == ParamKind::kPoint) {
      out.push_back(std::string(p.path) + ".x");
      out.push_back(std::string(p.path) + ".y");
    }
  }
  return out;
}

bool is_parameter_path(std::string_view path) { return resolve(path).param != nullptr; }

void set_parameter(Scenario& s, std::string_view path, const FeatureValue& value) {
  const Resolved r = resolve(path);
  if (!r.param) throw DomainError("binding path does not name a scenario field: " + std::string(path));
  void* target = r.param->ref(s);
  switch (r.param->kind) {
    case ParamKind::kReal: {
      const auto x = as_real(value);
      if (!x) bad_value(path, value);
      *static_cast<double*>(target) = *x;
      return;
    }
    case ParamKind::kInt: {
      const auto x = as_real(value);
      if (!x || std::floor(*x) != *x) bad_value(path, value);
      *static_cast<int*>(target) = static_cast<int>(*x);
      return;
    }
    case ParamKind::kPoint: {
      auto& p = *static_cast<Vec2*>(target);
      if (r.axis >= 0) {
        const auto x = as_real(value);
        if (!x) bad_value(path, value);
        (r.axis == 0 ? p.x : p.y) = *x;
        return;
      }
      const auto* text = std::get_if<std::string>(&value);
      const auto pt = text ? parse_point(*text) : std::nullopt;
      if (!pt) bad_value(path, value);
      p = *pt;
      return;
    }
    case ParamKind::kMode: {
      const auto* text = std::get_if<std::string>(&value);
      if (text && *text == "ssm") {
        *static_cast<ControlMode*>(target) = ControlMode::kSsm;
      } else if (text && *text == "monitored_stop") {
        *static_cast<ControlMode*>(target) = ControlMode::kMonitoredStop;
      } else {
        bad_value(path, value);
      }
      return;
    }
    case ParamKind::kBool: {
      const auto b = as_bool(value);
      if (!b) bad_value(path, value);
      *static_cast<bool*>(target) = *b;
      return;
    }
  }
}

FeatureValue get_parameter(const Scenario& s, std::string_view path) {
  const Resolved r = resolve(path);
  if (!r.param) throw DomainError("binding path does not name a scenario field: " + std::string(path));
  Scenario copy = s;
  void* target = r.param->ref(copy);
  switch (r.param->kind) {
    case ParamKind::kReal:
      return *static_cast<double*>(target);
    case ParamKind::kInt:
      return static_cast<std::int64_t>(*static_cast<int*>(target));
    case ParamKind::kPoint: {
      const auto& p = *static_cast<Vec2*>(target);
      if (r.axis >= 0) return r.axis == 0 ? p.x : p.y;
      return io::format_double(p.x) + ", " + io::format_double(p.y);
    }
    case ParamKind::kMode:
      return std::string(to_string(*static_cast<ControlMode*>(target)));
    case ParamKind::kBool:
      return std::string(*static_cast<bool*>(target) ? "true" : "false");
  }
  return 0.0;
}

std::vector<std::string> check_scenario(const Scenario& s) {
  std::vector<std::string> errs;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) errs.push_back(std::string(name) + " must be >= 0");
  };
  if (!(s.dt > 0.0)) errs.push_back("dt must be > 0");
  if (!(s.duration >= s.dt)) errs.push_back("duration must be >= dt");
  nonneg(s.belt.speed, "belt.speed");
  nonneg(s.belt.spawn_interval, "belt.spawn_interval");
  if (s.belt.object_count < 0) errs.push_back("belt.object_count must be >= 0");
  if (geom::dist(s.belt.start, s.belt.end) <= 0.0) errs.push_back("belt must have positive length");
  if (!(s.arm.link1 > 0.0) || !(s.arm.link2 > 0.0)) errs.push_back("arm links must be > 0");
  nonneg(s.arm.v_max, "arm.v_max");
  nonneg(s.arm.a_brake, "arm.a_brake");
  if (!(s.arm.a_max >= s.arm.a_brake)) errs.push_back("arm.a_max must be >= arm.a_brake");
  nonneg(s.arm.pick_radius, "arm.pick_radius");
  nonneg(s.op.intrusion, "operator.intrusion");
  nonneg(s.op.hand_speed, "operator.hand_speed");
  nonneg(s.op.approach_time, "operator.approach_time");
  nonneg(s.op.dwell, "operator.dwell");
  if (!(s.camera.fov_half_angle > 0.0 && s.camera.fov_half_angle < std::numbers::pi)) {
    errs.push_back("camera.fov_half_angle must be in (0, pi)");
  }
  nonneg(s.environment.illuminance, "environment.illuminance");
  if (!(s.environment.contrast >= 0.0 && s.environment.contrast <= 1.0)) {
    errs.push_back("environment.contrast must be in [0, 1]");
  }
  nonneg(s.controller.reaction_time, "controller.reaction_time");
  nonneg(s.controller.human_speed, "controller.human_speed");
  nonneg(s.controller.clearance, "controller.clearance");
  if (!(s.perception.p_base >= 0.0 && s.perception.p_base <= 1.0)) errs.push_back("perception.p_base must be in [0, 1]");
  if (!(s.perception.e_min > 0.0) || !(s.perception.e_min < s.perception.e_sat)) {
    errs.push_back("perception requires 0 < e_min < e_sat");
  }
  nonneg(s.perception.contrast_gamma, "perception.contrast_gamma");
  if (s.perception.miss_horizon < 0) errs.push_back("perception.miss_horizon must be >= 0");
  return errs;
}

Scenario parse_scenario(std::string_view text, const std::string& origin) {
  const auto doc = io::KvDocument::parse(text, origin);
  Scenario s;
  for (const auto& e : doc.entries()) {
    const Resolved r = resolve(e.key);
    const std::string where = origin + ":" + std::to_string(e.line) + ": ";
    if (!r.param) throw IoError(where + "unknown scenario key '" + e.key + "'");
    FeatureValue v = e.value;
    if (r.param->kind == ParamKind::kReal || r.param->kind == ParamKind::kInt || r.axis >= 0) {
      const auto x = io::parse_double(e.value);
      if (!x) throw IoError(where + "'" + e.key + "' expects a number");
      v = *x;
    }
    try {
      set_parameter(s, e.key, v);
    } catch (const DomainError& err) {
      throw IoError(where + err.what());
    }
  }
  if (const auto errs = check_scenario(s); !errs.empty()) {
    std::string msg = origin + ": invalid scenario";
    for (const auto& m : errs) msg += "\n  " + m;
    throw DomainError(msg);
  }
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::string out;
  for (const auto& p : params()) {
    out += std::string(p.path) + " = " + format_value(get_parameter(s, p.path)) + "\n";
  }
  return out;
}

Scenario bind_assignment(const Scenario& scenario, const model::RiskModel& model, const FeatureAssignment& a) {
  Scenario out = scenario;
  for (const auto& [name, value] : a) {
    const model::DomainFeature* f = model.find_feature(name);
    if (!f) throw DomainError("unknown feature " + name);
    check_in_domain(*f, value);
    set_parameter(out, f->binding, value);
  }
  return out;
}

}  // namespace cais::sim
