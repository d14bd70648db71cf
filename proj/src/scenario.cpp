// Copyright 2026 The conegrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "conegrasp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace conegrasp {

using nlohmann::json;

namespace {

double min_jerk(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// Collects violations while walking one JSON object.
class Reader {
 public:
  Reader(const json* node, std::string path, std::vector<std::string>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {
    if (node_ && !node_->is_object()) {
      error("", "must be an object");
      node_ = nullptr;
    }
  }

  bool has(const char* key) const { return node_ && node_->contains(key); }

  Reader child(const char* key) const {
    const json* c = has(key) ? &(*node_)[key] : nullptr;
    return Reader(c, field(key), errors_);
  }

  const json* raw(const char* key) const { return has(key) ? &(*node_)[key] : nullptr; }

  std::string field(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void error(const std::string& key, const std::string& what) const {
    errors_.push_back(field(key) + ": " + what);
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!node_) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!ok.count(it.key())) error(it.key(), "unknown field");
    }
  }

  double number(const char* key, double fallback, bool required = false) const {
    if (!has(key)) {
      if (required) error(key, "is required");
      return fallback;
    }
    const json& v = (*node_)[key];
    if (!v.is_number()) {
      error(key, "must be a number");
      return fallback;
    }
    return v.get<double>();
  }

  double positive(const char* key, double fallback, bool required = false) const {
    const double v = number(key, fallback, required);
    if (has(key) && !(v > 0.0)) error(key, "must be positive");
    return v;
  }

  double non_negative(const char* key, double fallback) const {
    const double v = number(key, fallback);
    if (has(key) && !(v >= 0.0)) error(key, "must be non-negative");
    return v;
  }

  int integer(const char* key, int fallback, int min_value) const {
    if (!has(key)) return fallback;
    const json& v = (*node_)[key];
    if (!v.is_number_integer()) {
      error(key, "must be an integer");
      return fallback;
    }
    const auto value = v.get<long long>();
    if (value < min_value) {
      error(key, "must be at least " + std::to_string(min_value));
      return fallback;
    }
    return static_cast<int>(value);
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*node_)[key];
    if (!v.is_string()) {
      error(key, "must be a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = (*node_)[key];
    if (!v.is_boolean()) {
      error(key, "must be a boolean");
      return fallback;
    }
    return v.get<bool>();
  }

  std::optional<VecX> vector(const char* key, int expected_size = -1,
                             bool required = false) const {
    if (!has(key)) {
      if (required) error(key, "is required");
      return std::nullopt;
    }
    return parse_vector((*node_)[key], field(key), expected_size, errors_);
  }

  Vec3 vec3(const char* key, const Vec3& fallback) const {
    auto v = vector(key, 3);
    return v ? Vec3(*v) : fallback;
  }

  static std::optional<VecX> parse_vector(const json& v, const std::string& where,
                                          int expected_size,
                                          std::vector<std::string>& errors) {
    if (!v.is_array()) {
      errors.push_back(where + ": must be an array of numbers");
      return std::nullopt;
    }
    VecX out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        errors.push_back(where + ": must be an array of numbers");
        return std::nullopt;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    if (expected_size >= 0 && out.size() != expected_size) {
      errors.push_back(where + ": expected " + std::to_string(expected_size) +
                       " entries, got " + std::to_string(out.size()));
      return std::nullopt;
    }
    return out;
  }

  std::vector<std::string>& errors() const { return errors_; }

 private:
  const json* node_;
  std::string path_;
  std::vector<std::string>& errors_;
};

void read_object(const Reader& r, ObjectSpec& o) {
  r.allow({"mass", "com", "inertia", "mu_true", "compliance", "normal_stiffness",
           "tangential_stiffness", "normal_damping", "tangential_damping", "half_extents"});
  if (!r.has("mass")) r.error("mass", "is required");
  o.mass = r.positive("mass", o.mass, false);
  o.half_extents = r.vec3("half_extents", o.half_extents);
  if (!(o.half_extents.minCoeff() > 0.0)) r.error("half_extents", "entries must be positive");
  o.com = r.vec3("com", o.com);
  if ((o.com.cwiseAbs() - o.half_extents).maxCoeff() > 0.0) {
    r.error("com", "must lie inside the box");
  }
  o.mu_true = r.positive("mu_true", o.mu_true);
  const std::string compliance = r.string("compliance", "rigid");
  if (compliance == "rigid") {
    o.compliance = ComplianceClass::kRigid;
    o.normal_stiffness = kRigidNormalStiffness;
  } else if (compliance == "deformable") {
    o.compliance = ComplianceClass::kDeformable;
    o.normal_stiffness = kDeformableNormalStiffness;
  } else {
    r.error("compliance", "must be 'rigid' or 'deformable'");
  }
  o.normal_stiffness = r.positive("normal_stiffness", o.normal_stiffness);
  o.tangential_stiffness = r.positive("tangential_stiffness", o.tangential_stiffness);
  o.normal_damping = r.non_negative("normal_damping", o.normal_damping);
  o.tangential_damping = r.non_negative("tangential_damping", o.tangential_damping);
  o.inertia = ObjectSpec::box_inertia(o.mass > 0.0 ? o.mass : 1.0, o.half_extents);
  if (r.has("inertia")) {
    const json* v = r.raw("inertia");
    if (v->is_array() && v->size() == 3 && (*v)[0].is_number()) {
      auto d = Reader::parse_vector(*v, r.field("inertia"), 3, r.errors());
      if (d) o.inertia = Mat3(d->asDiagonal());
    } else if (v->is_array() && v->size() == 3) {
      for (int i = 0; i < 3; ++i) {
        auto row = Reader::parse_vector((*v)[i], r.field("inertia"), 3, r.errors());
        if (row) o.inertia.row(i) = row->transpose();
      }
    } else {
      r.error("inertia", "must be 3 diagonal entries or a 3x3 matrix");
    }
    if (!o.inertia.isApprox(o.inertia.transpose(), 1e-12) ||
        !(Eigen::SelfAdjointEigenSolver<Mat3>(o.inertia).eigenvalues().minCoeff() > 0.0)) {
      r.error("inertia", "must be symmetric positive definite");
    }
  }
}

void read_hand(const Reader& r, HandKinematics& hand, const ObjectSpec& object) {
  r.allow({"palm_position", "fingers", "joint_limits", "thumb"});
  hand = default_hand();
  hand.palm_pose.position = Vec3(0.0, 0.0, object.half_extents.z() + 0.115);
  hand.palm_pose.position = r.vec3("palm_position", hand.palm_pose.position);
  if (const json* fingers = r.raw("fingers")) {
    if (!fingers->is_array() || fingers->empty()) {
      r.error("fingers", "must be a non-empty array");
    } else {
      hand.fingers.clear();
      for (std::size_t i = 0; i < fingers->size(); ++i) {
        Reader fr(&(*fingers)[i], r.field("fingers[" + std::to_string(i) + "]"), r.errors());
        fr.allow({"base_position", "base_x", "base_y", "link_lengths", "joint_axes"});
        FingerSpec f;
        f.base_position = fr.vec3("base_position", f.base_position);
        const Vec3 x = fr.vec3("base_x", Vec3(0.0, 0.0, -1.0)).normalized();
        Vec3 y = fr.vec3("base_y", Vec3::UnitY());
        y = (y - y.dot(x) * x);
        if (!(y.norm() > 1e-9)) {
          fr.error("base_y", "must not be parallel to base_x");
          y = x.unitOrthogonal();
        }
        y.normalize();
        f.base_rotation.col(0) = x;
        f.base_rotation.col(1) = y;
        f.base_rotation.col(2) = x.cross(y);
        if (auto l = fr.vector("link_lengths", kJointsPerFinger)) {
          for (int k = 0; k < kJointsPerFinger; ++k) {
            if (!((*l)[k] > 0.0)) fr.error("link_lengths", "entries must be positive");
            f.link_lengths[k] = (*l)[k];
          }
        }
        if (const json* axes = fr.raw("joint_axes")) {
          if (!axes->is_array() || axes->size() != kJointsPerFinger) {
            fr.error("joint_axes", "must list three axes");
          } else {
            for (int k = 0; k < kJointsPerFinger; ++k) {
              auto a = Reader::parse_vector((*axes)[k], fr.field("joint_axes"), 3, r.errors());
              if (a && a->norm() > 1e-9) f.joint_axes[k] = a->normalized();
              else if (a) fr.error("joint_axes", "axes must be non-zero");
            }
          }
        }
        hand.fingers.push_back(f);
      }
      hand.joint_limits.assign(static_cast<std::size_t>(hand.num_joints()), JointLimit{});
    }
  }
  if (const json* limits = r.raw("joint_limits")) {
    if (!limits->is_array() || static_cast<int>(limits->size()) != hand.num_joints()) {
      r.error("joint_limits", "must list one [lo, hi] pair per joint");
    } else {
      for (std::size_t j = 0; j < limits->size(); ++j) {
        auto pair = Reader::parse_vector((*limits)[j], r.field("joint_limits"), 2, r.errors());
        if (!pair) continue;
        if (!((*pair)[0] < (*pair)[1])) r.error("joint_limits", "each pair needs lo < hi");
        hand.joint_limits[j] = {(*pair)[0], (*pair)[1]};
      }
    }
  }
  hand.thumb = r.integer("thumb", hand.thumb, 0);
  if (hand.thumb >= hand.num_fingers()) r.error("thumb", "finger index out of range");
}

void read_controller(const Reader& r, ControllerConfig& c, std::vector<std::string>& errors) {
  r.allow({"beta1", "beta2", "gamma_up", "gains", "mu_window", "g_window", "mu_init",
           "g_init", "min_normal", "mode", "eta", "mu_floor", "open_loop_stiffness",
           "contact_threshold", "solver"});
  c.beta1 = r.non_negative("beta1", c.beta1);
  c.beta2 = r.non_negative("beta2", c.beta2);
  c.gamma_up = r.positive("gamma_up", c.gamma_up);
  const Reader g = r.child("gains");
  g.allow({"kp", "ki", "kd", "integral_limit"});
  c.gains.kp = g.non_negative("kp", c.gains.kp);
  c.gains.ki = g.non_negative("ki", c.gains.ki);
  c.gains.kd = g.non_negative("kd", c.gains.kd);
  c.gains.integral_limit = g.non_negative("integral_limit", c.gains.integral_limit);
  c.estimator.mu_window = r.integer("mu_window", c.estimator.mu_window, 1);
  c.estimator.g_window = r.integer("g_window", c.estimator.g_window, 1);
  c.estimator.mu_init = r.positive("mu_init", c.estimator.mu_init);
  c.estimator.g_init = Vec3(0.0, 0.0, r.non_negative("g_init", c.estimator.g_init.z()));
  c.estimator.min_normal = r.non_negative("min_normal", c.estimator.min_normal);
  const std::string mode = r.string("mode", "full");
  try {
    c.mode = parse_mode(mode);
  } catch (const std::invalid_argument&) {
    r.error("mode", "unknown mode '" + mode + "' (expected full, no_pid or no_socp)");
  }
  c.eta = r.positive("eta", c.eta);
  c.mu_floor = r.positive("mu_floor", c.mu_floor);
  c.open_loop_stiffness = r.positive("open_loop_stiffness", c.open_loop_stiffness);
  c.contact_threshold = r.positive("contact_threshold", c.contact_threshold);
  const Reader s = r.child("solver");
  s.allow({"feas_tol", "opt_tol", "max_iters"});
  c.solver.feas_tol = s.positive("feas_tol", c.solver.feas_tol);
  c.solver.opt_tol = s.positive("opt_tol", c.solver.opt_tol);
  c.solver.max_iters = s.integer("max_iters", c.solver.max_iters, 1);
  (void)errors;
}

void read_sim(const Reader& r, SimConfig& s, int num_fingers, int thumb) {
  r.allow({"dt", "steps_per_tick", "servo_time_constant", "tactile_noise", "pre_settle_time",
           "fingertip_radius", "tangential_scale", "table"});
  s.dt = r.positive("dt", s.dt);
  if (s.dt > kMaxSimDt) r.error("dt", "must not exceed 0.002 s");
  s.steps_per_tick = r.integer("steps_per_tick", s.steps_per_tick, 1);
  s.servo_time_constant = r.positive("servo_time_constant", s.servo_time_constant);
  s.tactile_noise = r.non_negative("tactile_noise", s.tactile_noise);
  s.pre_settle_time = r.non_negative("pre_settle_time", s.pre_settle_time);
  s.params.fingertip_radius = r.positive("fingertip_radius", s.params.fingertip_radius);
  // The thumb opposes all other fingers, so its shear stiffness is scaled by
  // their count to keep the passive load split proportional to normal force.
  s.params.tangential_scale.assign(static_cast<std::size_t>(num_fingers), 1.0);
  if (thumb >= 0 && thumb < num_fingers && num_fingers > 1) {
    s.params.tangential_scale[static_cast<std::size_t>(thumb)] = num_fingers - 1.0;
  }
  if (auto v = r.vector("tangential_scale", num_fingers)) {
    for (int i = 0; i < num_fingers; ++i) {
      if (!((*v)[i] > 0.0)) r.error("tangential_scale", "entries must be positive");
      s.params.tangential_scale[static_cast<std::size_t>(i)] = (*v)[i];
    }
  }
  const Reader t = r.child("table");
  t.allow({"enabled", "height", "stiffness", "damping", "friction"});
  s.params.table = t.boolean("enabled", s.params.table);
  s.params.table_height = t.number("height", s.params.table_height);
  s.params.table_stiffness = t.positive("stiffness", s.params.table_stiffness);
  s.params.table_damping = t.non_negative("damping", s.params.table_damping);
  s.params.table_friction = t.non_negative("friction", s.params.table_friction);
}

void read_transport(const Reader& r, TransportSpec& t) {
  r.allow({"settle_time", "lift_height", "lift_duration", "hold_time", "path", "shake"});
  t.settle_time = r.non_negative("settle_time", t.settle_time);
  t.lift_height = r.number("lift_height", t.lift_height);
  t.lift_duration = r.positive("lift_duration", t.lift_duration);
  t.hold_time = r.non_negative("hold_time", t.hold_time);
  if (const json* path = r.raw("path")) {
    if (!path->is_array()) {
      r.error("path", "must be an array of waypoints");
    } else {
      double last = 0.0;
      for (std::size_t i = 0; i < path->size(); ++i) {
        Reader w(&(*path)[i], r.field("path[" + std::to_string(i) + "]"), r.errors());
        w.allow({"time", "offset"});
        Waypoint wp;
        wp.time = w.non_negative("time", 0.0);
        if (!w.has("time")) w.error("time", "is required");
        if (wp.time <= last && i > 0) w.error("time", "waypoint times must increase");
        last = wp.time;
        wp.offset = w.vec3("offset", Vec3::Zero());
        t.path.push_back(wp);
      }
    }
  }
  if (r.has("shake")) {
    const Reader s = r.child("shake");
    s.allow({"amplitude", "frequency", "axis", "start", "duration"});
    ShakeSpec shake;
    shake.amplitude = s.non_negative("amplitude", shake.amplitude);
    shake.frequency = s.positive("frequency", shake.frequency);
    shake.axis = s.vec3("axis", shake.axis);
    if (!(shake.axis.norm() > 0.0)) s.error("axis", "must be non-zero");
    else shake.axis.normalize();
    shake.start = s.non_negative("start", shake.start);
    shake.duration = s.non_negative("duration", t.hold_time);
    t.shake = shake;
  }
}

void read_disturbances(const Reader& r, DisturbanceProfile& d) {
  r.allow({"mass_steps", "sinusoids"});
  if (const json* steps = r.raw("mass_steps")) {
    if (!steps->is_array()) {
      r.error("mass_steps", "must be an array");
    } else {
      for (std::size_t i = 0; i < steps->size(); ++i) {
        Reader s(&(*steps)[i], r.field("mass_steps[" + std::to_string(i) + "]"), r.errors());
        s.allow({"time", "delta_mass"});
        MassStep m;
        m.time = s.non_negative("time", 0.0);
        m.delta_mass = s.number("delta_mass", 0.0, true);
        if (!s.has("time")) s.error("time", "is required");
        d.mass_steps.push_back(m);
      }
    }
  }
  if (const json* sins = r.raw("sinusoids")) {
    if (!sins->is_array()) {
      r.error("sinusoids", "must be an array");
    } else {
      for (std::size_t i = 0; i < sins->size(); ++i) {
        Reader s(&(*sins)[i], r.field("sinusoids[" + std::to_string(i) + "]"), r.errors());
        s.allow({"amplitude", "frequency", "axis"});
        SinusoidalAccel a;
        a.amplitude = s.non_negative("amplitude", 0.0);
        a.frequency = s.positive("frequency", 1.0);
        a.axis = s.vec3("axis", a.axis);
        if (!(a.axis.norm() > 0.0)) s.error("axis", "must be non-zero");
        d.sinusoids.push_back(a);
      }
    }
  }
}

int line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

Vec3 TransportSpec::palm_offset(double t) const {
  Vec3 offset(0.0, 0.0, lift_height * min_jerk((t - settle_time) / lift_duration));
  const double th = t - hold_start();
  if (th <= 0.0) return offset;
  if (!path.empty()) {
    // Minimum-jerk segments between waypoints, starting from the origin.
    Vec3 from = Vec3::Zero();
    double t0 = 0.0;
    Vec3 p = path.back().offset;
    for (const Waypoint& w : path) {
      if (th <= w.time) {
        p = from + (w.offset - from) * min_jerk((th - t0) / (w.time - t0));
        break;
      }
      from = w.offset;
      t0 = w.time;
    }
    offset += p;
  }
  if (shake) {
    const double ts = std::clamp(th - shake->start, 0.0, shake->duration);
    const double w = 2.0 * std::numbers::pi * shake->frequency;
    offset += shake->axis * (shake->amplitude / (w * w)) * (1.0 - std::cos(w * ts));
  }
  return offset;
}

double Scenario::final_mass() const {
  double m = object.mass;
  for (const MassStep& s : disturbances.mass_steps) {
    if (s.time <= transport.total_time()) m += s.delta_mass;
  }
  return m;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte);
    throw ScenarioError(source + ":" + std::to_string(line) + ": JSON syntax error: " + e.what(),
                        {}, line);
  }
  std::vector<std::string> errors;
  Reader r(&root, "", errors);
  if (!errors.empty()) throw ScenarioError(source + ": " + errors.front(), errors);
  r.allow({"name", "category", "seed", "object", "object_xy", "hand", "q_pregrasp",
           "delta_q_grasp", "n1", "n2", "transport", "disturbances", "controller", "sim"});

  Scenario sc;
  sc.name = r.string("name", "unnamed");
  sc.category = r.string("category", "uncategorized");
  if (r.has("seed")) {
    const json& s = root["seed"];
    if (!s.is_number_integer() || s.get<long long>() < 0) r.error("seed", "must be a non-negative integer");
    else sc.seed = s.get<std::uint64_t>();
  }
  if (!r.has("object")) r.error("object", "is required");
  read_object(r.child("object"), sc.object);
  if (auto xy = r.vector("object_xy", 2)) sc.object_xy = Vec3((*xy)[0], (*xy)[1], 0.0);
  read_hand(r.child("hand"), sc.hand, sc.object);
  sc.hand.palm_pose.position += sc.object_xy;
  const int J = sc.hand.num_joints();
  if (auto q = r.vector("q_pregrasp", J, true)) sc.q_pregrasp = *q;
  sc.delta_q_grasp = VecX::Zero(J);
  for (int f = 0; f < sc.hand.num_fingers(); ++f) {
    sc.delta_q_grasp[kJointsPerFinger * f + 1] = 0.002;
    sc.delta_q_grasp[kJointsPerFinger * f + 2] = 0.002;
  }
  if (auto dq = r.vector("delta_q_grasp", J)) sc.delta_q_grasp = *dq;
  sc.n1 = r.integer("n1", sc.n1, 1);
  sc.n2 = r.integer("n2", sc.n2, 1);
  read_transport(r.child("transport"), sc.transport);
  read_disturbances(r.child("disturbances"), sc.disturbances);
  read_controller(r.child("controller"), sc.controller, errors);
  read_sim(r.child("sim"), sc.sim, sc.hand.num_fingers(), sc.hand.thumb);
  sc.controller.gains.dt = sc.tick_dt();
  if (sc.object.mass > 0.0 && sc.final_mass() <= 0.0) r.error("disturbances.mass_steps", "leave a non-positive mass");

  if (errors.empty()) {
    try {
      validate(sc.hand);
    } catch (const std::invalid_argument& e) {
      errors.push_back(std::string("hand: ") + e.what());
    }
  }
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << source << ": " << errors.size() << " validation error(s)";
    for (const std::string& e : errors) msg << "\n  " << e;
    throw ScenarioError(msg.str(), errors);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open file", {"path: cannot open file"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path);
}

}  // namespace conegrasp
