#include "tmppi/env/world_config.hpp"

namespace tmppi::env {

namespace {

Rect rect_from(const KvConfig& cfg, const std::string& key, const Rect& fallback) {
  const auto v = cfg.get_doubles(key, {fallback.x_min, fallback.x_max, fallback.y_min, fallback.y_max});
  if (v.size() != 4) throw ConfigError("config key '" + key + "': expected [xmin, xmax, ymin, ymax]");
  Rect r{v[0], v[1], v[2], v[3]};
  if (!(r.x_min < r.x_max) || !(r.y_min < r.y_max)) throw ConfigError("config key '" + key + "': empty rectangle");
  return r;
}

int to_int(long long v) { return static_cast<int>(v); }

}  // namespace

EnvKind env_kind_from_string(const std::string& s) {
  if (s == "navigation" || s == "nav") return EnvKind::Navigation;
  if (s == "racing") return EnvKind::Racing;
  throw ConfigError("unknown environment '" + s + "' (expected navigation or racing)");
}

std::string to_string(EnvKind k) { return k == EnvKind::Navigation ? "navigation" : "racing"; }

EnvironmentSpec env_spec_from_config(const KvConfig& cfg, EnvironmentSpec spec) {
  spec.kind = env_kind_from_string(cfg.get_string("environment", to_string(spec.kind)));

  auto& n = spec.nav;
  n.bounds = rect_from(cfg, "nav.bounds", n.bounds);
  n.start_region = rect_from(cfg, "nav.start_region", n.start_region);
  n.goal_region = rect_from(cfg, "nav.goal_region", n.goal_region);
  n.num_obstacles = to_int(cfg.get_int("nav.obstacles", n.num_obstacles));
  n.obstacle_radius = cfg.get_double("nav.obstacle_radius", n.obstacle_radius);
  n.num_dynamic = to_int(cfg.get_int("nav.dynamic_obstacles", n.num_dynamic));
  const auto speed = cfg.get_doubles("nav.dynamic_speed", {n.min_dynamic_speed, n.max_dynamic_speed});
  if (speed.size() != 2 || speed[0] > speed[1] || speed[0] < 0.0) {
    throw ConfigError("config key 'nav.dynamic_speed': expected [min, max] with 0 <= min <= max");
  }
  n.min_dynamic_speed = speed[0];
  n.max_dynamic_speed = speed[1];
  n.clearance = cfg.get_double("nav.clearance", n.clearance);
  n.agent_radius = cfg.get_double("nav.agent_radius", n.agent_radius);
  n.goal_tolerance = cfg.get_double("nav.goal_tolerance", n.goal_tolerance);
  n.dt = cfg.get_double("nav.dt", n.dt);
  n.max_steps = to_int(cfg.get_int("nav.max_steps", n.max_steps));
  n.context_obstacles = to_int(cfg.get_int("nav.context_obstacles", std::max(n.context_obstacles, n.num_obstacles)));
  if (n.context_obstacles < n.num_obstacles) throw ConfigError("nav.context_obstacles must be >= nav.obstacles");

  auto& r = spec.racing;
  r.straight_length = cfg.get_double("racing.straight_length", r.straight_length);
  r.turn_radius = cfg.get_double("racing.turn_radius", r.turn_radius);
  r.half_width = cfg.get_double("racing.half_width", r.half_width);
  r.num_obstacles = to_int(cfg.get_int("racing.obstacles", r.num_obstacles));
  r.obstacle_radius = cfg.get_double("racing.obstacle_radius", r.obstacle_radius);
  r.start_clearance = cfg.get_double("racing.start_clearance", r.start_clearance);
  r.max_obstacle_offset = cfg.get_double("racing.max_obstacle_offset", r.max_obstacle_offset);
  r.dt = cfg.get_double("racing.dt", r.dt);
  r.max_steps = to_int(cfg.get_int("racing.max_steps", r.max_steps));
  r.lookahead_points = to_int(cfg.get_int("racing.lookahead_points", r.lookahead_points));
  r.lookahead_spacing = cfg.get_double("racing.lookahead_spacing", r.lookahead_spacing);
  r.literal_reward = cfg.get_bool("racing.literal_reward", r.literal_reward);
  r.vehicle.l_f = cfg.get_double("racing.lf", r.vehicle.l_f);
  r.vehicle.l_r = cfg.get_double("racing.lr", r.vehicle.l_r);
  r.vehicle.max_slip = cfg.get_double("racing.max_slip", r.vehicle.max_slip);
  r.vehicle.half_width = cfg.get_double("racing.vehicle_half_width", r.vehicle.half_width);
  return spec;
}

std::unique_ptr<Environment> make_environment(const EnvironmentSpec& spec, std::uint64_t seed) {
  if (spec.kind == EnvKind::Navigation) return std::make_unique<Navigation>(generate_nav_world(spec.nav, seed));
  return std::make_unique<Racing>(generate_racing_world(spec.racing, seed));
}

}  // namespace tmppi::env
