#include "tmppi/env/navigation.hpp"

#include <cmath>
#include <numbers>

#include "tmppi/core/rng.hpp"

namespace tmppi::env {

void NavWorld::validate() const {
  if (!(dt > 0.0)) throw ConfigError("navigation: dt must be > 0");
  if (max_steps < 1) throw ConfigError("navigation: max_steps must be >= 1");
  if (context_obstacles < static_cast<int>(obstacles.size())) {
    throw ConfigError("navigation: more obstacles than context slots");
  }
  if (!bounds.contains(goal)) throw ConfigError("navigation: goal outside bounds");
  for (const auto& ob : obstacles) {
    if (!(ob.radius > 0.0)) throw ConfigError("navigation: obstacle radius must be > 0");
    if ((ob.center - goal).norm() < ob.radius) throw ConfigError("navigation: goal inside an obstacle");
  }
}

NavWorld generate_nav_world(const NavGenParams& params, std::uint64_t seed) {
  if (params.num_dynamic > params.num_obstacles) throw ConfigError("navigation: more dynamic obstacles than obstacles");
  SeededRng rng(seed, 0x6e6176);  // "nav"

  NavWorld world;
  world.bounds = params.bounds;
  world.agent_radius = params.agent_radius;
  world.goal_tolerance = params.goal_tolerance;
  world.dt = params.dt;
  world.max_steps = params.max_steps;
  world.context_obstacles = params.context_obstacles;

  const Eigen::Vector2d start(rng.uniform(params.start_region.x_min, params.start_region.x_max),
                              rng.uniform(params.start_region.y_min, params.start_region.y_max));
  world.goal = Eigen::Vector2d(rng.uniform(params.goal_region.x_min, params.goal_region.x_max),
                               rng.uniform(params.goal_region.y_min, params.goal_region.y_max));
  const Eigen::Vector2d to_goal = world.goal - start;
  world.start = State(3);
  world.start << start.x(), start.y(), std::atan2(to_goal.y(), to_goal.x());

  const double keep_out = params.obstacle_radius + params.agent_radius + params.clearance;
  int attempts = 0;
  while (static_cast<int>(world.obstacles.size()) < params.num_obstacles) {
    if (++attempts > params.max_placement_attempts) {
      throw WorldGenerationError("navigation: could not place " + std::to_string(params.num_obstacles) +
                                 " obstacles (seed " + std::to_string(seed) + ")");
    }
    Obstacle ob;
    ob.radius = params.obstacle_radius;
    ob.center = Eigen::Vector2d(rng.uniform(params.bounds.x_min, params.bounds.x_max),
                                rng.uniform(params.bounds.y_min, params.bounds.y_max));
    if ((ob.center - start).norm() < keep_out || (ob.center - world.goal).norm() < keep_out) continue;
    world.obstacles.push_back(ob);
  }

  for (int i = 0; i < params.num_dynamic; ++i) {
    const double speed = rng.uniform(params.min_dynamic_speed, params.max_dynamic_speed);
    const double heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
    world.obstacles[i].velocity = Eigen::Vector2d(speed * std::cos(heading), speed * std::sin(heading));
  }

  world.validate();
  return world;
}

State unicycle_step(const State& x, const ControlInput& u, double dt) {
  State out(3);
  const double v = u[0];
  const double omega = u[1];
  out[0] = x[0] + dt * v * std::cos(x[2]);
  out[1] = x[1] + dt * v * std::sin(x[2]);
  const double heading = x[2] + dt * omega;
  out[2] = std::isfinite(heading) ? wrap_angle(heading) : heading;
  return out;
}

bool nav_in_collision(const Eigen::Vector2d& p, const NavWorld& world) {
  for (const auto& ob : world.obstacles) {
    if ((p - ob.center).norm() < ob.radius + world.agent_radius) return true;
  }
  return false;
}

double nav_running_cost(const State& x, const NavWorld& world) {
  const Eigen::Vector2d p(x[0], x[1]);
  const double goal_term = (p - world.goal).norm();
  const bool violation = !world.bounds.contains(p) || nav_in_collision(p, world);
  return goal_term + (violation ? kNavObstaclePenalty : 0.0);
}

Context nav_context(const NavWorld& world) {
  Context c = Context::Zero(2 + 2 * world.context_obstacles);
  c[0] = world.goal.x();
  c[1] = world.goal.y();
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    c[2 + 2 * i] = world.obstacles[i].center.x();
    c[3 + 2 * i] = world.obstacles[i].center.y();
  }
  return c;
}

std::vector<bool> nav_context_mask(const NavWorld& world) {
  std::vector<bool> mask(2 + 2 * world.context_obstacles, false);
  mask[0] = mask[1] = true;
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) mask[2 + 2 * i] = mask[3 + 2 * i] = true;
  return mask;
}

ControlBounds nav_control_bounds() {
  ControlBounds b;
  b.lo = ControlInput(2);
  b.hi = ControlInput(2);
  b.lo << 0.0, -1.0;
  b.hi << 2.0, 1.0;
  return b;
}

Navigation::Navigation(NavWorld world) : world_(std::move(world)), bounds_(nav_control_bounds()) {
  world_.validate();
}

Outcome Navigation::status(const State& x, int step) const {
  const Eigen::Vector2d p(x[0], x[1]);
  if ((p - world_.goal).norm() < world_.goal_tolerance) return Outcome::GoalReached;
  if (!world_.bounds.contains(p) || nav_in_collision(p, world_)) return Outcome::Collided;
  if (step >= world_.max_steps) return Outcome::StepLimit;
  return Outcome::Running;
}

void Navigation::on_step(const State& /*x*/) {
  world_.obstacles = advance_obstacles(std::move(world_.obstacles), world_.bounds, world_.dt);
}

}  // namespace tmppi::env
