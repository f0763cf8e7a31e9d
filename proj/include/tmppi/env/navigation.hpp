#pragma once

#include <cstdint>
#include <stdexcept>

#include "tmppi/env/environment.hpp"

namespace tmppi::env {

inline constexpr double kNavObstaclePenalty = 10000.0;

struct NavWorld {
  Rect bounds{0.0, 20.0, 0.0, 20.0};
  std::vector<Obstacle> obstacles;
  Eigen::Vector2d goal{18.0, 18.0};
  State start = State::Zero(3);
  double agent_radius = 0.2;
  double goal_tolerance = 0.5;
  double dt = 0.1;
  int max_steps = 150;
  // Context slots reserved for obstacles; unused slots are zero-padded.
  int context_obstacles = 15;

  void validate() const;
};

/// Randomized world generation parameters.
struct NavGenParams {
  Rect bounds{0.0, 20.0, 0.0, 20.0};
  Rect start_region{1.0, 3.0, 1.0, 3.0};
  Rect goal_region{17.0, 19.0, 17.0, 19.0};
  int num_obstacles = 15;
  double obstacle_radius = 1.0;
  int num_dynamic = 0;
  double min_dynamic_speed = 0.1;
  double max_dynamic_speed = 0.5;
  // Free space kept around start and goal, beyond radius + agent_radius.
  double clearance = 1.0;
  double agent_radius = 0.2;
  double goal_tolerance = 0.5;
  double dt = 0.1;
  int max_steps = 150;
  int context_obstacles = 15;
  int max_placement_attempts = 10000;
};

/// Throws WorldGenerationError when obstacles cannot be placed.
NavWorld generate_nav_world(const NavGenParams& params, std::uint64_t seed);

/// Forward-Euler unicycle: state [x, y, theta], control [v, omega].
State unicycle_step(const State& x, const ControlInput& u, double dt);

bool nav_in_collision(const Eigen::Vector2d& p, const NavWorld& world);
/// ||p - goal|| + 10000 * 1[collision or out of bounds].
double nav_running_cost(const State& x, const NavWorld& world);

/// [goal_x, goal_y, o1.x, o1.y, ...] with `context_obstacles` slots.
Context nav_context(const NavWorld& world);
/// true for slots holding real data (goal always valid).
std::vector<bool> nav_context_mask(const NavWorld& world);

ControlBounds nav_control_bounds();

class Navigation final : public Environment {
 public:
  explicit Navigation(NavWorld world);

  std::string name() const override { return "navigation"; }
  int state_dim() const override { return 3; }
  int control_dim() const override { return 2; }
  int context_dim() const override { return 2 + 2 * world_.context_obstacles; }
  double dt() const override { return world_.dt; }
  int max_steps() const override { return world_.max_steps; }
  const ControlBounds& control_bounds() const override { return bounds_; }

  State initial_state() const override { return world_.start; }
  State step(const State& x, const ControlInput& u) const override { return unicycle_step(x, u, world_.dt); }
  double running_cost(const State& x, const ControlInput& /*u*/) const override {
    return nav_running_cost(x, world_);
  }

  Context context(const State& /*x*/) const override { return nav_context(world_); }
  Outcome status(const State& x, int step) const override;
  void on_step(const State& x) override;
  const std::vector<Obstacle>& obstacles() const override { return world_.obstacles; }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<Navigation>(*this); }

  const NavWorld& world() const { return world_; }

 private:
  NavWorld world_;
  ControlBounds bounds_;
};

}  // namespace tmppi::env
