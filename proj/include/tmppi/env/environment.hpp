#pragma once

#include <Eigen/Core>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmppi/core/types.hpp"

namespace tmppi::env {

/// A randomized world could not be built from the given seed.
class WorldGenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Outcome { Running, GoalReached, Collided, StepLimit };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct Obstacle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
};

/// Moves obstacle centers by velocity * dt. A center that reaches a bound has
/// the velocity component normal to that bound negated and its position
/// mirrored back inside, so speed is conserved.
std::vector<Obstacle> advance_obstacles(std::vector<Obstacle> obstacles, const Rect& bounds, double dt);

/// A benchmark world.
///
/// The const interface (dynamics, costs, context) is what MPPI rollouts see and
/// is safe to call from several threads at once. `on_step` mutates episode
/// state (moving obstacles, lap progress) and is only called by the episode
/// loop between control steps.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual int context_dim() const = 0;
  virtual double dt() const = 0;
  virtual int max_steps() const = 0;
  virtual const ControlBounds& control_bounds() const = 0;

  virtual State initial_state() const = 0;
  virtual State step(const State& x, const ControlInput& u) const = 0;
  /// Running cost s(x) of a state reached while executing control u.
  virtual double running_cost(const State& x, const ControlInput& u) const = 0;
  virtual double terminal_cost(const State& /*x*/) const { return 0.0; }

  virtual Context context(const State& x) const = 0;
  virtual Outcome status(const State& x, int step) const = 0;

  /// Advances episode-level state after the realized transition to `x`.
  virtual void on_step(const State& x) = 0;
  virtual const std::vector<Obstacle>& obstacles() const = 0;

  virtual std::unique_ptr<Environment> clone() const = 0;
};

}  // namespace tmppi::env
