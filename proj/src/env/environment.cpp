#include "tmppi/env/environment.hpp"

#include <stdexcept>

namespace tmppi::env {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Running:
      return "running";
    case Outcome::GoalReached:
      return "goal_reached";
    case Outcome::Collided:
      return "collided";
    case Outcome::StepLimit:
      return "step_limit";
  }
  return "unknown";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "running") return Outcome::Running;
  if (s == "goal_reached") return Outcome::GoalReached;
  if (s == "collided") return Outcome::Collided;
  if (s == "step_limit") return Outcome::StepLimit;
  throw std::invalid_argument("unknown outcome '" + s + "'");
}

std::vector<Obstacle> advance_obstacles(std::vector<Obstacle> obstacles, const Rect& bounds, double dt) {
  for (auto& ob : obstacles) {
    ob.center += ob.velocity * dt;
    if (ob.center.x() >= bounds.x_max && ob.velocity.x() > 0.0) {
      ob.center.x() = 2.0 * bounds.x_max - ob.center.x();
      ob.velocity.x() = -ob.velocity.x();
    } else if (ob.center.x() <= bounds.x_min && ob.velocity.x() < 0.0) {
      ob.center.x() = 2.0 * bounds.x_min - ob.center.x();
      ob.velocity.x() = -ob.velocity.x();
    }
    if (ob.center.y() >= bounds.y_max && ob.velocity.y() > 0.0) {
      ob.center.y() = 2.0 * bounds.y_max - ob.center.y();
      ob.velocity.y() = -ob.velocity.y();
    } else if (ob.center.y() <= bounds.y_min && ob.velocity.y() < 0.0) {
      ob.center.y() = 2.0 * bounds.y_min - ob.center.y();
      ob.velocity.y() = -ob.velocity.y();
    }
  }
  return obstacles;
}

}  // namespace tmppi::env
