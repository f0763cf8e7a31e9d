#pragma once

#include <cstdint>
#include <vector>

#include "tmppi/env/environment.hpp"

namespace tmppi::env {

inline constexpr double kDriftPenalty = 5000.0;
inline constexpr double kOffTrackPenalty = 1.0e6;

struct VehicleParams {
  double l_f = 1.0;
  double l_r = 1.0;
  double max_slip = 0.25 * 3.14159265358979323846;  // 45 degrees
  double half_width = 0.5;

  void validate() const;
};

struct TrackFrame {
  double lateral = 0.0;  // signed; positive to the left of the travel direction
  double arc = 0.0;
  bool off_track = false;
};

/// Closed centerline polyline with a constant half width.
class Track {
 public:
  /// The closing segment (last point back to the first) is implicit.
  /// Throws ConfigError on degenerate segments or self-intersection.
  Track(std::vector<Eigen::Vector2d> centerline, double half_width);

  const std::vector<Eigen::Vector2d>& centerline() const { return points_; }
  double half_width() const { return half_width_; }
  double length() const { return cumulative_.back(); }

  TrackFrame frame(const Eigen::Vector2d& p) const;
  /// Centerline point at arclength s (taken modulo the track length).
  Eigen::Vector2d point_at(double s) const;
  /// Unit travel direction at arclength s.
  Eigen::Vector2d tangent_at(double s) const;

 private:
  std::size_t segment_at(double s) const;

  std::vector<Eigen::Vector2d> points_;
  std::vector<double> cumulative_;  // size points_.size() + 1
  double half_width_;
};

/// Counter-clockwise stadium oval: two straights joined by semicircles.
/// Arclength 0 is the start of the bottom straight, travelling +x.
Track make_stadium_track(double straight_length, double turn_radius, double half_width, int points_per_turn = 48);

TrackFrame track_frame(const Eigen::Vector2d& p, const Track& track);

/// Kinematic bicycle: state [x, y, psi, v], control [a, delta].
State bicycle_step(const State& x, const ControlInput& u, const VehicleParams& params, double dt);
double slip_angle(double steering, const VehicleParams& params);

struct RacingWorld {
  Track track = make_stadium_track(30.0, 8.0, 2.0);
  VehicleParams vehicle;
  std::vector<Obstacle> obstacles;
  State start = State::Zero(4);
  double dt = 0.1;
  int max_steps = 500;
  int lookahead_points = 10;
  double lookahead_spacing = 3.0;
  // Minimize the literal reward instead of its negation.
  bool literal_reward = false;
};

/// -2|v| + |d| + 5000 * 1[|beta| > max_slip] + 1e6 * 1[off track or obstacle hit],
/// or the literal reward when world.literal_reward is set.
double racing_running_cost(const State& x, const ControlInput& u, const RacingWorld& world);
bool racing_violation(const State& x, const RacingWorld& world);

struct RacingGenParams {
  double straight_length = 30.0;
  double turn_radius = 8.0;
  double half_width = 2.0;
  int num_obstacles = 50;
  double obstacle_radius = 0.8;
  // Obstacles stay at least this far (arclength) from the start line.
  double start_clearance = 10.0;
  // Maximum |lateral offset| of an obstacle center.
  double max_obstacle_offset = 1.2;
  double dt = 0.1;
  int max_steps = 500;
  int lookahead_points = 10;
  double lookahead_spacing = 3.0;
  bool literal_reward = false;
  VehicleParams vehicle;
  int max_placement_attempts = 10000;
};

RacingWorld generate_racing_world(const RacingGenParams& params, std::uint64_t seed);
ControlBounds racing_control_bounds();

class Racing final : public Environment {
 public:
  explicit Racing(RacingWorld world);

  std::string name() const override { return "racing"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 2; }
  int context_dim() const override { return 2 * world_.lookahead_points; }
  double dt() const override { return world_.dt; }
  int max_steps() const override { return world_.max_steps; }
  const ControlBounds& control_bounds() const override { return bounds_; }

  State initial_state() const override { return world_.start; }
  State step(const State& x, const ControlInput& u) const override {
    return bicycle_step(x, u, world_.vehicle, world_.dt);
  }
  double running_cost(const State& x, const ControlInput& u) const override {
    return racing_running_cost(x, u, world_);
  }

  /// Upcoming centerline points in the vehicle frame.
  Context context(const State& x) const override;
  Outcome status(const State& x, int step) const override;
  void on_step(const State& x) override;
  const std::vector<Obstacle>& obstacles() const override { return world_.obstacles; }

  std::unique_ptr<Environment> clone() const override { return std::make_unique<Racing>(*this); }

  const RacingWorld& world() const { return world_; }
  double lap_progress() const { return progress_; }

 private:
  RacingWorld world_;
  ControlBounds bounds_;
  double last_arc_ = 0.0;
  double progress_ = 0.0;
};

}  // namespace tmppi::env
