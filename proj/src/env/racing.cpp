#include "tmppi/env/racing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tmppi/core/rng.hpp"

namespace tmppi::env {

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                        const Eigen::Vector2d& q2) {
  const double d1 = cross2(q2 - q1, p1 - q1);
  const double d2 = cross2(q2 - q1, p2 - q1);
  const double d3 = cross2(p2 - p1, q1 - p1);
  const double d4 = cross2(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

void VehicleParams::validate() const {
  if (!(l_f > 0.0) || !(l_r > 0.0)) throw ConfigError("vehicle: l_f and l_r must be > 0");
  if (!(max_slip > 0.0)) throw ConfigError("vehicle: max_slip must be > 0");
}

Track::Track(std::vector<Eigen::Vector2d> centerline, double half_width)
    : points_(std::move(centerline)), half_width_(half_width) {
  const std::size_t n = points_.size();
  if (n < 3) throw ConfigError("track: need at least 3 centerline points");
  if (!(half_width_ > 0.0)) throw ConfigError("track: half_width must be > 0");
  cumulative_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double len = (points_[(i + 1) % n] - points_[i]).norm();
    if (!(len > 1e-9)) throw ConfigError("track: zero-length segment at index " + std::to_string(i));
    cumulative_[i + 1] = cumulative_[i] + len;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing segment
      if (segments_intersect(points_[i], points_[(i + 1) % n], points_[j], points_[(j + 1) % n])) {
        throw ConfigError("track: centerline self-intersects");
      }
    }
  }
}

TrackFrame Track::frame(const Eigen::Vector2d& p) const {
  const std::size_t n = points_.size();
  double best_dist = std::numeric_limits<double>::infinity();
  TrackFrame best;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = points_[i];
    const Eigen::Vector2d seg = points_[(i + 1) % n] - a;
    const double len = cumulative_[i + 1] - cumulative_[i];
    const double t = std::clamp((p - a).dot(seg) / (len * len), 0.0, 1.0);
    const Eigen::Vector2d proj = a + t * seg;
    const double dist = (p - proj).norm();
    if (dist < best_dist) {
      best_dist = dist;
      const double side = cross2(seg, p - proj);
      best.lateral = side >= 0.0 ? dist : -dist;
      best.arc = cumulative_[i] + t * len;
    }
  }
  if (best.arc >= length()) best.arc -= length();
  best.off_track = std::abs(best.lateral) > half_width_;
  return best;
}

std::size_t Track::segment_at(double s) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto idx = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  return std::min(idx == 0 ? 0 : idx - 1, points_.size() - 1);
}

Eigen::Vector2d Track::point_at(double s) const {
  s = std::fmod(s, length());
  if (s < 0.0) s += length();
  const std::size_t i = segment_at(s);
  const double len = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / len;
  return points_[i] + t * (points_[(i + 1) % points_.size()] - points_[i]);
}

Eigen::Vector2d Track::tangent_at(double s) const {
  s = std::fmod(s, length());
  if (s < 0.0) s += length();
  const std::size_t i = segment_at(s);
  return (points_[(i + 1) % points_.size()] - points_[i]).normalized();
}

Track make_stadium_track(double straight_length, double turn_radius, double half_width, int points_per_turn) {
  if (!(straight_length > 0.0) || !(turn_radius > 0.0) || points_per_turn < 2) {
    throw ConfigError("stadium track: invalid geometry");
  }
  const double hl = 0.5 * straight_length;
  std::vector<Eigen::Vector2d> pts;
  pts.emplace_back(-hl, -turn_radius);
  for (int j = 0; j <= points_per_turn; ++j) {
    const double a = -0.5 * std::numbers::pi + std::numbers::pi * j / points_per_turn;
    pts.emplace_back(hl + turn_radius * std::cos(a), turn_radius * std::sin(a));
  }
  for (int j = 0; j < points_per_turn; ++j) {
    const double a = 0.5 * std::numbers::pi + std::numbers::pi * j / points_per_turn;
    pts.emplace_back(-hl + turn_radius * std::cos(a), turn_radius * std::sin(a));
  }
  return Track(std::move(pts), half_width);
}

TrackFrame track_frame(const Eigen::Vector2d& p, const Track& track) { return track.frame(p); }

double slip_angle(double steering, const VehicleParams& params) {
  return std::atan(params.l_r * std::tan(steering) / (params.l_f + params.l_r));
}

State bicycle_step(const State& x, const ControlInput& u, const VehicleParams& params, double dt) {
  const double beta = slip_angle(u[1], params);
  const double v = x[3];
  State out(4);
  out[0] = x[0] + dt * v * std::cos(x[2] + beta);
  out[1] = x[1] + dt * v * std::sin(x[2] + beta);
  const double heading = x[2] + dt * v * std::sin(beta) / params.l_r;
  out[2] = std::isfinite(heading) ? wrap_angle(heading) : heading;
  out[3] = std::max(0.0, v + dt * u[0]);
  return out;
}

bool racing_violation(const State& x, const RacingWorld& world) {
  const Eigen::Vector2d p(x[0], x[1]);
  if (world.track.frame(p).off_track) return true;
  for (const auto& ob : world.obstacles) {
    if ((p - ob.center).norm() < ob.radius + world.vehicle.half_width) return true;
  }
  return false;
}

double racing_running_cost(const State& x, const ControlInput& u, const RacingWorld& world) {
  const Eigen::Vector2d p(x[0], x[1]);
  const TrackFrame f = world.track.frame(p);
  bool violation = f.off_track;
  for (const auto& ob : world.obstacles) {
    if (violation) break;
    violation = (p - ob.center).norm() < ob.radius + world.vehicle.half_width;
  }
  const bool drifting = std::abs(slip_angle(u[1], world.vehicle)) > world.vehicle.max_slip;
  const double reward = 2.0 * std::abs(x[3]) - std::abs(f.lateral) - kDriftPenalty * (drifting ? 1.0 : 0.0) -
                        kOffTrackPenalty * (violation ? 1.0 : 0.0);
  return world.literal_reward ? reward : -reward;
}

RacingWorld generate_racing_world(const RacingGenParams& params, std::uint64_t seed) {
  params.vehicle.validate();
  RacingWorld world;
  world.track = make_stadium_track(params.straight_length, params.turn_radius, params.half_width);
  if (!(params.half_width > params.vehicle.half_width)) throw ConfigError("racing: track narrower than the vehicle");
  world.vehicle = params.vehicle;
  world.dt = params.dt;
  world.max_steps = params.max_steps;
  world.lookahead_points = params.lookahead_points;
  world.lookahead_spacing = params.lookahead_spacing;
  world.literal_reward = params.literal_reward;

  const Eigen::Vector2d p0 = world.track.point_at(0.0);
  const Eigen::Vector2d t0 = world.track.tangent_at(0.0);
  world.start = State(4);
  world.start << p0.x(), p0.y(), std::atan2(t0.y(), t0.x()), 0.0;

  SeededRng rng(seed, 0x72616365);  // "race"
  const double usable = world.track.length() - 1.5 * params.start_clearance;
  int attempts = 0;
  while (static_cast<int>(world.obstacles.size()) < params.num_obstacles) {
    if (++attempts > params.max_placement_attempts) {
      throw WorldGenerationError("racing: could not place " + std::to_string(params.num_obstacles) + " obstacles");
    }
    const double s = params.start_clearance + rng.uniform() * std::max(usable, 0.0);
    const double offset = rng.uniform(-params.max_obstacle_offset, params.max_obstacle_offset);
    const Eigen::Vector2d tangent = world.track.tangent_at(s);
    const Eigen::Vector2d normal(-tangent.y(), tangent.x());
    Obstacle ob;
    ob.radius = params.obstacle_radius;
    ob.center = world.track.point_at(s) + offset * normal;
    bool overlaps = false;
    for (const auto& other : world.obstacles) {
      overlaps = overlaps || (other.center - ob.center).norm() < other.radius + ob.radius;
    }
    if (!overlaps) world.obstacles.push_back(ob);
  }
  return world;
}

ControlBounds racing_control_bounds() {
  ControlBounds b;
  b.lo = ControlInput(2);
  b.hi = ControlInput(2);
  b.lo << -2.0, -0.25;
  b.hi << 2.0, 0.25;
  return b;
}

Racing::Racing(RacingWorld world) : world_(std::move(world)), bounds_(racing_control_bounds()) {
  world_.vehicle.validate();
  if (!(world_.dt > 0.0)) throw ConfigError("racing: dt must be > 0");
  last_arc_ = world_.track.frame(Eigen::Vector2d(world_.start[0], world_.start[1])).arc;
}

Context Racing::context(const State& x) const {
  const Eigen::Vector2d pos(x[0], x[1]);
  const double s0 = world_.track.frame(pos).arc;
  const double c = std::cos(x[2]);
  const double s = std::sin(x[2]);
  Context out(2 * world_.lookahead_points);
  for (int j = 0; j < world_.lookahead_points; ++j) {
    const Eigen::Vector2d rel = world_.track.point_at(s0 + (j + 1) * world_.lookahead_spacing) - pos;
    out[2 * j] = c * rel.x() + s * rel.y();
    out[2 * j + 1] = -s * rel.x() + c * rel.y();
  }
  return out;
}

Outcome Racing::status(const State& x, int step) const {
  if (progress_ >= world_.track.length()) return Outcome::GoalReached;
  if (racing_violation(x, world_)) return Outcome::Collided;
  if (step >= world_.max_steps) return Outcome::StepLimit;
  return Outcome::Running;
}

void Racing::on_step(const State& x) {
  const double arc = world_.track.frame(Eigen::Vector2d(x[0], x[1])).arc;
  const double len = world_.track.length();
  double ds = arc - last_arc_;
  if (ds >= 0.5 * len) ds -= len;
  if (ds < -0.5 * len) ds += len;
  progress_ += ds;
  last_arc_ = arc;
}

}  // namespace tmppi::env
