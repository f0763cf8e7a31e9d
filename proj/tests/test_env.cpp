#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tmppi/core/rng.hpp"
#include "tmppi/env/navigation.hpp"
#include "tmppi/env/racing.hpp"
#include "tmppi/env/world_config.hpp"

using namespace tmppi;
using namespace tmppi::env;

namespace {

State state(std::initializer_list<double> v) {
  State out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ControlInput control(double a, double b) {
  ControlInput u(2);
  u << a, b;
  return u;
}

NavWorld empty_world() {
  NavWorld w;
  w.goal = Eigen::Vector2d(18.0, 18.0);
  w.start = state({2.0, 2.0, 0.0});
  return w;
}

}  // namespace

TEST_CASE("unicycle_step examples") {
  const State x0 = state({1.0, 2.0, 0.3});
  const State still = unicycle_step(x0, control(0.0, 0.5), 0.1);
  CHECK(still[0] == 1.0);
  CHECK(still[1] == 2.0);
  CHECK(still[2] == doctest::Approx(0.35).epsilon(1e-15));

  const State x1 = unicycle_step(state({0.0, 0.0, 0.0}), control(1.0, 0.0), 0.1);
  CHECK(x1[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(x1[1] == 0.0);
  CHECK(x1[2] == 0.0);

  // A full turn returns the heading to its start.
  State x = state({0.0, 0.0, 0.2});
  const int steps = 63;
  const double dt = 2.0 * std::numbers::pi / steps;
  for (int i = 0; i < steps; ++i) x = unicycle_step(x, control(0.0, 1.0), dt);
  CHECK(std::abs(wrap_angle(x[2] - 0.2)) < 1e-9);
  CHECK(x[2] > -std::numbers::pi);
  CHECK(x[2] <= std::numbers::pi);
}

TEST_CASE("nav_running_cost examples") {
  NavWorld w = empty_world();
  CHECK(nav_running_cost(state({18.0, 18.0, 0.0}), w) == 0.0);

  // 5 m from the goal and inside an obstacle.
  w.obstacles.push_back({Eigen::Vector2d(13.0, 18.0), 1.0, Eigen::Vector2d::Zero()});
  CHECK(nav_running_cost(state({13.0, 18.0, 0.0}), w) == doctest::Approx(10005.0).epsilon(1e-14));

  // Just outside the bounds.
  const double d = (Eigen::Vector2d(20.0 + 1e-9, 18.0) - w.goal).norm();
  CHECK(nav_running_cost(state({20.0 + 1e-9, 18.0, 0.0}), w) == doctest::Approx(d + 10000.0).epsilon(1e-14));
  CHECK(nav_running_cost(state({20.0, 18.0, 0.0}), w) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("nav cost is nonnegative and the penalty is all or nothing") {
  NavWorld w = generate_nav_world(NavGenParams{}, 3);
  SeededRng rng(1, 2);
  for (int i = 0; i < 5000; ++i) {
    const State x = state({rng.uniform(-2.0, 22.0), rng.uniform(-2.0, 22.0), 0.0});
    const double c = nav_running_cost(x, w);
    const double dist = (Eigen::Vector2d(x[0], x[1]) - w.goal).norm();
    CHECK(c >= 0.0);
    const double penalty = c - dist;
    CHECK((std::abs(penalty) < 1e-9 || std::abs(penalty - kNavObstaclePenalty) < 1e-9));
  }
}

TEST_CASE("bicycle_step examples") {
  const VehicleParams p;
  const State x1 = bicycle_step(state({0.0, 0.0, 0.0, 2.0}), control(0.0, 0.0), p, 0.1);
  CHECK(x1[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(x1[1] == 0.0);
  CHECK(x1[2] == 0.0);
  CHECK(x1[3] == 2.0);

  const State x2 = bicycle_step(state({3.0, 4.0, 0.5, 0.0}), control(1.5, 0.2), p, 0.1);
  CHECK(x2[0] == 3.0);
  CHECK(x2[1] == 4.0);
  CHECK(x2[2] == 0.5);
  CHECK(x2[3] == doctest::Approx(0.15).epsilon(1e-15));
  const State x3 = bicycle_step(state({3.0, 4.0, 0.5, 0.0}), control(-1.5, 0.2), p, 0.1);
  CHECK(x3[3] == 0.0);

  CHECK(slip_angle(0.0, p) == 0.0);
}

TEST_CASE("slip angle stays below the drift limit for admissible steering") {
  VehicleParams p;
  for (double lr : {0.1, 0.5, 1.0, 1.9}) {
    p.l_r = lr;
    p.l_f = 2.0 - lr;
    for (double delta = -0.25; delta <= 0.25; delta += 0.01) {
      CHECK(std::abs(slip_angle(delta, p)) <= std::atan(std::tan(0.25)) + 1e-15);
      CHECK(std::abs(slip_angle(delta, p)) < std::numbers::pi / 4.0);
    }
  }
}

TEST_CASE("track_frame examples") {
  // Long thin rectangle whose bottom edge is the segment (0,0)-(10,0).
  const Track t({{0.0, 0.0}, {10.0, 0.0}, {10.0, 20.0}, {0.0, 20.0}}, 2.5);
  const TrackFrame on = track_frame({4.0, 0.0}, t);
  CHECK(on.lateral == 0.0);
  CHECK(on.arc == doctest::Approx(4.0));
  CHECK_FALSE(on.off_track);

  const TrackFrame f = track_frame({5.0, 2.0}, t);
  CHECK(std::abs(f.lateral) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.arc == doctest::Approx(5.0).epsilon(1e-14));
  CHECK_FALSE(f.off_track);
  CHECK(track_frame({5.0, -2.5 - 1e-9}, t).off_track);

  CHECK_THROWS_AS(Track({{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}}, 1.0), ConfigError);
  CHECK_THROWS_AS(Track({{0.0, 0.0}, {2.0, 2.0}, {2.0, 0.0}, {0.0, 2.0}}, 0.5), ConfigError);
}

TEST_CASE("stadium track geometry") {
  const Track t = make_stadium_track(30.0, 8.0, 2.0);
  CHECK(t.length() == doctest::Approx(60.0 + 2.0 * std::numbers::pi * 8.0).epsilon(1e-3));
  for (double s = 0.0; s < t.length(); s += 0.7) {
    const TrackFrame f = t.frame(t.point_at(s));
    CHECK(std::abs(f.lateral) < 1e-9);
  }
}

TEST_CASE("racing_running_cost examples") {
  RacingWorld w;
  const Eigen::Vector2d p = w.track.point_at(5.0);
  CHECK(racing_running_cost(state({p.x(), p.y(), 0.0, 3.0}), control(0.0, 0.0), w) == doctest::Approx(-6.0));
  CHECK(racing_running_cost(state({p.x(), p.y(), 0.0, 0.0}), control(0.0, 0.0), w) == doctest::Approx(0.0));
  const double off = racing_running_cost(state({p.x(), p.y() - 5.0, 0.0, 3.0}), control(0.0, 0.0), w);
  CHECK(off == doctest::Approx(-6.0 + 5.0 + kOffTrackPenalty));
  w.literal_reward = true;
  CHECK(racing_running_cost(state({p.x(), p.y(), 0.0, 3.0}), control(0.0, 0.0), w) == doctest::Approx(6.0));
}

TEST_CASE("advance_obstacles examples") {
  const Rect b{0.0, 10.0, 0.0, 10.0};
  std::vector<Obstacle> still{{Eigen::Vector2d(5.0, 5.0), 1.0, Eigen::Vector2d::Zero()}};
  CHECK(advance_obstacles(still, b, 0.1)[0].center == Eigen::Vector2d(5.0, 5.0));

  std::vector<Obstacle> wall{{Eigen::Vector2d(10.0, 5.0), 1.0, Eigen::Vector2d(0.3, 0.0)}};
  const auto bounced = advance_obstacles(wall, b, 0.1);
  CHECK(bounced[0].velocity.x() == doctest::Approx(-0.3));
  CHECK(bounced[0].center.x() <= 10.0);

  std::vector<Obstacle> free{{Eigen::Vector2d(2.0, 3.0), 1.0, Eigen::Vector2d(0.2, -0.1)}};
  for (int i = 0; i < 10; ++i) free = advance_obstacles(free, b, 0.1);
  CHECK(free[0].center.x() == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(free[0].center.y() == doctest::Approx(2.9).epsilon(1e-12));
}

TEST_CASE("obstacle reflection conserves speed") {
  const Rect b{0.0, 4.0, 0.0, 3.0};
  SeededRng rng(8, 0);
  std::vector<Obstacle> obs;
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(-3.0, 3.0);
    const double s = rng.uniform(0.1, 0.5);
    obs.push_back({Eigen::Vector2d(rng.uniform(0.0, 4.0), rng.uniform(0.0, 3.0)), 1.0,
                   Eigen::Vector2d(s * std::cos(a), s * std::sin(a))});
  }
  std::vector<double> speed;
  for (const auto& o : obs) speed.push_back(o.velocity.norm());
  for (int t = 0; t < 2000; ++t) {
    obs = advance_obstacles(obs, b, 0.1);
    for (std::size_t i = 0; i < obs.size(); ++i) {
      CHECK(obs[i].velocity.norm() == doctest::Approx(speed[i]).epsilon(1e-12));
      CHECK(b.contains(obs[i].center));
    }
  }
}

TEST_CASE("navigation context layout") {
  NavWorld w = generate_nav_world(NavGenParams{}, 5);
  const Context c = nav_context(w);
  CHECK(c.size() == 32);
  CHECK(c[0] == w.goal.x());
  CHECK(c[3] == w.obstacles[0].center.y());

  NavWorld empty = empty_world();
  const Context e = nav_context(empty);
  CHECK(e.size() == 32);
  CHECK(e[0] == 18.0);
  CHECK(e[1] == 18.0);
  CHECK(e.tail(30).isZero(0.0));
  const auto mask = nav_context_mask(empty);
  CHECK(mask.size() == 32);
  CHECK(mask[0]);
  CHECK(mask[1]);
  CHECK_FALSE(mask[2]);
  CHECK_FALSE(mask[31]);
}

TEST_CASE("racing context on a straight is centered") {
  RacingWorld w;
  w.obstacles.clear();
  const Eigen::Vector2d p = w.track.point_at(1.0);
  Racing r(w);
  const Context c = r.context(state({p.x(), p.y(), 0.0, 5.0}));
  CHECK(c.size() == 20);
  for (int j = 0; j < 9; ++j) {
    CHECK(std::abs(c[2 * j + 1]) < 1e-9);
    CHECK(c[2 * j] == doctest::Approx(3.0 * (j + 1)));
  }
}

TEST_CASE("context length is constant over an episode") {
  Navigation nav(generate_nav_world(NavGenParams{.num_dynamic = 5}, 2));
  State x = nav.initial_state();
  for (int t = 0; t < 50; ++t) {
    CHECK(nav.context(x).size() == 32);
    x = nav.step(x, control(1.0, 0.1));
    nav.on_step(x);
  }
}

TEST_CASE("navigation status") {
  NavWorld w = empty_world();
  w.obstacles.push_back({Eigen::Vector2d(10.0, 10.0), 1.0, Eigen::Vector2d::Zero()});
  Navigation nav(w);
  CHECK(nav.status(state({18.4, 18.0, 0.0}), 3) == Outcome::GoalReached);
  CHECK(nav.status(state({5.0, 5.0, 0.0}), 150) == Outcome::StepLimit);
  CHECK(nav.status(state({5.0, 5.0, 0.0}), 149) == Outcome::Running);
  CHECK(nav.status(state({10.5, 10.0, 0.0}), 3) == Outcome::Collided);
  CHECK(nav.status(state({-0.1, 10.0, 0.0}), 3) == Outcome::Collided);
}

TEST_CASE("racing lap completion on a synthetic lap") {
  RacingGenParams gp;
  gp.num_obstacles = 0;
  const RacingWorld w = generate_racing_world(gp, 1);
  Racing r(w);
  const double len = w.track.length();
  int step = 0;
  State x = r.initial_state();
  for (double s = 0.5; s < len + 1.0; s += 0.5) {
    const Eigen::Vector2d p = w.track.point_at(s);
    x = state({p.x(), p.y(), 0.0, 5.0});
    r.on_step(x);
    ++step;
    CHECK(r.lap_progress() == doctest::Approx(s).epsilon(1e-9));
    CHECK(r.status(x, step) == (s < len ? Outcome::Running : Outcome::GoalReached));
  }
  CHECK(r.status(x, step) == Outcome::GoalReached);
}

TEST_CASE("racing progress does not count backwards motion as a lap") {
  RacingGenParams gp;
  gp.num_obstacles = 0;
  const RacingWorld w = generate_racing_world(gp, 1);
  Racing r(w);
  const double len = w.track.length();
  State x = r.initial_state();
  for (double s = -0.5; s > -len + 1.0; s -= 0.5) {
    const Eigen::Vector2d p = w.track.point_at(s);
    x = state({p.x(), p.y(), 0.0, 1.0});
    r.on_step(x);
  }
  CHECK(r.lap_progress() < 0.0);
  CHECK(r.status(x, 10) == Outcome::Running);
}

TEST_CASE("generated navigation worlds keep start and goal clear") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NavWorld w = generate_nav_world(NavGenParams{}, seed);
    CHECK(w.obstacles.size() == 15);
    CHECK(w.bounds.contains(w.goal));
    CHECK_FALSE(nav_in_collision(w.goal, w));
    CHECK_FALSE(nav_in_collision(Eigen::Vector2d(w.start[0], w.start[1]), w));
    for (const auto& o : w.obstacles) CHECK(o.radius == 1.0);
  }
  const NavWorld a = generate_nav_world(NavGenParams{}, 9);
  const NavWorld b = generate_nav_world(NavGenParams{}, 9);
  CHECK(nav_context(a) == nav_context(b));
}

TEST_CASE("dynamic obstacle speeds lie in the configured range") {
  NavGenParams p;
  p.num_dynamic = 5;
  const NavWorld w = generate_nav_world(p, 4);
  int moving = 0;
  for (const auto& o : w.obstacles) {
    const double s = o.velocity.norm();
    if (s > 0.0) {
      ++moving;
      CHECK(s >= 0.1);
      CHECK(s <= 0.5);
    }
  }
  CHECK(moving == 5);
}

TEST_CASE("impossible obstacle placement reports a generation error") {
  NavGenParams p;
  p.num_obstacles = 2000;
  p.max_placement_attempts = 500;
  CHECK_THROWS_AS(generate_nav_world(p, 1), WorldGenerationError);
}

TEST_CASE("environment config keys") {
  const auto cfg = KvConfig::parse(
      "environment = racing\nracing.straight_length = 12\nracing.obstacles = 3\nnav.obstacles = 4\n");
  const EnvironmentSpec spec = env_spec_from_config(cfg);
  CHECK(spec.kind == EnvKind::Racing);
  CHECK(spec.racing.straight_length == 12.0);
  CHECK(spec.racing.num_obstacles == 3);
  CHECK(spec.nav.num_obstacles == 4);
  CHECK(spec.context_dim() == 20);
  auto env = make_environment(spec, 1);
  CHECK(env->obstacles().size() == 3);
  CHECK_THROWS_AS(env_kind_from_string("maze"), ConfigError);
}
