#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tmppi/data/collect.hpp"
#include "tmppi/data/dataset.hpp"
#include "tmppi/data/episode.hpp"
#include "tmppi/data/quantile.hpp"
#include "tmppi/data/window.hpp"

using namespace tmppi;
using namespace tmppi::data;

namespace {

EpisodeLog synthetic_episode(SeededRng& rng, int steps, int n = 3, int m = 2, int p = 4) {
  EpisodeLog e;
  e.env_id = static_cast<int>(rng.uniform_index(1000));
  e.seed = rng.next_u64();
  e.outcome = env::Outcome::GoalReached;
  e.context = Eigen::VectorXd(p);
  for (int i = 0; i < p; ++i) e.context[i] = rng.normal();
  e.obstacles.push_back({Eigen::Vector2d(rng.normal(), rng.normal()), 1.0, Eigen::Vector2d(0.1, -0.2)});
  e.states = RowMatrix(steps, n);
  e.controls = RowMatrix(steps, m);
  e.costs = Eigen::VectorXd(steps);
  for (int t = 0; t < steps; ++t) {
    for (int j = 0; j < n; ++j) e.states(t, j) = 100.0 * t + j;
    for (int j = 0; j < m; ++j) e.controls(t, j) = 100.0 * t + 10.0 + j;
    e.costs[t] = rng.uniform(0.0, 30.0);
  }
  e.final_state = Eigen::VectorXd::Constant(n, -1.0);
  return e;
}

mppi::MppiConfig nav_mppi(int samples) {
  mppi::MppiConfig cfg;
  cfg.num_samples = samples;
  cfg.horizon = 20;
  cfg.temperature = 0.01;
  ControlInput var(2);
  var << 1.0, 1.0;
  cfg.noise_cov = DiagonalCovariance(var);
  cfg.bounds = env::nav_control_bounds();
  return cfg;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tmppi_test_data_" + name);
}

double ks_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    d = std::max(d, std::abs((i + 1) / n - u[i]));
    d = std::max(d, std::abs(u[i] - i / n));
  }
  return d;
}

}  // namespace

TEST_CASE("window counts") {
  SeededRng rng(1, 0);
  CHECK(window(synthetic_episode(rng, 150), 5, 20).size() == 131);
  CHECK(window(synthetic_episode(rng, 19), 5, 20).empty());
  const auto one = window(synthetic_episode(rng, 20), 5, 20);
  REQUIRE(one.size() == 1);
  CHECK(one[0].t == 0);
  for (int r = 1; r < 5; ++r) CHECK(one[0].past_states.row(r) == one[0].past_states.row(0));
}

TEST_CASE("window padding and alignment") {
  SeededRng rng(2, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_index(8));
    const int h = 1 + static_cast<int>(rng.uniform_index(25));
    const int steps = static_cast<int>(rng.uniform_index(60));
    const EpisodeLog e = synthetic_episode(rng, steps);
    const auto samples = window(e, k, h, 7);
    CHECK(static_cast<int>(samples.size()) == std::max(0, steps - h + 1));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const WindowSample& s = samples[i];
      CHECK(s.t == static_cast<int>(i));
      CHECK(s.episode == 7);
      CHECK(s.past_states.rows() == k);
      CHECK(s.future_controls.rows() == h);
      CHECK(s.context == e.context);
      // The last past state is the one at which the first future control was applied.
      CHECK(s.past_states.row(k - 1) == e.states.row(s.t));
      CHECK(s.future_controls.row(0) == e.controls.row(s.t));
      for (int r = 0; r < k; ++r) CHECK(s.past_states.row(r) == e.states.row(std::max(0, s.t - k + 1 + r)));
    }
  }
}

TEST_CASE("quantile transform examples") {
  RowMatrix data(100, 1);
  for (int i = 0; i < 100; ++i) data(i, 0) = i + 1.0;
  const QuantileTransform q = QuantileTransform::fit(data, 100);
  CHECK(q.apply(0, 1.0) == 0.0);
  CHECK(q.apply(0, 100.0) == 1.0);
  CHECK(q.apply(0, 50.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(q.apply(0, -5.0) == 0.0);
  CHECK(q.apply(0, 1e9) == 1.0);
  CHECK(q.invert(0, 0.5) == doctest::Approx(50.5).epsilon(1e-12));
}

TEST_CASE("quantile transform of training data is uniform and monotone") {
  SeededRng rng(3, 0);
  RowMatrix data(2000, 3);
  for (int i = 0; i < 2000; ++i) {
    data(i, 0) = rng.normal();
    data(i, 1) = std::exp(2.0 * rng.normal());
    data(i, 2) = rng.uniform() < 0.5 ? -1.0 : rng.uniform(3.0, 4.0);
  }
  const QuantileTransform q = QuantileTransform::fit(data, 1000);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> u;
    for (int i = 0; i < 2000; ++i) u.push_back(q.apply(c, data(i, c)));
    CHECK(ks_uniform(u) < 0.05);
  }
  for (int c = 0; c < 3; ++c) {
    for (int trial = 0; trial < 500; ++trial) {
      double a = rng.uniform(-10.0, 10.0), b = rng.uniform(-10.0, 10.0);
      if (a > b) std::swap(a, b);
      CHECK(q.apply(c, a) <= q.apply(c, b));
      const double v = q.apply(c, a);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (int j = 1; j < q.num_quantiles(); ++j) CHECK(q.quantiles()(c, j - 1) <= q.quantiles()(c, j));
  }
}

TEST_CASE("quantile round trip error is within one bin") {
  SeededRng rng(4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 50 + static_cast<int>(rng.uniform_index(3000));
    const int n_q = 10 + static_cast<int>(rng.uniform_index(1000));
    RowMatrix data(n, 2);
    for (int i = 0; i < n; ++i) {
      data(i, 0) = rng.uniform(-3.0, 5.0);
      data(i, 1) = rng.normal() * rng.normal();
    }
    const QuantileTransform q = QuantileTransform::fit(data, n_q);
    const RowMatrix back = q.invert(q.apply(data));
    for (int c = 0; c < 2; ++c) {
      const double range = data.col(c).maxCoeff() - data.col(c).minCoeff();
      const double tol = range / q.num_quantiles() + 1e-12;
      CHECK((back.col(c) - data.col(c)).cwiseAbs().maxCoeff() <= tol);
    }
  }
}

TEST_CASE("constant channels map to one half and invert to the constant") {
  RowMatrix data(10, 2);
  for (int i = 0; i < 10; ++i) {
    data(i, 0) = 4.25;
    data(i, 1) = i;
  }
  const QuantileTransform q = QuantileTransform::fit(data, 1000);
  CHECK(q.is_constant(0));
  CHECK_FALSE(q.is_constant(1));
  CHECK(q.num_quantiles() == 10);
  CHECK(q.apply(0, 4.25) == 0.5);
  CHECK(q.apply(0, -100.0) == 0.5);
  CHECK(q.invert(0, 0.1) == 4.25);
  CHECK_THROWS_AS(QuantileTransform::fit(RowMatrix(0, 2), 10), std::invalid_argument);
  const QuantileTransform rebuilt = QuantileTransform::from_quantiles(q.quantiles());
  CHECK(rebuilt.apply(1, 3.3) == q.apply(1, 3.3));
}

TEST_CASE("normalizer fits states, controls and context separately") {
  SeededRng rng(5, 0);
  std::vector<WindowSample> samples;
  for (int e = 0; e < 5; ++e) {
    const auto w = window(synthetic_episode(rng, 30), 3, 4, e);
    samples.insert(samples.end(), w.begin(), w.end());
  }
  const Normalizer norm = Normalizer::fit(samples, 100);
  CHECK(norm.states.channels() == 3);
  CHECK(norm.controls.channels() == 2);
  CHECK(norm.context.channels() == 4);
  const WindowSample s = norm.apply(samples[3]);
  CHECK(s.past_states.minCoeff() >= 0.0);
  CHECK(s.past_states.maxCoeff() <= 1.0);
  CHECK(s.future_controls == norm.controls.apply(samples[3].future_controls));
  CHECK(s.context == norm.context.apply(samples[3].context));
}

TEST_CASE("episode split examples") {
  const auto [train, val] = split_episodes(10, 0.9, 3);
  CHECK(train.size() == 9);
  CHECK(val.size() == 1);
  CHECK(split_episodes(10, 0.9, 3) == split_episodes(10, 0.9, 3));
  CHECK_THROWS_AS(split_episodes(1, 0.9, 3), std::invalid_argument);
  CHECK_THROWS_AS(split_episodes(10, 1.0, 3), std::invalid_argument);
}

TEST_CASE("episode split is a partition with no shared windows") {
  SeededRng rng(6, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int count = 2 + static_cast<int>(rng.uniform_index(30));
    std::vector<EpisodeLog> episodes;
    for (int i = 0; i < count; ++i) episodes.push_back(synthetic_episode(rng, 5 + static_cast<int>(rng.uniform_index(20))));
    const double ratio = rng.uniform(0.05, 0.95);
    const auto [tr, va] = split_episodes(count, ratio, trial);
    std::set<int> a(tr.begin(), tr.end()), b(va.begin(), va.end());
    CHECK(a.size() + b.size() == static_cast<std::size_t>(count));
    for (int i : a) CHECK(b.count(i) == 0);
    CHECK_FALSE(a.empty());
    CHECK_FALSE(b.empty());

    const auto [train, val] = split(episodes, 2, 4, ratio, trial);
    std::set<int> train_eps, val_eps;
    for (const auto& s : train) train_eps.insert(s.episode);
    for (const auto& s : val) val_eps.insert(s.episode);
    for (int e : train_eps) CHECK(val_eps.count(e) == 0);
    std::size_t total = 0;
    for (const auto& e : episodes) total += window(e, 2, 4).size();
    CHECK(train.size() + val.size() == total);
  }
}

TEST_CASE("dataset round trip") {
  Dataset empty;
  empty.state_dim = 3;
  empty.control_dim = 2;
  empty.context_dim = 4;
  const auto path = temp_path("empty.bin");
  save_dataset(path, empty);
  CHECK(load_dataset(path) == empty);

  SeededRng rng(7, 0);
  Dataset big = empty;
  big.stats = {1100, 1000, 100, 3};
  for (int i = 0; i < 1000; ++i) {
    EpisodeLog e = synthetic_episode(rng, 20 + static_cast<int>(rng.uniform_index(131)));
    for (Eigen::Index j = 0; j < e.states.size(); ++j) e.states.data()[j] = rng.normal();
    big.episodes.push_back(std::move(e));
  }
  const auto big_path = temp_path("big.bin");
  save_dataset(big_path, big);
  const Dataset back = load_dataset(big_path);
  CHECK(dataset_hash(back) == dataset_hash(big));
  CHECK(back == big);
  CHECK(back.stats == big.stats);
  CHECK(back.episodes[17].states == big.episodes[17].states);
  CHECK(back.episodes[999].obstacles[0].velocity == big.episodes[999].obstacles[0].velocity);

  std::string bytes;
  {
    std::ifstream in(big_path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  {
    std::ofstream out(path, std::ios::binary);
    out << "TMPPIDAX" << bytes.substr(8);
  }
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  {
    std::ofstream out(path, std::ios::binary);
    out << bytes.substr(0, bytes.size() - 13);
  }
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  {
    std::ofstream out(path, std::ios::binary);
    std::string v = bytes;
    v[8] = 7;
    out << v;
  }
  CHECK_THROWS_AS(load_dataset(path), FormatError);
  CHECK_THROWS(load_dataset(temp_path("does_not_exist.bin")));
  std::filesystem::remove(path);
  std::filesystem::remove(big_path);
}

TEST_CASE("dataset csv export") {
  SeededRng rng(8, 0);
  Dataset d;
  d.state_dim = 3;
  d.control_dim = 2;
  d.context_dim = 4;
  d.episodes.push_back(synthetic_episode(rng, 2));
  std::ostringstream out;
  export_csv(out, d);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "episode,t,x0,x1,x2,u0,u1,cost");
  std::getline(in, line);
  CHECK(line.rfind("0,0,0,1,2,10,11,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("0,1,100,101,102,110,111,", 0) == 0);
}

TEST_CASE("collection on an obstacle-free world reaches the goal") {
  CollectConfig cfg;
  cfg.env.nav.num_obstacles = 0;
  cfg.mppi = nav_mppi(64);
  cfg.episodes = 1;
  cfg.seed = 5;
  const Dataset d = collect(cfg);
  REQUIRE(d.episodes.size() == 1);
  CHECK(d.episodes[0].outcome == env::Outcome::GoalReached);
  CHECK(d.stats.goal_reached == 1);
  CHECK(d.state_dim == 3);
  CHECK(d.context_dim == 32);
}

TEST_CASE("collection is deterministic and independent of workers") {
  CollectConfig cfg;
  cfg.mppi = nav_mppi(32);
  cfg.episodes = 4;
  cfg.seed = 9;
  cfg.include_failures = true;
  const Dataset a = collect(cfg);
  cfg.workers = 3;
  const Dataset b = collect(cfg);
  CHECK(dataset_hash(a) == dataset_hash(b));
  CHECK(a == b);
  CHECK(a.episodes.size() == 4);
}

TEST_CASE("collection keeps only successful episodes by default") {
  CollectConfig cfg;
  cfg.mppi = nav_mppi(16);
  cfg.env.nav.max_steps = 5;
  cfg.episodes = 3;
  const Dataset d = collect(cfg);
  CHECK(d.episodes.empty());
  CHECK(d.stats.attempted == 3);
  CHECK(d.stats.excluded == 3);
  CHECK(d.stats.goal_reached == 0);

  cfg.include_failures = true;
  const Dataset all = collect(cfg);
  CHECK(all.episodes.size() == 3);
  for (const auto& e : all.episodes) CHECK(e.outcome == env::Outcome::StepLimit);
}

TEST_CASE("collection disables dynamic obstacles and retries failed generation") {
  CollectConfig cfg;
  cfg.mppi = nav_mppi(16);
  cfg.env.nav.num_dynamic = 5;
  cfg.env.nav.max_steps = 3;
  cfg.episodes = 2;
  cfg.include_failures = true;
  const Dataset d = collect(cfg);
  for (const auto& e : d.episodes)
    for (const auto& o : e.obstacles) CHECK(o.velocity.isZero(0.0));

  cfg.env.nav.num_obstacles = 5000;
  cfg.env.nav.max_placement_attempts = 200;
  cfg.max_retries = 3;
  cfg.episodes = 1;
  const Dataset none = collect(cfg);
  CHECK(none.episodes.empty());
  CHECK(none.stats.attempted == 0);
  CHECK(none.stats.generation_failures == 4);
}

TEST_CASE("run_episode logs aligned states, controls and costs") {
  env::NavGenParams gp;
  gp.num_obstacles = 0;
  auto world = env::generate_nav_world(gp, 3);
  env::Navigation nav(world);
  const EpisodeResult r = run_episode(nav, nav_mppi(64), shifted_mean_initializer(), 3);
  const EpisodeLog& log = r.log;
  CHECK(log.outcome == env::Outcome::GoalReached);
  CHECK(log.states.rows() == log.controls.rows());
  CHECK(log.costs.size() == log.controls.rows());
  CHECK(log.states.row(0).transpose() == world.start);
  env::Navigation replay(world);
  State x = world.start;
  double total = 0.0;
  for (int t = 0; t < log.steps(); ++t) {
    CHECK(log.states.row(t).transpose() == x);
    const ControlInput u = log.controls.row(t).transpose();
    CHECK(log.costs[t] == replay.running_cost(x, u));
    total += log.costs[t];
    x = replay.step(x, u);
  }
  CHECK(log.final_state == Eigen::VectorXd(x));
  CHECK(log.total_cost() == doctest::Approx(total).epsilon(1e-15));
  CHECK(r.step_ms.empty());
}
