#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "tmppi/core/kv_config.hpp"
#include "tmppi/env/navigation.hpp"
#include "tmppi/env/racing.hpp"

namespace tmppi::env {

enum class EnvKind { Navigation, Racing };

EnvKind env_kind_from_string(const std::string& s);
std::string to_string(EnvKind k);

/// Everything needed to generate a randomized world from a seed.
struct EnvironmentSpec {
  EnvKind kind = EnvKind::Navigation;
  NavGenParams nav;
  RacingGenParams racing;

  int state_dim() const { return kind == EnvKind::Navigation ? 3 : 4; }
  int control_dim() const { return 2; }
  int context_dim() const {
    return kind == EnvKind::Navigation ? 2 + 2 * nav.context_obstacles : 2 * racing.lookahead_points;
  }
  int max_steps() const { return kind == EnvKind::Navigation ? nav.max_steps : racing.max_steps; }
};

/// Reads `environment` and the `nav.*` / `racing.*` keys on top of `base`.
///
/// Navigation keys: nav.bounds = [xmin, xmax, ymin, ymax], nav.start_region,
/// nav.goal_region (same layout), nav.obstacles, nav.obstacle_radius,
/// nav.dynamic_obstacles, nav.dynamic_speed = [min, max], nav.clearance,
/// nav.agent_radius, nav.goal_tolerance, nav.dt, nav.max_steps,
/// nav.context_obstacles.
///
/// Racing keys: racing.straight_length, racing.turn_radius, racing.half_width,
/// racing.obstacles, racing.obstacle_radius, racing.start_clearance,
/// racing.max_obstacle_offset, racing.dt, racing.max_steps,
/// racing.lookahead_points, racing.lookahead_spacing, racing.literal_reward,
/// racing.lf, racing.lr, racing.max_slip, racing.vehicle_half_width.
EnvironmentSpec env_spec_from_config(const KvConfig& cfg, EnvironmentSpec base = {});

std::unique_ptr<Environment> make_environment(const EnvironmentSpec& spec, std::uint64_t seed);

}  // namespace tmppi::env
