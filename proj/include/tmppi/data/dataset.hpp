#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tmppi/data/episode.hpp"

namespace tmppi::data {

struct CollectionStats {
  int attempted = 0;            // episodes run to termination
  int goal_reached = 0;
  int excluded = 0;             // run but not kept
  int generation_failures = 0;  // seeds skipped because the world could not be built
  bool operator==(const CollectionStats&) const = default;
};

/// Logged episodes plus the dimensions needed to window and train on them.
struct Dataset {
  int state_dim = 0;
  int control_dim = 0;
  int context_dim = 0;
  int k_past = 5;
  int horizon = 20;
  CollectionStats stats;
  std::vector<EpisodeLog> episodes;
};

/// Bitwise equality of the serialized forms.
bool operator==(const Dataset& a, const Dataset& b);

/// Binary container: "TMPPIDAT", u32 version, i32 n, m, p, k, H, four i32
/// collection counters, u32 episode count, then per episode its table entry
/// (i32 env_id, u64 seed, i32 outcome, u32 steps, p context values, u32
/// obstacle count and five f64 per obstacle) followed by the f64 payload
/// (states, controls, costs, final state). Little-endian throughout.
void write_dataset(std::ostream& out, const Dataset& d);
Dataset read_dataset(std::istream& in);
void save_dataset(const std::filesystem::path& path, const Dataset& d);
/// Throws FormatError on bad magic, version mismatch, truncation or trailing bytes.
Dataset load_dataset(const std::filesystem::path& path);

/// FNV-1a over the serialized bytes.
std::uint64_t dataset_hash(const Dataset& d);

/// One row per step: episode, t, x0..x{n-1}, u0..u{m-1}, cost.
void export_csv(std::ostream& out, const Dataset& d);

}  // namespace tmppi::data
