#include "tmppi/data/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tmppi/core/binary_io.hpp"
#include "tmppi/core/types.hpp"

namespace tmppi::data {

namespace {

constexpr char kMagic[8] = {'T', 'M', 'P', 'P', 'I', 'D', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxCount = 1u << 24;

void write_matrix(BinaryWriter& w, const RowMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
}

void read_matrix(BinaryReader& r, RowMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
}

int checked_dim(BinaryReader& r, const char* what) {
  const std::int32_t v = r.i32();
  if (v < 0 || v > 1 << 16) throw FormatError(std::string("dataset: invalid ") + what);
  return v;
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& d) {
  BinaryWriter w(out);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  for (int v : {d.state_dim, d.control_dim, d.context_dim, d.k_past, d.horizon, d.stats.attempted,
                d.stats.goal_reached, d.stats.excluded, d.stats.generation_failures}) {
    w.i32(v);
  }
  w.u32(static_cast<std::uint32_t>(d.episodes.size()));
  for (const auto& e : d.episodes) {
    if (e.states.cols() != d.state_dim || e.controls.cols() != d.control_dim || e.context.size() != d.context_dim ||
        e.states.rows() != e.steps() || e.costs.size() != e.steps() || e.final_state.size() != d.state_dim) {
      throw std::invalid_argument("dataset: episode shape does not match the header");
    }
    w.i32(e.env_id);
    w.u64(e.seed);
    w.i32(static_cast<std::int32_t>(e.outcome));
    w.u32(static_cast<std::uint32_t>(e.steps()));
    for (Eigen::Index i = 0; i < e.context.size(); ++i) w.f64(e.context[i]);
    w.u32(static_cast<std::uint32_t>(e.obstacles.size()));
    for (const auto& o : e.obstacles) {
      for (double v : {o.center.x(), o.center.y(), o.radius, o.velocity.x(), o.velocity.y()}) w.f64(v);
    }
    write_matrix(w, e.states);
    write_matrix(w, e.controls);
    for (Eigen::Index i = 0; i < e.costs.size(); ++i) w.f64(e.costs[i]);
    for (Eigen::Index i = 0; i < e.final_state.size(); ++i) w.f64(e.final_state[i]);
  }
}

Dataset read_dataset(std::istream& in) {
  BinaryReader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kMagic)) throw FormatError("dataset: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw FormatError("dataset: unsupported version " + std::to_string(version));
  Dataset d;
  d.state_dim = checked_dim(r, "state_dim");
  d.control_dim = checked_dim(r, "control_dim");
  d.context_dim = checked_dim(r, "context_dim");
  d.k_past = checked_dim(r, "k_past");
  d.horizon = checked_dim(r, "horizon");
  d.stats.attempted = r.i32();
  d.stats.goal_reached = r.i32();
  d.stats.excluded = r.i32();
  d.stats.generation_failures = r.i32();
  const std::uint32_t count = r.u32();
  if (count > kMaxCount) throw FormatError("dataset: implausible episode count");
  for (std::uint32_t i = 0; i < count; ++i) {
    EpisodeLog e;
    e.env_id = r.i32();
    e.seed = r.u64();
    const std::int32_t outcome = r.i32();
    if (outcome < 0 || outcome > static_cast<std::int32_t>(env::Outcome::StepLimit)) {
      throw FormatError("dataset: invalid outcome code");
    }
    e.outcome = static_cast<env::Outcome>(outcome);
    const std::uint32_t steps = r.u32();
    if (steps > kMaxCount) throw FormatError("dataset: implausible step count");
    e.context.resize(d.context_dim);
    for (Eigen::Index j = 0; j < e.context.size(); ++j) e.context[j] = r.f64();
    const std::uint32_t n_obs = r.u32();
    if (n_obs > kMaxCount) throw FormatError("dataset: implausible obstacle count");
    e.obstacles.resize(n_obs);
    for (auto& o : e.obstacles) {
      o.center.x() = r.f64();
      o.center.y() = r.f64();
      o.radius = r.f64();
      o.velocity.x() = r.f64();
      o.velocity.y() = r.f64();
    }
    e.states.resize(steps, d.state_dim);
    e.controls.resize(steps, d.control_dim);
    e.costs.resize(steps);
    e.final_state.resize(d.state_dim);
    read_matrix(r, e.states);
    read_matrix(r, e.controls);
    for (Eigen::Index j = 0; j < e.costs.size(); ++j) e.costs[j] = r.f64();
    for (Eigen::Index j = 0; j < e.final_state.size(); ++j) e.final_state[j] = r.f64();
    d.episodes.push_back(std::move(e));
  }
  if (!r.at_end()) throw FormatError("dataset: trailing bytes");
  return d;
}

void save_dataset(const std::filesystem::path& path, const Dataset& d) {
  std::ostringstream buffer;
  write_dataset(buffer, d);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  const std::string bytes = buffer.str();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset '" + path.string() + "'");
  return read_dataset(in);
}

std::uint64_t dataset_hash(const Dataset& d) {
  std::ostringstream buffer;
  write_dataset(buffer, d);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : buffer.str()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool operator==(const Dataset& a, const Dataset& b) {
  std::ostringstream sa;
  std::ostringstream sb;
  write_dataset(sa, a);
  write_dataset(sb, b);
  return sa.str() == sb.str();
}

void export_csv(std::ostream& out, const Dataset& d) {
  out << "episode,t";
  for (int i = 0; i < d.state_dim; ++i) out << ",x" << i;
  for (int i = 0; i < d.control_dim; ++i) out << ",u" << i;
  out << ",cost\n";
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  for (std::size_t e = 0; e < d.episodes.size(); ++e) {
    const auto& ep = d.episodes[e];
    for (int t = 0; t < ep.steps(); ++t) {
      out << e << ',' << t;
      for (Eigen::Index i = 0; i < ep.states.cols(); ++i) out << ',' << num(ep.states(t, i));
      for (Eigen::Index i = 0; i < ep.controls.cols(); ++i) out << ',' << num(ep.controls(t, i));
      out << ',' << num(ep.costs[t]) << '\n';
    }
  }
}

}  // namespace tmppi::data
