#include "tmppi/nn/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tmppi/core/binary_io.hpp"
#include "tmppi/core/types.hpp"

namespace tmppi::nn {

namespace {

constexpr char kMagic[8] = {'T', 'M', 'P', 'P', 'I', 'M', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 24;

void write_tensors(BinaryWriter& w, const ParameterSet& ps) {
  w.u32(static_cast<std::uint32_t>(ps.size()));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Matrix& m = ps.value(i);
    w.str(ps.name(i));
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.size(); ++j) w.f64(m.data()[j]);
  }
}

ParameterSet read_tensors(BinaryReader& r) {
  ParameterSet ps;
  const std::uint32_t count = r.u32();
  if (count > kMaxDim) throw FormatError("model file: implausible tensor count");
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows > kMaxDim || cols > kMaxDim || static_cast<std::uint64_t>(rows) * cols > kMaxDim) {
      throw FormatError("model file: implausible shape for tensor '" + name + "'");
    }
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = r.f64();
    if (ps.contains(name)) throw FormatError("model file: duplicate tensor '" + name + "'");
    ps.add(name, std::move(m));
  }
  return ps;
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  BinaryWriter w(out);
  const auto& c = model.config;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  for (int v : {c.d_model, c.num_layers, c.num_heads, c.d_ff, c.k_past, c.horizon, c.state_dim, c.control_dim,
                c.context_dim}) {
    w.i32(v);
  }
  w.f64(c.dropout);
  write_tensors(w, model.params);
  write_tensors(w, model.extras);
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
  BinaryReader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(magic, magic + 8, kMagic)) throw FormatError("model file: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion) throw FormatError("model file: unsupported version " + std::to_string(version));
  ModelFile mf;
  auto& c = mf.config;
  for (int* field : {&c.d_model, &c.num_layers, &c.num_heads, &c.d_ff, &c.k_past, &c.horizon, &c.state_dim,
                     &c.control_dim, &c.context_dim}) {
    *field = r.i32();
  }
  c.dropout = r.f64();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: invalid config: ") + e.what());
  }
  mf.params = read_tensors(r);
  mf.extras = read_tensors(r);
  if (!r.at_end()) throw FormatError("model file: trailing bytes");
  try {
    Transformer check(c, mf.params);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  return mf;
}

std::string inspect_model(const ModelFile& model) {
  const auto& c = model.config;
  std::ostringstream os;
  os << "d_model " << c.d_model << "\nnum_layers " << c.num_layers << "\nnum_heads " << c.num_heads << "\nd_ff "
     << c.d_ff << "\ndropout " << c.dropout << "\nk_past " << c.k_past << "\nhorizon " << c.horizon
     << "\nstate_dim " << c.state_dim << "\ncontrol_dim " << c.control_dim << "\ncontext_dim " << c.context_dim
     << "\nparameters " << model.params.scalar_count() << '\n';
  char line[256];
  auto list = [&](const ParameterSet& ps, const char* kind) {
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Matrix& m = ps.value(i);
      std::snprintf(line, sizeof(line), "%s %-28s %5ld x %-5ld norm %.6g\n", kind, ps.name(i).c_str(),
                    static_cast<long>(m.rows()), static_cast<long>(m.cols()), m.norm());
      os << line;
    }
  };
  list(model.params, "weight");
  list(model.extras, "extra ");
  return os.str();
}

}  // namespace tmppi::nn
