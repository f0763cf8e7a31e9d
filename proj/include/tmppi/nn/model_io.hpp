#pragma once

#include <filesystem>
#include <string>

#include "tmppi/nn/transformer.hpp"

namespace tmppi::nn {

/// Contents of a model file: architecture, weights, and auxiliary tensors
/// (the harness stores the fitted normalization there).
struct ModelFile {
  TransformerConfig config;
  ParameterSet params;
  ParameterSet extras;
};

/// Layout: "TMPPIMDL", u32 version, nine i32 config fields (d_model,
/// num_layers, num_heads, d_ff, k_past, horizon, state_dim, control_dim,
/// context_dim), f64 dropout, then two tensor lists (weights, extras), each a
/// u32 count followed by (name, u32 rows, u32 cols, rows*cols f64 row-major).
/// All integers and floats little-endian.
void save_model(const std::filesystem::path& path, const ModelFile& model);
/// Throws FormatError on bad magic, version, truncation or inconsistent shapes.
ModelFile load_model(const std::filesystem::path& path);

/// Human-readable listing of config, tensor shapes and Frobenius norms.
std::string inspect_model(const ModelFile& model);

}  // namespace tmppi::nn
