#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "color/nn/mlp.hpp"

namespace color::nn {

/// Checkpoint layout (little-endian):
///   "COLORNET" | u32 format version | u32 layer count L | (L+1) x u32 sizes |
///   per layer: weight (in x out, row-major f32), bias (out f32) | u64 version
inline constexpr char kCheckpointMagic[8] = {'C', 'O', 'L', 'O', 'R', 'N', 'E', 'T'};
inline constexpr std::uint32_t kCheckpointFormat = 1;

std::string serialize(const NetworkParams& params);
/// Throws FormatError on bad magic, unknown format, implausible shape or truncation.
NetworkParams deserialize(const std::string& bytes);
/// As above, additionally requiring the stored shape to equal `expected`.
NetworkParams deserialize(const std::string& bytes, const Shape& expected);

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace color::nn
