#pragma once

#include "tfnet/dcnn.hpp"

#include <filesystem>

namespace tfnet {

inline constexpr int kWeightFormatVersion = 1;

/// Layout: magic "TFW1", u32 header byte count, JSON header (depth, channels, kernel, noise level,
/// seeds, format version, per-layer shapes), then for each layer its little-endian float32
/// weights ([out][in][ky][kx]) followed by its bias.
void save_network(const Network<float>& net, const std::filesystem::path& path);

/// Throws std::runtime_error naming the file when it is missing, truncated or malformed.
Network<float> load_network(const std::filesystem::path& path);

}  // namespace tfnet
