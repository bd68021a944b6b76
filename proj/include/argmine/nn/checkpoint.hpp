#pragma once

#include "argmine/nn/params.hpp"

#include <filesystem>

namespace argmine::nn {

// Flat binary container for named tensors. Layout, all little-endian:
//   magic "ARGT", u32 version,
//   u64 entry count, then per entry:
//     u32 name length, name bytes,
//     u8 dtype tag (0 = float64), u8 trainable flag,
//     u32 rank, u64 dims[rank], payload doubles.
// Round-trips are bit-exact.
void save_checkpoint(const ParameterStore& store, const std::filesystem::path& path);
ParameterStore load_checkpoint(const std::filesystem::path& path);

} // namespace argmine::nn
