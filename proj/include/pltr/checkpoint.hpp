#pragma once

#include <filesystem>
#include <variant>

#include "pltr/baseline.hpp"
#include "pltr/model.hpp"

namespace pltr {

// Checkpoint container: magic "PLTC", u32 version=1, u32 model tag
// (0 prototype, 1 linear), u32 K, u32 d, u32 distance tag, u32 temperature
// tag, K*d little-endian f64 parameters, then the secondary payload
// (temperatures for prototype models, biases for linear ones) as f64.
using Checkpoint = std::variant<PrototypeModel, LinearModel>;

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pltr
