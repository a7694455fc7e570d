#pragma once

#include <string>

#include "marlin/neural/sac.hpp"

namespace marlin {

// Versioned binary parameter dump: named tensors with layer shapes and
// row-major weight arrays. Loading into an agent of the same configuration
// restores every parameter bit-exactly.
void save_checkpoint(const SacAgent& agent, const std::string& path);
void load_checkpoint(SacAgent& agent, const std::string& path);

}  // namespace marlin
