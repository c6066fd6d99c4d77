#pragma once

#include <cstdint>
#include <string>

#include "s2spm/model.hpp"

namespace s2spm {

struct Snapshot {
    ModelParams params;
    std::uint64_t seed = 0;
    long iterations = 0;
};

// JSON container with all tensors, dimensions, seed, and iteration count.
// Doubles are emitted in shortest round-trip form, so load reproduces the
// saved parameters bit for bit.
void save_snapshot(const std::string& path, const Snapshot& snap);
Snapshot load_snapshot(const std::string& path);

}  // namespace s2spm
