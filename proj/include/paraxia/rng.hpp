#pragma once

#include <cstdint>

namespace paraxia {

// Deterministic per-realization random stream: xoshiro256++ seeded by
// splitmix64 expansion of (master_seed, stream_id). Streams for distinct
// ids are independent and may be consumed in any order, which keeps
// parallel ensembles reproducible.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    // uniform in [0, 1)
    double next_double();
    // standard normal via Box-Muller; draws are paired internally
    double next_normal();

private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace paraxia
