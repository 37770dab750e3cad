#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace satsim {

/// Derives an independent stream seed from a master seed, a purpose tag and
/// up to two integer keys (terminal id, drop index, ...). Adding a new purpose
/// never perturbs the seeds of existing ones.
std::uint64_t stream_seed(std::uint64_t master, std::string_view purpose,
                          std::uint64_t key_a = 0, std::uint64_t key_b = 0);

/// xoshiro256** generator with platform-independent distribution helpers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0);

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();
    /// Uniform in (0, 1].
    double uniform_open_left();
    double exponential(double mean);
    /// Standard normal (Box-Muller, cached pair).
    double normal();
    bool bernoulli(double p);

private:
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace satsim
