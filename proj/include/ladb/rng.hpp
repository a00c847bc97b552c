#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ladb/vec.hpp"

namespace ladb {

/// Counter-based deterministic generator. A draw is a hash of (key, counter),
/// so streams can be forked by name without sharing state: the fork gets a new
/// key and a fresh counter, and never interferes with its parent's sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream derived from this one by name ("init", "noise", ...).
    Rng stream(std::string_view name) const;
    /// Independent stream derived by index (per-cell, per-thread, ...).
    Rng stream(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal via Box-Muller (one draw per two uniforms, no cached spare).
    double normal();
    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n);

    Vec normal_vec(std::size_t dim);
    /// Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

    std::uint64_t key() const { return key_; }

private:
    Rng(std::uint64_t key, std::uint64_t ctr) : key_(key), ctr_(ctr) {}

    std::uint64_t key_;
    std::uint64_t ctr_;
};

}  // namespace ladb
