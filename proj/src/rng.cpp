#include "ladb/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ladb {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(mix(seed + kGolden)), ctr_(0) {}

Rng Rng::stream(std::string_view name) const {
    return Rng(mix(mix(key_ + kGolden) ^ fnv1a(name)), 0);
}

Rng Rng::stream(std::uint64_t index) const {
    return Rng(mix(mix(key_ + kGolden) ^ mix(index * kGolden + 1)), 0);
}

std::uint64_t Rng::next_u64() { return mix(key_ + (++ctr_) * kGolden); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
    return static_cast<std::size_t>(next_u64() % n);
}

Vec Rng::normal_vec(std::size_t dim) {
    Vec v(dim);
    for (auto& x : v) x = normal();
    return v;
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = index(i);
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

}  // namespace ladb
