#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ladb/vec.hpp"

namespace ladb {

/// Shape descriptor for one named block of a flat parameter vector.
struct TensorShape {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return rows * cols; }
    bool operator==(const TensorShape&) const = default;
};

/// Flat 64-bit parameter storage plus the (layer, shape) layout that
/// interprets it. Gradients and optimizer moments share the same layout.
struct ParamVector {
    Vec values;
    std::vector<TensorShape> layout;

    std::size_t total() const;
    /// Throws if values.size() != sum of layout sizes.
    void validate() const;
    bool finite() const { return all_finite(values); }

    std::span<double> block(std::size_t i);
    std::span<const double> block(std::size_t i) const;
    /// Offset of block i into values.
    std::size_t offset(std::size_t i) const;

    static ParamVector zeros(const std::vector<TensorShape>& layout);
    static ParamVector zeros_like(const ParamVector& other) { return zeros(other.layout); }
};

}  // namespace ladb
