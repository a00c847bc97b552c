#include "ladb/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace ladb {

std::vector<double> invert_matrix(std::vector<double> m, int d) {
    if (d <= 0) throw std::invalid_argument("invert_matrix: dimension must be positive");
    if (m.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
        throw std::invalid_argument("invert_matrix: matrix size does not match dimension");
    }
    std::vector<double> inv(m.size(), 0.0);
    for (int i = 0; i < d; ++i) inv[static_cast<std::size_t>(i) * d + i] = 1.0;

    auto a = [&](int r, int c) -> double& { return m[static_cast<std::size_t>(r) * d + c]; };
    auto b = [&](int r, int c) -> double& { return inv[static_cast<std::size_t>(r) * d + c]; };

    for (int col = 0; col < d; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < d; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) {
            throw std::invalid_argument("invert_matrix: matrix is singular");
        }
        if (pivot != col) {
            for (int c = 0; c < d; ++c) {
                std::swap(a(pivot, c), a(col, c));
                std::swap(b(pivot, c), b(col, c));
            }
        }
        const double scale = 1.0 / a(col, col);
        for (int c = 0; c < d; ++c) {
            a(col, c) *= scale;
            b(col, c) *= scale;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (int c = 0; c < d; ++c) {
                a(r, c) -= f * a(col, c);
                b(r, c) -= f * b(col, c);
            }
        }
    }
    return inv;
}

std::vector<double> mat_vec(const std::vector<double>& m, const std::vector<double>& x) {
    const std::size_t d = x.size();
    if (m.size() != d * d) {
        throw std::invalid_argument("mat_vec: matrix size does not match vector dimension");
    }
    std::vector<double> y(d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) acc += m[r * d + c] * x[c];
        y[r] = acc;
    }
    return y;
}

}  // namespace ladb
