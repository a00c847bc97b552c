#include "ladb/datasets.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

#include "ladb/linalg.hpp"

namespace ladb {

void Batch::validate() const {
    const int d = dim();
    for (const Vec& p : points) {
        if (static_cast<int>(p.size()) != d) {
            throw std::invalid_argument("Batch: points have mixed dimensions");
        }
        for (double v : p) {
            if (!std::isfinite(v)) throw std::invalid_argument("Batch: non-finite coordinate");
        }
    }
    if (!labels.empty() && labels.size() != points.size()) {
        throw std::invalid_argument("Batch: label count does not match point count");
    }
}

Dataset dataset_from_string(const std::string& name) {
    if (name == "two_moons") return Dataset::two_moons;
    if (name == "checkerboard") return Dataset::checkerboard;
    if (name == "gaussian_mixture") return Dataset::gaussian_mixture;
    if (name == "spiral") return Dataset::spiral;
    if (name == "isotropic_gaussian") return Dataset::isotropic_gaussian;
    throw std::invalid_argument("unknown dataset: " + name);
}

std::string to_string(Dataset d) {
    switch (d) {
        case Dataset::two_moons: return "two_moons";
        case Dataset::checkerboard: return "checkerboard";
        case Dataset::gaussian_mixture: return "gaussian_mixture";
        case Dataset::spiral: return "spiral";
        case Dataset::isotropic_gaussian: return "isotropic_gaussian";
    }
    throw std::invalid_argument("unknown dataset enum value");
}

Batch generate(Dataset name, int n, double noise, Rng& rng, int dim, int modes) {
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw std::invalid_argument("generate: noise must be finite and >= 0");
    }
    if (dim < 2 || dim > 16) throw std::invalid_argument("generate: dim must be in [2, 16]");
    if (modes < 1) throw std::invalid_argument("generate: modes must be >= 1");

    constexpr double pi = std::numbers::pi;
    Batch out;
    out.domain_tag = to_string(name);
    out.points.reserve(static_cast<std::size_t>(n));
    const bool labelled = (name == Dataset::two_moons || name == Dataset::gaussian_mixture);
    if (labelled) out.labels.reserve(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) {
        Vec p(static_cast<std::size_t>(dim), 0.0);
        switch (name) {
            case Dataset::two_moons: {
                const int m = static_cast<int>(rng.index(2));
                const double theta = pi * rng.uniform();
                if (m == 0) {
                    p[0] = std::cos(theta) - 0.5;
                    p[1] = std::sin(theta) - 0.25;
                } else {
                    p[0] = 0.5 - std::cos(theta);
                    p[1] = 0.25 - std::sin(theta);
                }
                out.labels.push_back(m);
                break;
            }
            case Dataset::checkerboard: {
                const int row = static_cast<int>(rng.index(4));
                const int jsel = static_cast<int>(rng.index(2));
                const int col = 2 * jsel + (row % 2);
                const double u = rng.uniform();
                const double v = rng.uniform();
                p[0] = -2.0 + row + u;
                p[1] = -2.0 + col + v;
                break;
            }
            case Dataset::gaussian_mixture: {
                const int k = static_cast<int>(rng.index(static_cast<std::size_t>(modes)));
                const double phi = 2.0 * pi * k / modes;
                p[0] = 1.5 * std::cos(phi);
                p[1] = 1.5 * std::sin(phi);
                out.labels.push_back(k);
                break;
            }
            case Dataset::spiral: {
                const double t = rng.uniform();
                p[0] = 2.0 * t * std::cos(4.0 * pi * t);
                p[1] = 2.0 * t * std::sin(4.0 * pi * t);
                break;
            }
            case Dataset::isotropic_gaussian:
                break;
        }
        // Noise draws are consumed even when noise == 0 so the manifold sample
        // at a fixed seed is independent of the noise level.
        for (int c = 0; c < dim; ++c) p[static_cast<std::size_t>(c)] += noise * rng.normal();
        out.points.push_back(std::move(p));
    }
    return out;
}

PairingMap PairingMap::rotation(double angle_radians) {
    if (!std::isfinite(angle_radians)) {
        throw std::invalid_argument("PairingMap::rotation: angle must be finite");
    }
    PairingMap m;
    m.kind_ = Kind::rotation;
    m.angle_ = angle_radians;
    return m;
}

PairingMap PairingMap::affine(std::vector<double> matrix, Vec offset) {
    const std::size_t d = offset.size();
    if (d == 0) throw std::invalid_argument("PairingMap::affine: offset must be non-empty");
    if (matrix.size() != d * d) {
        throw std::invalid_argument("PairingMap::affine: matrix size does not match offset dimension");
    }
    PairingMap m;
    m.kind_ = Kind::affine;
    m.matrix_inv_ = invert_matrix(matrix, static_cast<int>(d));  // throws if singular
    m.matrix_ = std::move(matrix);
    m.offset_ = std::move(offset);
    return m;
}

PairingMap PairingMap::component_swap() {
    PairingMap m;
    m.kind_ = Kind::component_swap;
    return m;
}

namespace {

Vec rotate_first_two(const Vec& x, double angle) {
    if (x.size() < 2) throw std::invalid_argument("PairingMap: point dimension must be >= 2");
    Vec y = x;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    y[0] = c * x[0] - s * x[1];
    y[1] = s * x[0] + c * x[1];
    return y;
}

}  // namespace

Vec PairingMap::apply(const Vec& x) const {
    switch (kind_) {
        case Kind::rotation:
            return rotate_first_two(x, angle_);
        case Kind::affine: {
            if (x.size() != offset_.size()) {
                throw std::invalid_argument("PairingMap: point dimension does not match affine map");
            }
            Vec y = mat_vec(matrix_, x);
            axpy(y, 1.0, offset_);
            return y;
        }
        case Kind::component_swap: {
            if (x.size() < 2) throw std::invalid_argument("PairingMap: point dimension must be >= 2");
            Vec y = x;
            std::swap(y[0], y[1]);
            return y;
        }
    }
    throw std::logic_error("PairingMap: unknown kind");
}

Vec PairingMap::inverse(const Vec& x) const {
    switch (kind_) {
        case Kind::rotation:
            return rotate_first_two(x, -angle_);
        case Kind::affine: {
            if (x.size() != offset_.size()) {
                throw std::invalid_argument("PairingMap: point dimension does not match affine map");
            }
            Vec shifted = x;
            axpy(shifted, -1.0, offset_);
            return mat_vec(matrix_inv_, shifted);
        }
        case Kind::component_swap:
            return apply(x);  // self-inverse
    }
    throw std::logic_error("PairingMap: unknown kind");
}

PairedData make_pairs(const Batch& source, const PairingMap& map, double fraction, Rng& rng) {
    source.validate();
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("make_pairs: fraction must lie in [0, 1]");
    }
    const int n = source.size();
    const int n_paired = static_cast<int>(std::floor(fraction * n));
    const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(n));

    PairedData out;
    out.paired.reserve(static_cast<std::size_t>(n_paired));
    out.unpaired_target.domain_tag = source.domain_tag + "_target";
    out.unpaired_target.points.reserve(static_cast<std::size_t>(n - n_paired));
    const bool labelled = !source.labels.empty();
    if (labelled) out.unpaired_target.labels.reserve(static_cast<std::size_t>(n - n_paired));

    for (int r = 0; r < n; ++r) {
        const std::size_t idx = perm[static_cast<std::size_t>(r)];
        const Vec& x = source.points[idx];
        if (r < n_paired) {
            out.paired.emplace_back(x, map.apply(x));
        } else {
            out.unpaired_target.points.push_back(map.apply(x));
            if (labelled) out.unpaired_target.labels.push_back(source.labels[idx]);
        }
    }
    return out;
}

}  // namespace ladb
