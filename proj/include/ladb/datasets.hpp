#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ladb/rng.hpp"
#include "ladb/vec.hpp"

namespace ladb {

// A finite sample from one domain: points in R^d plus an identifying tag and
// optional per-point class labels.
struct Batch {
    std::vector<Vec> points;
    std::string domain_tag;
    std::vector<int> labels;  // empty, or exactly one label per point

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

    // Throws std::invalid_argument if points have mixed dimensions, contain
    // non-finite values, or labels are present but mismatched in length.
    void validate() const;
};

enum class Dataset {
    two_moons,
    checkerboard,
    gaussian_mixture,
    spiral,
    isotropic_gaussian,
};

Dataset dataset_from_string(const std::string& name);
std::string to_string(Dataset d);

// Samples n points from a named synthetic 2-D distribution, embedded in the
// first two coordinates when dim > 2 (extra coordinates carry pure noise).
//
// Recipes (before adding noise * z, z ~ N(0, I_dim), drawn for every point so
// that the underlying manifold sample matches across noise levels at a fixed
// seed):
//   two_moons          m ~ {0,1}, theta ~ U(0, pi);
//                      m = 0: (cos theta - 0.5,  sin theta - 0.25)
//                      m = 1: (0.5 - cos theta,  0.25 - sin theta);  label m
//   checkerboard       black cells of a 4x4 board on [-2,2]^2 ((i+j) even);
//                      i ~ {0..3}, j = 2*jsel + (i mod 2), jsel ~ {0,1},
//                      point = (-2 + i + u, -2 + j + v), u,v ~ U(0,1)
//   gaussian_mixture   k ~ {0..modes-1}, mean_k = 1.5 (cos, sin)(2 pi k / modes);
//                      label k
//   spiral             t ~ U(0,1), point = 2t (cos 4 pi t, sin 4 pi t)
//   isotropic_gaussian point = 0 (noise acts as the standard deviation)
//
// Preconditions: n >= 1, noise >= 0, 2 <= dim <= 16, modes >= 1.
Batch generate(Dataset name, int n, double noise, Rng& rng, int dim = 2, int modes = 8);

// An analytic bijection of R^d standing in for ground-truth source-to-target
// correspondences. Exact invertibility gives translation metrics a true zero.
class PairingMap {
  public:
    enum class Kind { rotation, affine, component_swap };

    // Rotation by angle_radians in the first two coordinates, identity elsewhere.
    static PairingMap rotation(double angle_radians);
    // x -> M x + offset; M must be invertible (checked here, throws otherwise).
    static PairingMap affine(std::vector<double> matrix, Vec offset);
    // Swaps coordinates 0 and 1, identity elsewhere.
    static PairingMap component_swap();

    Kind kind() const { return kind_; }
    Vec apply(const Vec& x) const;
    Vec inverse(const Vec& x) const;

  private:
    PairingMap() = default;
    Kind kind_ = Kind::rotation;
    double angle_ = 0.0;
    std::vector<double> matrix_;      // row-major d x d, affine only
    std::vector<double> matrix_inv_;  // cached inverse, affine only
    Vec offset_;                      // affine only
};

struct PairedData {
    std::vector<std::pair<Vec, Vec>> paired;  // (x_source, x_target = map(x_source))
    Batch unpaired_target;                    // mapped targets whose source identity is dropped
};

// Splits a source batch into a uniformly chosen floor(fraction * n)-subset of
// exact pairs and an unpaired pool containing only the mapped targets of the
// remaining points. Labels, when present, follow their points into the pool.
PairedData make_pairs(const Batch& source, const PairingMap& map, double fraction, Rng& rng);

}  // namespace ladb
