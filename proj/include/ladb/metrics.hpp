#pragma once

#include <vector>

#include "ladb/datasets.hpp"
#include "ladb/rng.hpp"
#include "ladb/vec.hpp"

namespace ladb {

// Exact squared Wasserstein-2 distance between two 1-D empirical distributions
// with uniform weights, allowing unequal sample counts (piecewise-constant
// inverse-CDF integration; reduces to the sorted-sample formula when counts match).
// Inputs are consumed and sorted in place.
double w2_1d_squared(std::vector<double> a, std::vector<double> b);

// Sliced Wasserstein-2: the square root of the average, over n_projections
// random unit directions, of the squared 1-D Wasserstein-2 distance between
// the projected samples. Identical batches give exactly 0.
double sliced_w2(const Batch& a, const Batch& b, int n_projections, Rng& rng);
double sliced_w2(const Batch& a, const Batch& b, Rng& rng);  // n_projections = 128

// Median of pairwise Euclidean distances over the pooled points, the standard
// kernel-bandwidth heuristic. To keep cost bounded the pool is capped at
// max_points per batch by deterministic stride subsampling. Requires at least
// two pooled points and a positive result (throws if all points coincide).
double median_heuristic_bandwidth(const Batch& a, const Batch& b, int max_points = 500);

// Unbiased squared maximum mean discrepancy with the Gaussian kernel
// exp(-|x - y|^2 / (2 bandwidth^2)). Signed: on two draws from the same
// distribution the estimate fluctuates around 0, and on identical multisets
// of size m it lies in [-2/m, 0]. bandwidth <= 0 selects the median heuristic.
// Requires at least 2 points per batch.
double mmd(const Batch& a, const Batch& b, double bandwidth = 0.0);

// Biased (V-statistic) variant: includes the diagonal terms, hence >= 0, and
// exactly 0 on identical multisets.
double mmd_biased(const Batch& a, const Batch& b, double bandwidth = 0.0);

// Mean squared Euclidean error between index-aligned point lists. The true
// zero of the translation task: translated[i] is compared against the known
// ground-truth target of source point i.
double pairing_mse(const Batch& translated, const Batch& ground_truth);

}  // namespace ladb
