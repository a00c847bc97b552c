#include "ladb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace ladb {

namespace {

void check_metric_inputs(const Batch& a, const Batch& b, const char* where) {
    a.validate();
    b.validate();
    if (a.size() == 0 || b.size() == 0) {
        throw std::invalid_argument(std::string(where) + ": batches must be non-empty");
    }
    if (a.dim() != b.dim()) {
        throw std::invalid_argument(std::string(where) + ": batch dimensions differ");
    }
}

double gaussian_kernel(const Vec& x, const Vec& y, double inv_two_h2) {
    return std::exp(-squared_distance(x, y) * inv_two_h2);
}

}  // namespace

double w2_1d_squared(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("w2_1d_squared: inputs must be non-empty");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    // Integrate (Fa^-1(q) - Fb^-1(q))^2 over q in [0,1]; both quantile
    // functions are constant between breakpoints i/m and j/n, compared here
    // in exact integer arithmetic.
    std::size_t i = 0;
    std::size_t j = 0;
    double q = 0.0;
    double acc = 0.0;
    while (i < m && j < n) {
        const unsigned long long ra = static_cast<unsigned long long>(i + 1) * n;
        const unsigned long long rb = static_cast<unsigned long long>(j + 1) * m;
        const double q_next = (ra <= rb) ? static_cast<double>(i + 1) / static_cast<double>(m)
                                         : static_cast<double>(j + 1) / static_cast<double>(n);
        const double d = a[i] - b[j];
        acc += (q_next - q) * d * d;
        q = q_next;
        if (ra <= rb) ++i;
        if (rb <= ra) ++j;
    }
    return acc;
}

double sliced_w2(const Batch& a, const Batch& b, int n_projections, Rng& rng) {
    check_metric_inputs(a, b, "sliced_w2");
    if (n_projections < 1) {
        throw std::invalid_argument("sliced_w2: n_projections must be >= 1");
    }
    const int d = a.dim();
    std::vector<double> pa(a.points.size());
    std::vector<double> pb(b.points.size());
    double acc = 0.0;
    for (int k = 0; k < n_projections; ++k) {
        Vec u(static_cast<std::size_t>(d));
        double u_norm = 0.0;
        do {
            for (double& c : u) c = rng.normal();
            u_norm = norm(u);
        } while (u_norm < 1e-12);
        for (double& c : u) c /= u_norm;
        for (std::size_t p = 0; p < a.points.size(); ++p) pa[p] = dot(a.points[p], u);
        for (std::size_t p = 0; p < b.points.size(); ++p) pb[p] = dot(b.points[p], u);
        acc += w2_1d_squared(pa, pb);
    }
    return std::sqrt(acc / n_projections);
}

double sliced_w2(const Batch& a, const Batch& b, Rng& rng) { return sliced_w2(a, b, 128, rng); }

double median_heuristic_bandwidth(const Batch& a, const Batch& b, int max_points) {
    check_metric_inputs(a, b, "median_heuristic_bandwidth");
    if (max_points < 1) {
        throw std::invalid_argument("median_heuristic_bandwidth: max_points must be >= 1");
    }
    std::vector<const Vec*> pool;
    for (const Batch* batch : {&a, &b}) {
        const std::size_t sz = batch->points.size();
        const std::size_t stride = (sz + static_cast<std::size_t>(max_points) - 1) /
                                   static_cast<std::size_t>(max_points);
        for (std::size_t p = 0; p < sz; p += stride) pool.push_back(&batch->points[p]);
    }
    std::vector<double> dists;
    dists.reserve(pool.size() * (pool.size() - 1) / 2);
    for (std::size_t p = 0; p < pool.size(); ++p) {
        for (std::size_t r = p + 1; r < pool.size(); ++r) {
            dists.push_back(std::sqrt(squared_distance(*pool[p], *pool[r])));
        }
    }
    if (dists.empty()) {
        throw std::invalid_argument("median_heuristic_bandwidth: need at least two pooled points");
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t mid = dists.size() / 2;
    const double med = (dists.size() % 2 == 1) ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
    if (!(med > 0.0)) {
        throw std::invalid_argument("median_heuristic_bandwidth: all pooled points coincide");
    }
    return med;
}

namespace {

double resolve_bandwidth(const Batch& a, const Batch& b, double bandwidth, const char* where) {
    if (bandwidth <= 0.0) return median_heuristic_bandwidth(a, b);
    if (!std::isfinite(bandwidth)) {
        throw std::invalid_argument(std::string(where) + ": bandwidth must be finite");
    }
    return bandwidth;
}

void check_mmd_sizes(const Batch& a, const Batch& b, const char* where) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument(std::string(where) + ": need at least 2 points per batch");
    }
}

}  // namespace

double mmd(const Batch& a, const Batch& b, double bandwidth) {
    check_metric_inputs(a, b, "mmd");
    check_mmd_sizes(a, b, "mmd");
    const double h = resolve_bandwidth(a, b, bandwidth, "mmd");
    const double inv_two_h2 = 1.0 / (2.0 * h * h);
    const std::size_t m = a.points.size();
    const std::size_t n = b.points.size();

    double sum_aa = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            sum_aa += gaussian_kernel(a.points[i], a.points[j], inv_two_h2);
        }
    }
    double sum_bb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sum_bb += gaussian_kernel(b.points[i], b.points[j], inv_two_h2);
        }
    }
    double sum_ab = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sum_ab += gaussian_kernel(a.points[i], b.points[j], inv_two_h2);
        }
    }
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    return 2.0 * sum_aa / (md * (md - 1.0)) + 2.0 * sum_bb / (nd * (nd - 1.0)) -
           2.0 * sum_ab / (md * nd);
}

double mmd_biased(const Batch& a, const Batch& b, double bandwidth) {
    check_metric_inputs(a, b, "mmd_biased");
    check_mmd_sizes(a, b, "mmd_biased");
    const double h = resolve_bandwidth(a, b, bandwidth, "mmd_biased");
    const double inv_two_h2 = 1.0 / (2.0 * h * h);
    const std::size_t m = a.points.size();
    const std::size_t n = b.points.size();

    // Full double loops (diagonal included) so that identical multisets cancel
    // to exactly zero.
    double sum_aa = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            sum_aa += gaussian_kernel(a.points[i], a.points[j], inv_two_h2);
        }
    }
    double sum_bb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sum_bb += gaussian_kernel(b.points[i], b.points[j], inv_two_h2);
        }
    }
    double sum_ab = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sum_ab += gaussian_kernel(a.points[i], b.points[j], inv_two_h2);
        }
    }
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    return sum_aa / (md * md) + sum_bb / (nd * nd) - 2.0 * (sum_ab / (md * nd));
}

double pairing_mse(const Batch& translated, const Batch& ground_truth) {
    check_metric_inputs(translated, ground_truth, "pairing_mse");
    if (translated.size() != ground_truth.size()) {
        throw std::invalid_argument("pairing_mse: batches must have equal point counts");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < translated.points.size(); ++i) {
        acc += squared_distance(translated.points[i], ground_truth.points[i]);
    }
    return acc / static_cast<double>(translated.size());
}

}  // namespace ladb
