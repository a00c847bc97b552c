#pragma once

#include "ladb/param_vector.hpp"

namespace ladb {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

// First and second moment accumulators for one parameter vector.
struct AdamState {
    Vec m;
    Vec v;
    long step = 0;
    long skipped = 0;  // steps rejected because the gradient was non-finite

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Applies one bias-corrected Adam update in place. Returns false (and leaves
// params and moments untouched, incrementing only `skipped`) when the gradient
// contains a non-finite entry.
bool adam_step(ParamVector& params, const ParamVector& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace ladb
