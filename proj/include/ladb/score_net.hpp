#pragma once

#include <functional>

#include "ladb/mlp.hpp"

namespace ladb {

// A noise-prediction network: the MLP predicts the noise component of a
// perturbed point, and the score is recovered as -prediction/sigma_t.
struct ScoreNet {
    MlpSpec spec;
    ParamVector params;

    void validate() const;
};

// Callable noise-prediction field (x, t) -> predicted noise.
using EpsField = std::function<Vec(const Vec&, double)>;

// Unconditional view of a network. Rejects conditional networks: those must be
// bound to a class via the two-argument overload.
EpsField field_of(const ScoreNet& net);

// Conditional view of a network bound to a fixed condition vector.
EpsField field_of(const ScoreNet& net, const Vec& condition);

// Field that predicts zero noise everywhere (pure drift dynamics).
EpsField zero_field(int dim);

}  // namespace ladb
