#include "ladb/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ladb {

void AdamConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("AdamConfig: lr must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("AdamConfig: beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("AdamConfig: beta2 must lie in [0, 1)");
    if (!(eps > 0.0)) throw std::invalid_argument("AdamConfig: eps must be positive");
}

bool adam_step(ParamVector& params, const ParamVector& grad, AdamState& state,
               const AdamConfig& cfg) {
    cfg.validate();
    if (grad.values.size() != params.values.size()) {
        throw std::invalid_argument("adam_step: gradient size does not match parameters");
    }
    if (state.m.size() != params.values.size()) {
        throw std::invalid_argument("adam_step: state size does not match parameters");
    }
    if (!grad.finite()) {
        ++state.skipped;
        return false;
    }

    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        const double g = grad.values[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params.values[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    return true;
}

}  // namespace ladb
