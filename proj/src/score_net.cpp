#include "ladb/score_net.hpp"

#include <stdexcept>

namespace ladb {

void ScoreNet::validate() const {
    spec.validate();
    params.validate();
    if (params.layout != spec.layout()) {
        throw std::invalid_argument("ScoreNet: parameter layout does not match spec");
    }
}

EpsField field_of(const ScoreNet& net) {
    net.validate();
    if (net.spec.condition_dim > 0) {
        throw std::invalid_argument(
            "field_of: network is conditional; bind a condition vector");
    }
    return [params = net.params, spec = net.spec, ws = MlpWorkspace{}, out = Vec{}](
               const Vec& x, double t) mutable -> Vec {
        mlp_forward(params, spec, x, t, nullptr, out, ws);
        return out;
    };
}

EpsField field_of(const ScoreNet& net, const Vec& condition) {
    net.validate();
    if (net.spec.condition_dim == 0) {
        throw std::invalid_argument("field_of: network is unconditional; no condition accepted");
    }
    if (static_cast<int>(condition.size()) != net.spec.condition_dim) {
        throw std::invalid_argument("field_of: condition has wrong dimension");
    }
    return [params = net.params, spec = net.spec, cond = condition, ws = MlpWorkspace{},
            out = Vec{}](const Vec& x, double t) mutable -> Vec {
        mlp_forward(params, spec, x, t, &cond, out, ws);
        return out;
    };
}

EpsField zero_field(int dim) {
    if (dim <= 0) throw std::invalid_argument("zero_field: dim must be positive");
    return [dim](const Vec&, double) { return Vec(static_cast<std::size_t>(dim), 0.0); };
}

}  // namespace ladb
