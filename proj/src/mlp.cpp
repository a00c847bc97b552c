#include "ladb/mlp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ladb {

Activation activation_from_string(const std::string& s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "silu") return Activation::silu;
    throw std::invalid_argument("unknown activation: " + s);
}

std::string to_string(Activation a) {
    return a == Activation::tanh ? "tanh" : "silu";
}

void MlpSpec::validate() const {
    if (input_dim <= 0) throw std::invalid_argument("MlpSpec: input_dim must be positive");
    if (output_dim <= 0) throw std::invalid_argument("MlpSpec: output_dim must be positive");
    if (time_embedding_dim <= 0 || time_embedding_dim % 2 != 0) {
        throw std::invalid_argument("MlpSpec: time_embedding_dim must be positive and even");
    }
    if (condition_dim < 0) throw std::invalid_argument("MlpSpec: condition_dim must be non-negative");
    for (int h : hidden_dims) {
        if (h <= 0) throw std::invalid_argument("MlpSpec: hidden widths must be positive");
    }
}

std::vector<TensorShape> MlpSpec::layout() const {
    validate();
    std::vector<TensorShape> shapes;
    int in = first_layer_width();
    for (std::size_t l = 0; l < hidden_dims.size(); ++l) {
        const int out = hidden_dims[l];
        shapes.push_back({"W" + std::to_string(l), static_cast<std::size_t>(out), static_cast<std::size_t>(in)});
        shapes.push_back({"b" + std::to_string(l), static_cast<std::size_t>(out), 1});
        in = out;
    }
    const std::size_t l = hidden_dims.size();
    shapes.push_back({"W" + std::to_string(l), static_cast<std::size_t>(output_dim), static_cast<std::size_t>(in)});
    shapes.push_back({"b" + std::to_string(l), static_cast<std::size_t>(output_dim), 1});
    return shapes;
}

void time_embedding(double t, int width, std::span<double> out) {
    const int half = width / 2;
    double freq = std::numbers::pi;
    for (int k = 0; k < half; ++k) {
        out[2 * k] = std::sin(freq * t);
        out[2 * k + 1] = std::cos(freq * t);
        freq *= 2.0;
    }
}

ParamVector init_params(const MlpSpec& spec, Rng& rng) {
    ParamVector p = ParamVector::zeros(spec.layout());
    const std::size_t n_layers = spec.hidden_dims.size() + 1;
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        auto w = p.block(2 * l);
        const double scale = 1.0 / std::sqrt(static_cast<double>(p.layout[2 * l].cols));
        for (auto& v : w) v = scale * rng.normal();
    }
    // final layer stays zero
    return p;
}

namespace {

double activate(Activation a, double z) {
    if (a == Activation::tanh) return std::tanh(z);
    return z / (1.0 + std::exp(-z));  // silu
}

double activate_grad(Activation a, double z) {
    if (a == Activation::tanh) {
        const double th = std::tanh(z);
        return 1.0 - th * th;
    }
    const double s = 1.0 / (1.0 + std::exp(-z));
    return s * (1.0 + z * (1.0 - s));
}

void check_inputs(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                  const Vec* cond) {
    params.validate();
    if (params.layout != spec.layout()) {
        throw std::invalid_argument("mlp: parameter layout does not match spec");
    }
    if (static_cast<int>(x.size()) != spec.input_dim) {
        throw std::invalid_argument("mlp: input has dimension " + std::to_string(x.size()) +
                                    ", spec expects " + std::to_string(spec.input_dim));
    }
    if ((cond != nullptr) != (spec.condition_dim > 0)) {
        throw std::invalid_argument("mlp: condition must be supplied iff condition_dim > 0");
    }
    if (cond && static_cast<int>(cond->size()) != spec.condition_dim) {
        throw std::invalid_argument("mlp: condition has wrong dimension");
    }
    if (!all_finite(x) || !std::isfinite(t) || (cond && !all_finite(*cond))) {
        throw std::invalid_argument("mlp: non-finite input");
    }
}

// z = W a + b for block index 2l
void linear_forward(const ParamVector& params, std::size_t l, const Vec& a, Vec& z) {
    const auto& shape = params.layout[2 * l];
    const auto w = params.block(2 * l);
    const auto b = params.block(2 * l + 1);
    z.resize(shape.rows);
    for (std::size_t o = 0; o < shape.rows; ++o) {
        const double* row = w.data() + o * shape.cols;
        double s = b[o];
        for (std::size_t i = 0; i < shape.cols; ++i) s += row[i] * a[i];
        z[o] = s;
    }
}

}  // namespace

void MlpWorkspace::resize(const MlpSpec& spec) {
    input.resize(spec.first_layer_width());
    const std::size_t n = spec.hidden_dims.size() + 1;
    pre.resize(n);
    act.resize(n);
    delta.resize(n);
}

void mlp_forward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                 const Vec* cond, Vec& out, MlpWorkspace& ws) {
    check_inputs(params, spec, x, t, cond);
    ws.resize(spec);

    std::size_t off = 0;
    for (int i = 0; i < spec.input_dim; ++i) ws.input[off++] = x[i];
    time_embedding(t, spec.time_embedding_dim, {ws.input.data() + off, static_cast<std::size_t>(spec.time_embedding_dim)});
    off += spec.time_embedding_dim;
    for (int i = 0; i < spec.condition_dim; ++i) ws.input[off++] = (*cond)[i];

    const Vec* a = &ws.input;
    const std::size_t n_hidden = spec.hidden_dims.size();
    for (std::size_t l = 0; l < n_hidden; ++l) {
        linear_forward(params, l, *a, ws.pre[l]);
        ws.act[l].resize(ws.pre[l].size());
        for (std::size_t i = 0; i < ws.pre[l].size(); ++i) {
            ws.act[l][i] = activate(spec.activation, ws.pre[l][i]);
        }
        a = &ws.act[l];
    }
    linear_forward(params, n_hidden, *a, out);
}

Vec mlp_forward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                const Vec* cond) {
    MlpWorkspace ws;
    Vec out;
    mlp_forward(params, spec, x, t, cond, out, ws);
    return out;
}

void mlp_backward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                  const Vec* cond, const Vec& upstream, ParamVector& grad, MlpWorkspace& ws) {
    if (static_cast<int>(upstream.size()) != spec.output_dim) {
        throw std::invalid_argument("mlp_backward: upstream has wrong dimension");
    }
    Vec out;
    mlp_forward(params, spec, x, t, cond, out, ws);
    if (grad.layout != params.layout) {
        throw std::invalid_argument("mlp_backward: gradient layout mismatch");
    }

    const std::size_t n_hidden = spec.hidden_dims.size();
    ws.delta[n_hidden] = upstream;
    for (std::size_t li = n_hidden + 1; li-- > 0;) {
        const auto& shape = params.layout[2 * li];
        const auto w = params.block(2 * li);
        auto gw = grad.block(2 * li);
        auto gb = grad.block(2 * li + 1);
        const Vec& a_in = (li == 0) ? ws.input : ws.act[li - 1];
        const Vec& d = ws.delta[li];

        for (std::size_t o = 0; o < shape.rows; ++o) {
            const double dv = d[o];
            double* grow = gw.data() + o * shape.cols;
            for (std::size_t i = 0; i < shape.cols; ++i) grow[i] += dv * a_in[i];
            gb[o] += dv;
        }
        if (li == 0) break;

        Vec& dprev = ws.delta[li - 1];
        dprev.assign(shape.cols, 0.0);
        for (std::size_t o = 0; o < shape.rows; ++o) {
            const double dv = d[o];
            const double* row = w.data() + o * shape.cols;
            for (std::size_t i = 0; i < shape.cols; ++i) dprev[i] += dv * row[i];
        }
        for (std::size_t i = 0; i < dprev.size(); ++i) {
            dprev[i] *= activate_grad(spec.activation, ws.pre[li - 1][i]);
        }
    }
}

ParamVector mlp_backward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                         const Vec* cond, const Vec& upstream) {
    ParamVector grad = ParamVector::zeros_like(params);
    MlpWorkspace ws;
    mlp_backward(params, spec, x, t, cond, upstream, grad, ws);
    return grad;
}

}  // namespace ladb
