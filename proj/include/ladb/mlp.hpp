#pragma once

#include <span>
#include <vector>

#include "ladb/param_vector.hpp"
#include "ladb/rng.hpp"
#include "ladb/vec.hpp"

namespace ladb {

enum class Activation { tanh, silu };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

/// Static description of the score/noise MLP. The first linear layer sees
/// [x ; time_embedding(t) ; cond], the last layer has no activation.
struct MlpSpec {
    int input_dim = 2;
    std::vector<int> hidden_dims = {128, 128, 128};
    int output_dim = 2;
    Activation activation = Activation::silu;
    int time_embedding_dim = 16;  // must be even
    int condition_dim = 0;

    int first_layer_width() const { return input_dim + time_embedding_dim + condition_dim; }
    int num_layers() const { return static_cast<int>(hidden_dims.size()) + 1; }
    void validate() const;
    std::vector<TensorShape> layout() const;

    bool operator==(const MlpSpec&) const = default;
};

/// Fourier features of t: [sin(pi 2^k t), cos(pi 2^k t)], k = 0..width/2-1.
void time_embedding(double t, int width, std::span<double> out);

/// Hidden weights ~ N(0, 1/sqrt(fan_in)), biases zero; the final layer is
/// zero-initialized so a fresh network predicts exactly zero.
ParamVector init_params(const MlpSpec& spec, Rng& rng);

/// Reusable scratch for forward/backward; one per training context.
struct MlpWorkspace {
    Vec input;                   // [x ; emb(t) ; cond]
    std::vector<Vec> pre;        // pre-activations per layer
    std::vector<Vec> act;        // post-activations per hidden layer
    std::vector<Vec> delta;      // backprop buffers
    void resize(const MlpSpec& spec);
};

/// Evaluates the network. cond must be non-null iff spec.condition_dim > 0.
void mlp_forward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                 const Vec* cond, Vec& out, MlpWorkspace& ws);

Vec mlp_forward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                const Vec* cond = nullptr);

/// Accumulates d<upstream, output>/dparams into grad (same layout as params).
void mlp_backward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                  const Vec* cond, const Vec& upstream, ParamVector& grad, MlpWorkspace& ws);

ParamVector mlp_backward(const ParamVector& params, const MlpSpec& spec, const Vec& x, double t,
                         const Vec* cond, const Vec& upstream);

}  // namespace ladb
