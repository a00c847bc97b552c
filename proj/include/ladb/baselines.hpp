#pragma once

#include <utility>
#include <vector>

#include "ladb/diffusion.hpp"
#include "ladb/pipeline.hpp"
#include "ladb/rng.hpp"
#include "ladb/score_net.hpp"

namespace ladb {

// DDIB translation: two concatenated probability-flow solves, mechanically
// identical to ladb_sample. The only difference is a training-time policy --
// both models must come from independent-Gaussian couplings (no paired
// latents) -- which this function cannot observe, so it simply shares the
// ladb_sample code path: equal checkpoints give equal outputs.
Vec ddib_translate(const LadmModel& source_model, const LadmModel& target_model, const Vec& x_src,
                   const OdeConfig& ode_cfg);

// Toy denoising diffusion bridge model over a flat schedule: zero drift and a
// constant diffusion level sigma_c, so the process pinned to endpoint y is a
// scaled Brownian bridge and every kernel is closed-form. The network
// conditions on the pinned endpoint (input width = dim + dim + time
// embedding) and predicts the standardized bridge noise; the conditional
// score is recovered as -prediction / (sigma_c * sqrt(t(1-t))).
struct BridgeNet {
    ScoreNet score;
    double sigma_c = 1.0;
    // bridge times are truncated to [t_min, 1 - t_min] where the kernel
    // variance t(1-t) vanishes
    double t_min = 1e-3;

    int dim() const { return score.spec.input_dim; }
    void validate() const;
};

// Closed-form pieces of the flat-schedule bridge, shared by training, the
// sampler, and the tests.
//
// mean of q(x_t | x0, x1) = (1-t) x0 + t x1
Vec bridge_mean(const Vec& x0, const Vec& x1, double t);
// per-coordinate variance of q(x_t | x0, x1) = sigma_c^2 t (1-t)
double bridge_var(double sigma_c, double t);
// grad_x log q(x_t | x0, x1) = -(x_t - bridge_mean) / bridge_var
Vec bridge_target_score(const Vec& xt, const Vec& x0, const Vec& x1, double sigma_c, double t);
// grad_x log q(x1 = y | x_t) = (y - x_t) / (sigma_c^2 (1-t))
Vec h_transform_term(const Vec& xt, const Vec& y, double sigma_c, double t);

// Conditional score s(x_t, t | x1 = y) of a trained bridge network. Rejects t
// outside the truncated range.
Vec bridge_score(const BridgeNet& net, const Vec& x, double t, const Vec& y);

// Fits the network to the standardized noise of bridge draws
// x_t = (1-t) x0 + t x1 + sigma_c sqrt(t(1-t)) xi with t ~ U(t_min, 1-t_min)
// and (x0, x1) uniform over the paired set; equivalent to regressing the
// conditional score against grad log q(x_t|x0,x1) with the kernel-variance
// weighting. Uses cfg.t_min as the truncation level. Requires a fully paired,
// non-empty set. net_spec.condition_dim must equal the data dimension. When
// loss_out is non-null it receives the per-step mean batch loss.
BridgeNet ddbm_train(const std::vector<std::pair<Vec, Vec>>& paired, double sigma_c,
                     const MlpSpec& net_spec, const TrainConfig& cfg,
                     std::vector<double>* loss_out = nullptr);

// Conditional score field with the endpoint already bound: (x, t) -> score.
using BridgeField = std::function<Vec(const Vec&, double)>;

// Euler-Maruyama integration of the reverse bridge SDE
//   dx = -sigma_c^2 (score(x, t) - (y - x) / (sigma_c^2 (1-t))) dt
//        + sigma_c dw
// from t = 1 - t_min down to t = t_min, initialized at x = y. Gaussian
// increments come from rng; a non-finite state aborts. The field overload
// exists so the sampler mechanics can be driven by exact closed-form scores.
Trajectory ddbm_sample_path(const BridgeField& score, double sigma_c, double t_min, const Vec& y,
                            int n_steps, Rng& rng);
Trajectory ddbm_sample_path(const BridgeNet& net, const Vec& y, int n_steps, Rng& rng);
Vec ddbm_sample(const BridgeNet& net, const Vec& y, int n_steps, Rng& rng);

}  // namespace ladb
