#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ladb/adam.hpp"
#include "ladb/rng.hpp"
#include "ladb/schedule.hpp"
#include "ladb/score_net.hpp"

namespace ladb {

enum class Weighting { sigma_squared, uniform };
enum class OdeMethod { euler, heun };
enum class Direction { forward, reverse };
enum class LrSchedule { constant, cosine };

Weighting weighting_from_string(const std::string& s);
std::string to_string(Weighting w);
OdeMethod ode_method_from_string(const std::string& s);
std::string to_string(OdeMethod m);
Direction direction_from_string(const std::string& s);
std::string to_string(Direction d);
LrSchedule lr_schedule_from_string(const std::string& s);
std::string to_string(LrSchedule s);

struct TrainConfig {
    long steps = 2000;
    int batch_size = 64;
    Weighting weighting = Weighting::sigma_squared;
    double t_min = 1e-4;
    AdamConfig adam;
    // exponential moving average of the weights; 0 disables, otherwise the
    // returned network carries the bias-corrected average (cuts the stationary
    // optimizer jitter without touching the update rule)
    double ema_decay = 0.0;
    // cosine anneals the step size from adam.lr to 0 over the run, removing
    // the stationary noise floor of a fixed step size; constant leaves the
    // optimizer untouched
    LrSchedule lr_schedule = LrSchedule::constant;
    std::uint64_t seed = 0;

    void validate() const;
};

struct OdeConfig {
    int n_steps = 100;
    OdeMethod method = OdeMethod::heun;
    Direction direction = Direction::forward;
    double t_min = 1e-4;

    void validate() const;
};

// Integration path. Times are stored in integration order: increasing for
// forward solves, decreasing for reverse solves. The first point is always the
// supplied initial state; the endpoints 0 and t_min (or 1) bracket the
// small-time jump described at ode_solve.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> points;
};

struct OdeResult {
    Vec endpoint;
    Trajectory trajectory;
};

// Source of coupled pairs (x0 from the data side, x1 from the noise side).
// Implementations draw everything they need from the rng passed in, so a
// training run is a pure function of the seed. label reports the class of x0
// when the sampler carries labels, and -1 otherwise.
class PairSampler {
public:
    virtual ~PairSampler() = default;
    virtual void sample(Rng& rng, Vec& x0, Vec& x1, int& label) const = 0;
    virtual std::size_t size() const = 0;
    virtual int dim() const = 0;
};

struct TrainResult {
    ScoreNet net;
    std::vector<double> losses;  // mean batch loss per optimizer step
};

// Denoising score matching: fits the network to predict the noise component of
// alpha_t x0 + sigma_t x1 with t ~ U(t_min, 1) and pairs drawn from the
// sampler. With sigma_squared weighting the objective is the plain noise MSE;
// uniform weighting rescales each sample by 1/sigma_t^2. Conditional networks
// (condition_dim > 0) require labeled samples and receive a one-hot class
// vector as the condition.
TrainResult dsm_train(ScoreNet net, const NoiseSchedule& schedule, const PairSampler& sampler,
                      const TrainConfig& cfg);

// Probability-flow drift f_scale*x + (g^2 / (2 sigma_t)) * eps(x, t).
// Rejects t outside [t_min, 1]. A vanishing diffusion coefficient drops the
// score term entirely.
Vec drift(const EpsField& eps, const NoiseSchedule& schedule, const Vec& x, double t,
          double t_min = 1e-4);

// Fixed-step explicit integration of the probability-flow ODE over
// [t_min, 1]. The segment [0, t_min] is handled by an exact-in-the-limit jump
// instead of integration: forward solves enter at t_min via
//   x -> alpha * x + sigma * eps(x, t_min)
// and reverse solves exit to 0 via the posterior-mean estimate
//   x -> (x - sigma * eps(x, t_min)) / alpha,
// which are mutual inverses up to O(sigma^2). Euler is first order; heun
// (explicit trapezoid) is second order.
OdeResult ode_solve(const EpsField& eps, const NoiseSchedule& schedule, const Vec& x_init,
                    const OdeConfig& cfg);

// Forward solve from x0 followed by a reverse solve of the result with the
// same step settings; returns the reconstruction.
Vec cycle(const EpsField& eps, const NoiseSchedule& schedule, const Vec& x0,
          const OdeConfig& cfg);

}  // namespace ladb
