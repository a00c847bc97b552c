#include "ladb/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ladb {

Weighting weighting_from_string(const std::string& s) {
    if (s == "sigma_squared") return Weighting::sigma_squared;
    if (s == "uniform") return Weighting::uniform;
    throw std::invalid_argument("unknown weighting: " + s);
}

std::string to_string(Weighting w) {
    return w == Weighting::sigma_squared ? "sigma_squared" : "uniform";
}

OdeMethod ode_method_from_string(const std::string& s) {
    if (s == "euler") return OdeMethod::euler;
    if (s == "heun") return OdeMethod::heun;
    throw std::invalid_argument("unknown ode method: " + s);
}

std::string to_string(OdeMethod m) { return m == OdeMethod::euler ? "euler" : "heun"; }

Direction direction_from_string(const std::string& s) {
    if (s == "forward") return Direction::forward;
    if (s == "reverse") return Direction::reverse;
    throw std::invalid_argument("unknown direction: " + s);
}

std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "reverse"; }

LrSchedule lr_schedule_from_string(const std::string& s) {
    if (s == "constant") return LrSchedule::constant;
    if (s == "cosine") return LrSchedule::cosine;
    throw std::invalid_argument("unknown lr schedule: " + s);
}

std::string to_string(LrSchedule s) { return s == LrSchedule::constant ? "constant" : "cosine"; }

void TrainConfig::validate() const {
    if (steps < 0) throw std::invalid_argument("TrainConfig: steps must be non-negative");
    if (batch_size <= 0) throw std::invalid_argument("TrainConfig: batch_size must be positive");
    if (!(t_min > 0.0 && t_min < 1.0)) {
        throw std::invalid_argument("TrainConfig: t_min must lie in (0, 1)");
    }
    if (!(ema_decay >= 0.0 && ema_decay < 1.0)) {
        throw std::invalid_argument("TrainConfig: ema_decay must lie in [0, 1)");
    }
    adam.validate();
}

void OdeConfig::validate() const {
    if (n_steps < 1) throw std::invalid_argument("OdeConfig: n_steps must be >= 1");
    if (!(t_min > 0.0 && t_min < 1.0)) {
        throw std::invalid_argument("OdeConfig: t_min must lie in (0, 1)");
    }
}

TrainResult dsm_train(ScoreNet net, const NoiseSchedule& schedule, const PairSampler& sampler,
                      const TrainConfig& cfg) {
    cfg.validate();
    schedule.validate();
    net.validate();
    if (sampler.size() == 0) throw std::invalid_argument("dsm_train: sampler is empty");
    const int d = sampler.dim();
    if (d != net.spec.input_dim || d != net.spec.output_dim) {
        throw std::invalid_argument("dsm_train: network dims do not match sampler dim");
    }
    const bool conditional = net.spec.condition_dim > 0;

    Rng rng = Rng(cfg.seed).stream("dsm");
    AdamState opt(net.params.total());
    ParamVector grad = ParamVector::zeros_like(net.params);
    MlpWorkspace ws;
    Vec x0, x1, xt(d), pred, upstream(d), cond;
    Vec ema(cfg.ema_decay > 0.0 ? net.params.total() : 0, 0.0);
    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(cfg.steps));

    const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
    for (long step = 0; step < cfg.steps; ++step) {
        grad.values.assign(grad.values.size(), 0.0);
        double loss = 0.0;
        for (int b = 0; b < cfg.batch_size; ++b) {
            int label = -1;
            sampler.sample(rng, x0, x1, label);
            const double t = rng.uniform(cfg.t_min, 1.0);
            const ScheduleEval e = schedule.eval(t);
            for (int i = 0; i < d; ++i) xt[i] = e.alpha * x0[i] + e.sigma * x1[i];

            const Vec* cond_ptr = nullptr;
            if (conditional) {
                cond = one_hot(label, net.spec.condition_dim);
                cond_ptr = &cond;
            }
            mlp_forward(net.params, net.spec, xt, t, cond_ptr, pred, ws);

            const double w = cfg.weighting == Weighting::sigma_squared
                                 ? 1.0
                                 : 1.0 / (e.sigma * e.sigma);
            double sq = 0.0;
            for (int i = 0; i < d; ++i) {
                const double r = pred[i] - x1[i];
                sq += r * r;
                upstream[i] = 2.0 * w * inv_batch * r;
            }
            loss += w * sq;
            mlp_backward(net.params, net.spec, xt, t, cond_ptr, upstream, grad, ws);
        }
        loss *= inv_batch;
        if (!std::isfinite(loss)) {
            throw std::runtime_error("dsm_train: non-finite loss at step " +
                                     std::to_string(step));
        }
        if (cfg.lr_schedule == LrSchedule::cosine) {
            AdamConfig stepped = cfg.adam;
            const double frac = static_cast<double>(step) / static_cast<double>(cfg.steps);
            stepped.lr = cfg.adam.lr * 0.5 * (1.0 + std::cos(3.14159265358979323846 * frac));
            adam_step(net.params, grad, opt, stepped);
        } else {
            adam_step(net.params, grad, opt, cfg.adam);
        }
        if (cfg.ema_decay > 0.0) {
            for (std::size_t i = 0; i < ema.size(); ++i) {
                ema[i] = cfg.ema_decay * ema[i] + (1.0 - cfg.ema_decay) * net.params.values[i];
            }
        }
        losses.push_back(loss);
    }
    if (cfg.ema_decay > 0.0 && cfg.steps > 0) {
        const double correct = 1.0 - std::pow(cfg.ema_decay, static_cast<double>(cfg.steps));
        for (std::size_t i = 0; i < ema.size(); ++i) net.params.values[i] = ema[i] / correct;
    }
    return {std::move(net), std::move(losses)};
}

Vec drift(const EpsField& eps, const NoiseSchedule& schedule, const Vec& x, double t,
          double t_min) {
    if (!(t >= t_min && t <= 1.0)) {
        throw std::invalid_argument("drift: t must lie in [t_min, 1], got " + std::to_string(t));
    }
    const ScheduleEval e = schedule.eval(t);
    Vec out = scaled(x, e.f_scale);
    if (e.g > 0.0 && e.sigma > 0.0) {
        const double c = 0.5 * e.g * e.g / e.sigma;
        axpy(out, c, eps(x, t));
    }
    return out;
}

namespace {

void check_state(const Vec& x, int step) {
    if (!all_finite(x)) {
        throw std::runtime_error("ode_solve: non-finite state at step " + std::to_string(step));
    }
}

// One explicit step from (t0, x) to t1; h = t1 - t0 may be negative.
void advance(const EpsField& eps, const NoiseSchedule& schedule, Vec& x, double t0, double t1,
             OdeMethod method, double t_min) {
    const double h = t1 - t0;
    const Vec k1 = drift(eps, schedule, x, t0, t_min);
    if (method == OdeMethod::euler) {
        axpy(x, h, k1);
        return;
    }
    Vec probe = x;
    axpy(probe, h, k1);
    const Vec k2 = drift(eps, schedule, probe, t1, t_min);
    axpy(x, 0.5 * h, k1);
    axpy(x, 0.5 * h, k2);
}

}  // namespace

OdeResult ode_solve(const EpsField& eps, const NoiseSchedule& schedule, const Vec& x_init,
                    const OdeConfig& cfg) {
    cfg.validate();
    schedule.validate();
    if (!all_finite(x_init)) throw std::invalid_argument("ode_solve: non-finite initial state");

    // grid over [t_min, 1] in integration order
    const int n = cfg.n_steps;
    std::vector<double> grid(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n);
        grid[static_cast<std::size_t>(i)] = cfg.t_min + (1.0 - cfg.t_min) * u;
    }
    grid.front() = cfg.t_min;
    grid.back() = 1.0;
    if (cfg.direction == Direction::reverse) std::reverse(grid.begin(), grid.end());

    OdeResult result;
    Trajectory& traj = result.trajectory;
    traj.times.reserve(static_cast<std::size_t>(n) + 3);
    traj.points.reserve(static_cast<std::size_t>(n) + 3);

    Vec x = x_init;
    const ScheduleEval low = schedule.eval(cfg.t_min);
    if (cfg.direction == Direction::forward) {
        // data lives at t = 0; jump onto the integration grid at t_min
        traj.times.push_back(0.0);
        traj.points.push_back(x);
        if (low.sigma > 0.0) {
            const Vec e0 = eps(x, cfg.t_min);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = low.alpha * x[i] + low.sigma * e0[i];
            }
        }
        check_state(x, 0);
    }
    traj.times.push_back(grid.front());
    traj.points.push_back(x);

    for (int i = 0; i < n; ++i) {
        advance(eps, schedule, x, grid[static_cast<std::size_t>(i)],
                grid[static_cast<std::size_t>(i) + 1], cfg.method, cfg.t_min);
        check_state(x, i + 1);
        traj.times.push_back(grid[static_cast<std::size_t>(i) + 1]);
        traj.points.push_back(x);
    }

    if (cfg.direction == Direction::reverse) {
        // posterior-mean jump from t_min back to the data at t = 0
        if (low.sigma > 0.0) {
            const Vec e0 = eps(x, cfg.t_min);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = (x[i] - low.sigma * e0[i]) / low.alpha;
            }
        }
        check_state(x, n + 1);
        traj.times.push_back(0.0);
        traj.points.push_back(x);
    }

    result.endpoint = std::move(x);
    return result;
}

Vec cycle(const EpsField& eps, const NoiseSchedule& schedule, const Vec& x0,
          const OdeConfig& cfg) {
    OdeConfig forward_cfg = cfg;
    forward_cfg.direction = Direction::forward;
    OdeConfig reverse_cfg = cfg;
    reverse_cfg.direction = Direction::reverse;
    const OdeResult up = ode_solve(eps, schedule, x0, forward_cfg);
    return ode_solve(eps, schedule, up.endpoint, reverse_cfg).endpoint;
}

}  // namespace ladb
