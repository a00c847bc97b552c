#include "ladb/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ladb {

Vec ddib_translate(const LadmModel& source_model, const LadmModel& target_model, const Vec& x_src,
                   const OdeConfig& ode_cfg) {
    return ladb_sample(source_model, target_model, x_src, ode_cfg);
}

void BridgeNet::validate() const {
    score.validate();
    if (score.spec.input_dim != score.spec.output_dim) {
        throw std::invalid_argument("BridgeNet: input and output dims must match");
    }
    if (score.spec.condition_dim != score.spec.input_dim) {
        throw std::invalid_argument(
            "BridgeNet: the network must condition on the pinned endpoint "
            "(condition_dim == input_dim)");
    }
    if (!(std::isfinite(sigma_c) && sigma_c > 0.0)) {
        throw std::invalid_argument("BridgeNet: sigma_c must be positive");
    }
    if (!(t_min > 0.0 && t_min < 0.5)) {
        throw std::invalid_argument("BridgeNet: t_min must lie in (0, 0.5)");
    }
}

namespace {

void check_bridge_args(const Vec& a, const Vec& b, double sigma_c, double t) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("bridge: dimension mismatch");
    }
    if (!(std::isfinite(sigma_c) && sigma_c > 0.0)) {
        throw std::invalid_argument("bridge: sigma_c must be positive");
    }
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument("bridge: t must lie in (0, 1), got " + std::to_string(t));
    }
}

}  // namespace

Vec bridge_mean(const Vec& x0, const Vec& x1, double t) {
    if (x0.size() != x1.size()) throw std::invalid_argument("bridge_mean: dimension mismatch");
    Vec out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - t) * x0[i] + t * x1[i];
    return out;
}

double bridge_var(double sigma_c, double t) { return sigma_c * sigma_c * t * (1.0 - t); }

Vec bridge_target_score(const Vec& xt, const Vec& x0, const Vec& x1, double sigma_c, double t) {
    check_bridge_args(xt, x0, sigma_c, t);
    const Vec mu = bridge_mean(x0, x1, t);
    const double v = bridge_var(sigma_c, t);
    Vec out(xt.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -(xt[i] - mu[i]) / v;
    return out;
}

Vec h_transform_term(const Vec& xt, const Vec& y, double sigma_c, double t) {
    check_bridge_args(xt, y, sigma_c, t);
    const double v = sigma_c * sigma_c * (1.0 - t);
    Vec out(xt.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (y[i] - xt[i]) / v;
    return out;
}

Vec bridge_score(const BridgeNet& net, const Vec& x, double t, const Vec& y) {
    net.validate();
    if (!(t >= net.t_min && t <= 1.0 - net.t_min)) {
        throw std::invalid_argument("bridge_score: t outside the truncated range, got " +
                                    std::to_string(t));
    }
    const EpsField eps = field_of(net.score, y);
    const double scale = net.sigma_c * std::sqrt(t * (1.0 - t));
    return scaled(eps(x, t), -1.0 / scale);
}

BridgeNet ddbm_train(const std::vector<std::pair<Vec, Vec>>& paired, double sigma_c,
                     const MlpSpec& net_spec, const TrainConfig& cfg,
                     std::vector<double>* loss_out) {
    cfg.validate();
    if (paired.empty()) throw std::invalid_argument("ddbm_train: paired set is empty");
    if (!(std::isfinite(sigma_c) && sigma_c > 0.0)) {
        throw std::invalid_argument("ddbm_train: sigma_c must be positive");
    }
    if (!(cfg.t_min > 0.0 && cfg.t_min < 0.5)) {
        throw std::invalid_argument("ddbm_train: cfg.t_min must lie in (0, 0.5)");
    }
    const int d = static_cast<int>(paired.front().first.size());
    for (const auto& [x0, x1] : paired) {
        if (static_cast<int>(x0.size()) != d || static_cast<int>(x1.size()) != d || d == 0 ||
            !all_finite(x0) || !all_finite(x1)) {
            throw std::invalid_argument("ddbm_train: inconsistent or non-finite pair");
        }
    }
    if (net_spec.input_dim != d || net_spec.output_dim != d || net_spec.condition_dim != d) {
        throw std::invalid_argument(
            "ddbm_train: network dims must equal the data dim (including condition_dim)");
    }

    BridgeNet net;
    net.sigma_c = sigma_c;
    net.t_min = cfg.t_min;
    net.score.spec = net_spec;
    Rng init = Rng(cfg.seed).stream("init");
    net.score.params = init_params(net_spec, init);

    Rng rng = Rng(cfg.seed).stream("ddbm");
    if (loss_out != nullptr) {
        loss_out->clear();
        loss_out->reserve(static_cast<std::size_t>(cfg.steps));
    }
    AdamState opt(net.score.params.total());
    ParamVector grad = ParamVector::zeros_like(net.score.params);
    MlpWorkspace ws;
    Vec xt(static_cast<std::size_t>(d)), xi, pred, upstream(static_cast<std::size_t>(d));
    Vec ema(cfg.ema_decay > 0.0 ? net.score.params.total() : 0, 0.0);

    const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
    for (long step = 0; step < cfg.steps; ++step) {
        grad.values.assign(grad.values.size(), 0.0);
        double loss = 0.0;
        for (int b = 0; b < cfg.batch_size; ++b) {
            const auto& [x0, x1] = paired[rng.index(paired.size())];
            const double t = rng.uniform(cfg.t_min, 1.0 - cfg.t_min);
            xi = rng.normal_vec(d);
            const double sd = sigma_c * std::sqrt(t * (1.0 - t));
            for (int i = 0; i < d; ++i) {
                xt[static_cast<std::size_t>(i)] = (1.0 - t) * x0[static_cast<std::size_t>(i)] +
                                                  t * x1[static_cast<std::size_t>(i)] +
                                                  sd * xi[static_cast<std::size_t>(i)];
            }
            mlp_forward(net.score.params, net.score.spec, xt, t, &x1, pred, ws);
            const double w =
                cfg.weighting == Weighting::sigma_squared ? 1.0 : 1.0 / (sd * sd);
            double sq = 0.0;
            for (int i = 0; i < d; ++i) {
                const double r = pred[static_cast<std::size_t>(i)] - xi[static_cast<std::size_t>(i)];
                sq += r * r;
                upstream[static_cast<std::size_t>(i)] = 2.0 * w * inv_batch * r;
            }
            loss += w * sq;
            mlp_backward(net.score.params, net.score.spec, xt, t, &x1, upstream, grad, ws);
        }
        loss *= inv_batch;
        if (!std::isfinite(loss)) {
            throw std::runtime_error("ddbm_train: non-finite loss at step " + std::to_string(step));
        }
        if (loss_out != nullptr) loss_out->push_back(loss);
        if (cfg.lr_schedule == LrSchedule::cosine) {
            AdamConfig stepped = cfg.adam;
            const double frac = static_cast<double>(step) / static_cast<double>(cfg.steps);
            stepped.lr = cfg.adam.lr * 0.5 * (1.0 + std::cos(3.14159265358979323846 * frac));
            adam_step(net.score.params, grad, opt, stepped);
        } else {
            adam_step(net.score.params, grad, opt, cfg.adam);
        }
        if (cfg.ema_decay > 0.0) {
            for (std::size_t i = 0; i < ema.size(); ++i) {
                ema[i] = cfg.ema_decay * ema[i] + (1.0 - cfg.ema_decay) * net.score.params.values[i];
            }
        }
    }
    if (cfg.ema_decay > 0.0 && cfg.steps > 0) {
        const double correct = 1.0 - std::pow(cfg.ema_decay, static_cast<double>(cfg.steps));
        for (std::size_t i = 0; i < ema.size(); ++i) {
            net.score.params.values[i] = ema[i] / correct;
        }
    }
    return net;
}

Trajectory ddbm_sample_path(const BridgeField& score, double sigma_c, double t_min, const Vec& y,
                            int n_steps, Rng& rng) {
    if (!score) throw std::invalid_argument("ddbm_sample: empty score field");
    if (!(std::isfinite(sigma_c) && sigma_c > 0.0)) {
        throw std::invalid_argument("ddbm_sample: sigma_c must be positive");
    }
    if (!(t_min > 0.0 && t_min < 0.5)) {
        throw std::invalid_argument("ddbm_sample: t_min must lie in (0, 0.5)");
    }
    if (n_steps < 1) throw std::invalid_argument("ddbm_sample: n_steps must be >= 1");
    if (y.empty() || !all_finite(y)) {
        throw std::invalid_argument("ddbm_sample: invalid pinned endpoint");
    }
    const int d = static_cast<int>(y.size());

    // time grid from 1 - t_min down to t_min
    std::vector<double> grid(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n_steps);
        grid[static_cast<std::size_t>(k)] = (1.0 - t_min) - (1.0 - 2.0 * t_min) * u;
    }
    grid.front() = 1.0 - t_min;
    grid.back() = t_min;

    Trajectory traj;
    traj.times.reserve(grid.size());
    traj.points.reserve(grid.size());
    Vec x = y;
    traj.times.push_back(grid.front());
    traj.points.push_back(x);

    const double g2 = sigma_c * sigma_c;
    for (int k = 0; k < n_steps; ++k) {
        const double t = grid[static_cast<std::size_t>(k)];
        const double h = grid[static_cast<std::size_t>(k) + 1] - t;  // negative
        const Vec s = score(x, t);
        const Vec ht = h_transform_term(x, y, sigma_c, t);
        const Vec noise = rng.normal_vec(d);
        const double noise_sd = sigma_c * std::sqrt(-h);
        for (int i = 0; i < d; ++i) {
            const std::size_t c = static_cast<std::size_t>(i);
            x[c] += -g2 * (s[c] - ht[c]) * h + noise_sd * noise[c];
        }
        if (!all_finite(x)) {
            throw std::runtime_error("ddbm_sample: non-finite state at step " +
                                     std::to_string(k + 1));
        }
        traj.times.push_back(grid[static_cast<std::size_t>(k) + 1]);
        traj.points.push_back(x);
    }
    return traj;
}

Trajectory ddbm_sample_path(const BridgeNet& net, const Vec& y, int n_steps, Rng& rng) {
    net.validate();
    if (static_cast<int>(y.size()) != net.dim()) {
        throw std::invalid_argument("ddbm_sample: endpoint dimension mismatch");
    }
    const BridgeField field = [&net, &y](const Vec& x, double t) {
        return bridge_score(net, x, t, y);
    };
    return ddbm_sample_path(field, net.sigma_c, net.t_min, y, n_steps, rng);
}

Vec ddbm_sample(const BridgeNet& net, const Vec& y, int n_steps, Rng& rng) {
    return ddbm_sample_path(net, y, n_steps, rng).points.back();
}

}  // namespace ladb
