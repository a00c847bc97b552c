#include "ladb/pipeline.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace ladb {

void LadmModel::validate() const {
    score.validate();
    schedule.validate();
    const int d = autoencoder.latent_dim();
    if (score.spec.input_dim != d || score.spec.output_dim != d) {
        throw std::invalid_argument("LadmModel: score network dims do not match latent_dim");
    }
    if (condition_dim != score.spec.condition_dim) {
        throw std::invalid_argument("LadmModel: condition_dim does not match the score network");
    }
}

void SourceWeighting::validate() const {
    if (entries.empty()) throw std::invalid_argument("SourceWeighting: no entries");
    double sum = 0.0;
    for (const Entry& e : entries) {
        if (!(e.rho > 0.0) || !std::isfinite(e.rho)) {
            throw std::invalid_argument("SourceWeighting: every rho must be positive");
        }
        if (e.sample.empty() || !all_finite(e.sample)) {
            throw std::invalid_argument("SourceWeighting: invalid sample point");
        }
        sum += e.rho;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("SourceWeighting: weights must sum to 1 (got " +
                                    std::to_string(sum) + ")");
    }
}

Vec to_latent(const EpsField& eps, const NoiseSchedule& schedule, const Vec& z0,
              const OdeConfig& cfg) {
    OdeConfig fwd = cfg;
    fwd.direction = Direction::forward;
    return ode_solve(eps, schedule, z0, fwd).endpoint;
}

Vec from_latent(const EpsField& eps, const NoiseSchedule& schedule, const Vec& z1,
                const OdeConfig& cfg) {
    OdeConfig rev = cfg;
    rev.direction = Direction::reverse;
    return ode_solve(eps, schedule, z1, rev).endpoint;
}

namespace {

ScoreNet fresh_net(const MlpSpec& spec, std::uint64_t seed) {
    ScoreNet net;
    net.spec = spec;
    Rng init = Rng(seed).stream("init");
    net.params = init_params(spec, init);
    return net;
}

void check_net_spec(const MlpSpec& spec, const Autoencoder& ae, int condition_dim,
                    const char* where) {
    spec.validate();
    if (spec.input_dim != ae.latent_dim() || spec.output_dim != ae.latent_dim()) {
        throw std::invalid_argument(std::string(where) +
                                    ": network dims must equal the latent dimension");
    }
    if (spec.condition_dim != condition_dim) {
        throw std::invalid_argument(std::string(where) +
                                    ": network condition_dim does not match the requested one");
    }
}

Batch encode_batch(const Batch& data, const Autoencoder& ae, bool keep_labels) {
    data.validate();
    Batch out;
    out.domain_tag = data.domain_tag;
    out.points.reserve(data.points.size());
    for (const Vec& p : data.points) out.points.push_back(ae.encode(p));
    if (keep_labels) out.labels = data.labels;
    return out;
}

}  // namespace

LadmModel train_source_ldm(const Batch& source_data, const Autoencoder& autoencoder,
                           const NoiseSchedule& schedule, const MlpSpec& net_spec,
                           const TrainConfig& cfg, std::vector<double>* loss_out) {
    check_net_spec(net_spec, autoencoder, 0, "train_source_ldm");
    const Batch encoded = encode_batch(source_data, autoencoder, false);
    const IndependentCoupling sampler(encoded.points);
    TrainResult result = dsm_train(fresh_net(net_spec, cfg.seed), schedule, sampler, cfg);
    if (loss_out != nullptr) *loss_out = std::move(result.losses);

    LadmModel model;
    model.autoencoder = autoencoder;
    model.score = std::move(result.net);
    model.schedule = schedule;
    model.domain_tag = source_data.domain_tag;
    model.condition_dim = 0;
    model.validate();
    return model;
}

std::vector<std::pair<Vec, Vec>> transfer_correspondences(
    const LadmModel& source_model, const std::vector<std::pair<Vec, Vec>>& paired,
    const OdeConfig& ode_cfg) {
    source_model.validate();
    ode_cfg.validate();
    const EpsField eps = field_of(source_model.score);
    std::vector<std::pair<Vec, Vec>> out;
    out.reserve(paired.size());
    for (const auto& [x_src, x_tgt] : paired) {
        Vec z1 = to_latent(eps, source_model.schedule, source_model.autoencoder.encode(x_src),
                           ode_cfg);
        out.emplace_back(std::move(z1), x_tgt);
    }
    return out;
}

namespace {

LadmModel train_ladm_impl(const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_latent_sets,
                          const std::vector<std::vector<int>>& paired_label_sets,
                          const std::vector<Batch>& unpaired_targets,
                          const Autoencoder& target_autoencoder, const NoiseSchedule& schedule,
                          const MlpSpec& net_spec, const TrainConfig& cfg, int condition_dim,
                          const std::string& domain_tag, std::vector<double>* loss_out) {
    check_net_spec(net_spec, target_autoencoder, condition_dim,
                   condition_dim > 0 ? "train_conditional_ladm" : "train_ladm");
    const bool conditional = condition_dim > 0;

    // The mixture couples encode(x_tgt) (data side) to the transferred latent
    // (noise side); incoming pairs arrive as (x1_latent, x_tgt).
    std::vector<std::vector<std::pair<Vec, Vec>>> paired_encoded;
    paired_encoded.reserve(paired_latent_sets.size());
    for (const auto& set : paired_latent_sets) {
        std::vector<std::pair<Vec, Vec>> enc;
        enc.reserve(set.size());
        for (const auto& [x1_latent, x_tgt] : set) {
            enc.emplace_back(target_autoencoder.encode(x_tgt), x1_latent);
        }
        paired_encoded.push_back(std::move(enc));
    }
    std::vector<Batch> unpaired_encoded;
    unpaired_encoded.reserve(unpaired_targets.size());
    for (const Batch& b : unpaired_targets) {
        unpaired_encoded.push_back(encode_batch(b, target_autoencoder, conditional));
    }

    if (conditional) {
        if (paired_label_sets.size() != paired_latent_sets.size()) {
            throw std::invalid_argument(
                "train_conditional_ladm: one label list per paired set required");
        }
        for (std::size_t s = 0; s < paired_label_sets.size(); ++s) {
            if (paired_label_sets[s].size() != paired_latent_sets[s].size()) {
                throw std::invalid_argument(
                    "train_conditional_ladm: paired label list length mismatch");
            }
        }
        for (const Batch& b : unpaired_targets) {
            if (b.size() > 0 && b.labels.empty()) {
                throw std::invalid_argument(
                    "train_conditional_ladm: unpaired batch '" + b.domain_tag + "' lacks labels");
            }
        }
    }

    CouplingMixture mixture = build_mixture(paired_encoded, unpaired_encoded,
                                            conditional ? paired_label_sets
                                                        : std::vector<std::vector<int>>{});
    if (conditional) {
        for (int l : mixture.labels) {
            if (l >= condition_dim) {
                throw std::invalid_argument("train_conditional_ladm: label " + std::to_string(l) +
                                            " outside [0, " + std::to_string(condition_dim) + ")");
            }
        }
    }
    const MixtureSampler sampler(std::move(mixture));
    TrainResult result = dsm_train(fresh_net(net_spec, cfg.seed), schedule, sampler, cfg);
    if (loss_out != nullptr) *loss_out = std::move(result.losses);

    LadmModel model;
    model.autoencoder = target_autoencoder;
    model.score = std::move(result.net);
    model.schedule = schedule;
    model.domain_tag = domain_tag;
    model.condition_dim = condition_dim;
    model.validate();
    return model;
}

}  // namespace

LadmModel train_ladm(const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_latent_sets,
                     const std::vector<Batch>& unpaired_targets,
                     const Autoencoder& target_autoencoder, const NoiseSchedule& schedule,
                     const MlpSpec& net_spec, const TrainConfig& cfg,
                     const std::string& domain_tag, std::vector<double>* loss_out) {
    // Unconditional path: labels riding on the unpaired batches are dropped so
    // the mixture stays label-free.
    std::vector<Batch> stripped = unpaired_targets;
    for (Batch& b : stripped) b.labels.clear();
    return train_ladm_impl(paired_latent_sets, {}, stripped, target_autoencoder, schedule,
                           net_spec, cfg, 0, domain_tag, loss_out);
}

LadmModel train_ladm(const std::vector<std::pair<Vec, Vec>>& paired_latent_target,
                     const Batch& unpaired_target, const Autoencoder& target_autoencoder,
                     const NoiseSchedule& schedule, const MlpSpec& net_spec,
                     const TrainConfig& cfg, const std::string& domain_tag,
                     std::vector<double>* loss_out) {
    std::vector<Batch> unpaired;
    if (unpaired_target.size() > 0) unpaired.push_back(unpaired_target);
    return train_ladm(std::vector<std::vector<std::pair<Vec, Vec>>>{paired_latent_target},
                      unpaired, target_autoencoder, schedule, net_spec, cfg, domain_tag,
                      loss_out);
}

LadmModel train_conditional_ladm(
    const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_latent_sets,
    const std::vector<std::vector<int>>& paired_label_sets,
    const std::vector<Batch>& unpaired_targets, const Autoencoder& target_autoencoder,
    const NoiseSchedule& schedule, const MlpSpec& net_spec, const TrainConfig& cfg,
    int condition_dim, const std::string& domain_tag, std::vector<double>* loss_out) {
    if (condition_dim <= 0) {
        throw std::invalid_argument("train_conditional_ladm: condition_dim must be positive");
    }
    return train_ladm_impl(paired_latent_sets, paired_label_sets, unpaired_targets,
                           target_autoencoder, schedule, net_spec, cfg, condition_dim,
                           domain_tag, loss_out);
}

namespace {

EpsField target_field(const LadmModel& target_model, int class_label) {
    if (target_model.condition_dim > 0) {
        if (class_label < 0) {
            throw std::invalid_argument(
                "ladb_sample: conditional target model requires a class label");
        }
        return field_of(target_model.score, one_hot(class_label, target_model.condition_dim));
    }
    if (class_label >= 0) {
        throw std::invalid_argument(
            "ladb_sample: class label supplied but the target model is unconditional");
    }
    return field_of(target_model.score);
}

void check_latent_compat(const LadmModel& a, const LadmModel& b, const char* where) {
    if (a.autoencoder.latent_dim() != b.autoencoder.latent_dim()) {
        throw std::invalid_argument(std::string(where) + ": latent dimensions differ (" +
                                    std::to_string(a.autoencoder.latent_dim()) + " vs " +
                                    std::to_string(b.autoencoder.latent_dim()) + ")");
    }
}

}  // namespace

Vec ladb_sample(const LadmModel& source_model, const LadmModel& target_model, const Vec& x_src,
                const OdeConfig& ode_cfg, int class_label) {
    source_model.validate();
    target_model.validate();
    check_latent_compat(source_model, target_model, "ladb_sample");
    ode_cfg.validate();
    const EpsField tgt = target_field(target_model, class_label);

    const Vec z1 = to_latent(field_of(source_model.score), source_model.schedule,
                             source_model.autoencoder.encode(x_src), ode_cfg);
    const Vec z0 = from_latent(tgt, target_model.schedule, z1, ode_cfg);
    return target_model.autoencoder.decode(z0);
}

Vec multi_source_sample(const std::map<std::string, LadmModel>& source_models,
                        const LadmModel& target_model, const SourceWeighting& weighting,
                        const OdeConfig& ode_cfg, int class_label) {
    weighting.validate();
    target_model.validate();
    ode_cfg.validate();
    const EpsField tgt = target_field(target_model, class_label);

    Vec mean;
    for (std::size_t i = 0; i < weighting.entries.size(); ++i) {
        const SourceWeighting::Entry& e = weighting.entries[i];
        const auto it = source_models.find(e.source_tag);
        if (it == source_models.end()) {
            throw std::invalid_argument("multi_source_sample: unknown source tag '" +
                                        e.source_tag + "'");
        }
        const LadmModel& src = it->second;
        src.validate();
        check_latent_compat(src, target_model, "multi_source_sample");
        const Vec z1 = to_latent(field_of(src.score), src.schedule,
                                 src.autoencoder.encode(e.sample), ode_cfg);
        if (i == 0) {
            mean = scaled(z1, e.rho);
        } else {
            require_same_dim(mean, z1, "multi_source_sample");
            axpy(mean, e.rho, z1);
        }
    }
    const Vec z0 = from_latent(tgt, target_model.schedule, mean, ode_cfg);
    return target_model.autoencoder.decode(z0);
}

}  // namespace ladb
