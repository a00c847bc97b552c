#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ladb/autoencoder.hpp"
#include "ladb/coupling.hpp"
#include "ladb/datasets.hpp"
#include "ladb/diffusion.hpp"
#include "ladb/schedule.hpp"
#include "ladb/score_net.hpp"

namespace ladb {

// A trained latent diffusion model for one domain: the autoencoder bounding
// the latent space, the noise-prediction network, and the schedule it was
// trained under.
struct LadmModel {
    Autoencoder autoencoder = Autoencoder::identity(2);
    ScoreNet score;
    NoiseSchedule schedule;
    std::string domain_tag;
    int condition_dim = 0;

    void validate() const;  // throws std::invalid_argument on inconsistency
};

// Per-source weights for multi-source sampling: each entry carries a source
// tag, the sample to translate from that source, and a weight rho. Weights
// must be strictly positive and sum to 1 within 1e-12.
struct SourceWeighting {
    struct Entry {
        std::string source_tag;
        Vec sample;
        double rho = 0.0;
    };
    std::vector<Entry> entries;

    void validate() const;
};

// Direction-normalized solves used by every translation path: the forward
// solve carries an encoded point to its latent at t = 1, the reverse solve
// carries a latent back to t = 0. cfg's direction field is ignored.
Vec to_latent(const EpsField& eps, const NoiseSchedule& schedule, const Vec& z0,
              const OdeConfig& cfg);
Vec from_latent(const EpsField& eps, const NoiseSchedule& schedule, const Vec& z1,
                const OdeConfig& cfg);

// Standard latent diffusion pretraining on one domain: encodes the data and
// runs denoising score matching with the fully unpaired coupling (every x1 a
// fresh prior draw). The network is initialized from Rng(cfg.seed)'s "init"
// stream, so the result is a pure function of (data, configs). When loss_out
// is non-null it receives the per-step mean batch loss.
LadmModel train_source_ldm(const Batch& source_data, const Autoencoder& autoencoder,
                           const NoiseSchedule& schedule, const MlpSpec& net_spec,
                           const TrainConfig& cfg, std::vector<double>* loss_out = nullptr);

// Lifts data-space correspondences (x_src, x_tgt) into latent-space ones:
// each x_src is encoded with the source model and forward-solved to t = 1,
// yielding (x1_latent, x_tgt) with input order preserved.
std::vector<std::pair<Vec, Vec>> transfer_correspondences(
    const LadmModel& source_model, const std::vector<std::pair<Vec, Vec>>& paired,
    const OdeConfig& ode_cfg);

// Trains the target-domain model on the semi-supervised mixture: paired
// entries couple encode(x_tgt) to their transferred latent, unpaired targets
// couple to fresh prior draws. Multiple sources pool their paired sets into
// one mixture with uniform weights. Labels on unpaired batches are ignored
// here (see train_conditional_ladm).
LadmModel train_ladm(const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_latent_sets,
                     const std::vector<Batch>& unpaired_targets,
                     const Autoencoder& target_autoencoder, const NoiseSchedule& schedule,
                     const MlpSpec& net_spec, const TrainConfig& cfg,
                     const std::string& domain_tag = "target",
                     std::vector<double>* loss_out = nullptr);

// Single-source convenience overload. paired_latent_target entries are
// (x1_latent, x_tgt).
LadmModel train_ladm(const std::vector<std::pair<Vec, Vec>>& paired_latent_target,
                     const Batch& unpaired_target, const Autoencoder& target_autoencoder,
                     const NoiseSchedule& schedule, const MlpSpec& net_spec,
                     const TrainConfig& cfg, const std::string& domain_tag = "target",
                     std::vector<double>* loss_out = nullptr);

// Class-conditional variant: every target sample must carry a label in
// [0, condition_dim); the network receives the one-hot class alongside each
// input and the returned model demands a class at sampling time.
LadmModel train_conditional_ladm(
    const std::vector<std::vector<std::pair<Vec, Vec>>>& paired_latent_sets,
    const std::vector<std::vector<int>>& paired_label_sets,
    const std::vector<Batch>& unpaired_targets, const Autoencoder& target_autoencoder,
    const NoiseSchedule& schedule, const MlpSpec& net_spec, const TrainConfig& cfg,
    int condition_dim, const std::string& domain_tag = "target",
    std::vector<double>* loss_out = nullptr);

// Domain translation: encode under the source model, forward-solve to the
// shared latent, reverse-solve under the target model, decode. class_label
// must be supplied exactly when the target model is conditional. Latent
// dimensions are checked before any solve.
Vec ladb_sample(const LadmModel& source_model, const LadmModel& target_model, const Vec& x_src,
                const OdeConfig& ode_cfg, int class_label = -1);

// Multi-source translation: each entry's sample is forward-solved under its
// tagged source model, the latents are combined by the Euclidean weighted
// mean (the Frechet mean in the flat latent space), and the mean is
// reverse-solved and decoded under the target model. A single entry with
// rho = 1 reproduces ladb_sample bit-for-bit.
Vec multi_source_sample(const std::map<std::string, LadmModel>& source_models,
                        const LadmModel& target_model, const SourceWeighting& weighting,
                        const OdeConfig& ode_cfg, int class_label = -1);

}  // namespace ladb
