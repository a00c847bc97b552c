#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ladb/datasets.hpp"
#include "ladb/diffusion.hpp"
#include "ladb/mlp.hpp"
#include "ladb/schedule.hpp"

namespace ladb {

// One sampled domain: which synthetic family, how many points, noise level.
struct DatasetSpec {
    std::string tag = "src";
    Dataset dataset = Dataset::two_moons;
    int n = 2000;
    double noise = 0.1;
    int dim = 2;
    int modes = 8;  // gaussian_mixture only
};

// Ground-truth correspondence map plus the supervised fraction. Kind "none"
// means the domains are sampled independently: no exact pairs exist, the
// fraction must be 0, and pairing error is undefined downstream.
struct PairingSpec {
    enum class Kind { none, rotation, affine, component_swap };

    Kind kind = Kind::rotation;
    double angle = 1.5707963267948966;  // rotation only; default quarter turn
    std::vector<double> matrix;         // affine only, row-major dim x dim
    Vec offset;                         // affine only
    double fraction = 1.0;              // share of source points with a revealed target

    bool has_map() const { return kind != Kind::none; }
    // Throws std::invalid_argument for kind none or an invalid affine matrix.
    PairingMap map() const;
};

PairingSpec::Kind pairing_kind_from_string(const std::string& s);
std::string to_string(PairingSpec::Kind k);

// Architecture shared by every score network in the experiment; the in/out
// width is fixed by the data dimension at build time.
struct NetworkSpec {
    std::vector<int> hidden_dims = {64, 64};
    int time_embedding_dim = 16;
    Activation activation = Activation::silu;

    MlpSpec build(int dim, int condition_dim = 0) const;
};

struct MetricParams {
    int n_projections = 128;
    int sample_cap = 10000;   // larger batches are subsampled before metrics
    double mmd_bandwidth = 0.0;  // 0 selects the median-distance heuristic
};

struct BenchParams {
    std::vector<std::string> methods = {"ddib", "ddbm", "ladb"};
    std::vector<double> fractions = {0.1, 0.25, 0.5, 1.0};
    std::vector<std::uint64_t> seeds = {0, 1, 2};
    int eval_n = 1000;  // fresh source points translated and scored per cell
};

// Bridge-specific knobs; the time truncation of the bridge lives in
// train.ddbm.t_min so it is recorded once.
struct DdbmParams {
    double sigma_c = 1.0;
    int sample_steps = 200;
};

struct ExperimentConfig {
    std::string task = "task";
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    std::vector<DatasetSpec> sources = {DatasetSpec{}};
    DatasetSpec target;
    PairingSpec pairing;

    NoiseSchedule schedule;
    NetworkSpec network;

    // per-stage optimizer settings; stage seeds are injected by the caller
    TrainConfig train_source;
    TrainConfig train_ladm;
    TrainConfig train_ddib_target;
    TrainConfig train_ddbm;

    OdeConfig transfer_ode;  // forward solves lifting pairs into the latent
    OdeConfig sample_ode;    // translation solves

    DdbmParams ddbm;
    MetricParams metrics;
    BenchParams bench;

    ExperimentConfig();

    // Throws std::invalid_argument with the failing field spelled out.
    void validate() const;
};

// Strict parse: every recognized field optional with the defaults above,
// unknown keys rejected by their dotted path, full validation before return.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Complete JSON document of the current values; parses back to an equal
// config.
std::string experiment_config_json(const ExperimentConfig& cfg);

}  // namespace ladb
