#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ladb/baselines.hpp"
#include "ladb/datasets.hpp"
#include "ladb/diffusion.hpp"
#include "ladb/pipeline.hpp"

namespace ladb {

// Decimal text with 17 significant digits: parses back to the identical bits.
std::string format_double(double v);

// Writes content to <path>.tmp and renames over path, so readers never see a
// partially written file. Creates parent directories as needed.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// --- model checkpoints -----------------------------------------------------
// JSON documents holding {kind, spec, layout, values, schedule/bridge
// parameters, training metadata, seed}. The flat parameter vector is stored
// as one space-separated decimal blob at full precision, so save/load
// round-trips bit for bit.

struct LdmCheckpoint {
    LadmModel model;
    TrainConfig train;
};

struct DdbmCheckpoint {
    BridgeNet net;
    TrainConfig train;
};

void save_ldm_checkpoint(const std::string& path, const LadmModel& model,
                         const TrainConfig& train);
LdmCheckpoint load_ldm_checkpoint(const std::string& path);

void save_ddbm_checkpoint(const std::string& path, const BridgeNet& net, const TrainConfig& train);
DdbmCheckpoint load_ddbm_checkpoint(const std::string& path);

// "ldm" or "ddbm" without loading the whole document's tensors.
std::string checkpoint_kind(const std::string& path);

// --- point sets ------------------------------------------------------------
// CSV with header x0,...,xd-1[,label]; one row per point, full precision.

void save_batch_csv(const std::string& path, const Batch& batch);
// domain_tag defaults to the file name stem when empty.
Batch load_batch_csv(const std::string& path, const std::string& domain_tag = "");

// CSV with header t,x0,...,xd-1; one row per stored integration point.
void save_trajectory_csv(const std::string& path, const Trajectory& traj);

// CSV with header step,loss.
void save_losses_csv(const std::string& path, const std::vector<double>& losses);

// --- manifests -------------------------------------------------------------
// Small JSON documents recording how derived artifacts were produced, so any
// experiment is re-buildable from files alone.

struct MixtureManifest {
    struct PairedRef {
        std::string source_csv;
        std::string target_csv;
        long count = 0;
    };
    struct UnpairedRef {
        std::string csv;
        long count = 0;
    };
    std::vector<PairedRef> paired;
    std::vector<UnpairedRef> unpaired;
    // settings used (or to be used) for inferring latent correspondences
    OdeConfig transfer_ode;

    long paired_count() const;
    long unpaired_count() const;
};

void save_mixture_manifest(const std::string& path, const MixtureManifest& manifest);
MixtureManifest load_mixture_manifest(const std::string& path);

struct PipelineManifest {
    std::map<std::string, std::string> source_checkpoints;  // domain tag -> path
    OdeConfig transfer_ode;
    std::string mixture_manifest;
    std::string target_checkpoint;
};

void save_pipeline_manifest(const std::string& path, const PipelineManifest& manifest);
PipelineManifest load_pipeline_manifest(const std::string& path);

}  // namespace ladb
