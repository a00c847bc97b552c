#include "ladb/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "ladb/baselines.hpp"
#include "ladb/io.hpp"
#include "ladb/metrics.hpp"
#include "ladb/pipeline.hpp"

namespace ladb {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_metric(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string("MetricReport: ") + name +
                                    " must be finite and non-negative");
    }
}

std::string metric_cell(double v) { return format_double(v); }

// Fractions come straight from the config, so the short form reads back
// exactly for the round values used in sweeps.
std::string fraction_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// Models that depend only on the seed, shared across fractions and methods.
struct SeedCache {
    std::map<std::uint64_t, LadmModel> source;
    std::map<std::uint64_t, LadmModel> ddib_target;
};

Batch mapped_batch(const Batch& src, const PairingMap& map, const std::string& tag) {
    Batch out;
    out.domain_tag = tag;
    out.points.reserve(src.points.size());
    for (const Vec& x : src.points) out.points.push_back(map.apply(x));
    out.labels = src.labels;
    return out;
}

Batch truncated(const Batch& b, int cap) {
    if (b.size() <= cap) return b;
    Batch out;
    out.domain_tag = b.domain_tag;
    out.points.assign(b.points.begin(), b.points.begin() + cap);
    if (!b.labels.empty()) out.labels.assign(b.labels.begin(), b.labels.begin() + cap);
    return out;
}

Batch generate_domain(const DatasetSpec& spec, int n, Rng rng) {
    Batch b = generate(spec.dataset, n, spec.noise, rng, spec.dim, spec.modes);
    b.domain_tag = spec.tag;
    return b;
}

// Everything a cell needs that the method choice does not change.
struct CellData {
    Batch source_train;   // the seed's source observations
    Batch target_train;   // the seed's target observations (mapped or drawn)
    Batch eval_src;       // fresh source points to translate
    Batch eval_truth;     // their ground-truth targets; empty when no map
    Batch target_ref;     // fresh target draw scored against
};

CellData make_cell_data(const ExperimentConfig& cfg, std::uint64_t seed) {
    const DatasetSpec& src = cfg.sources.front();
    const Rng base(seed);
    CellData d;
    d.source_train = generate_domain(src, src.n, base.stream("data-src"));
    d.eval_src = generate_domain(src, cfg.bench.eval_n, base.stream("eval"));
    d.eval_src.labels.clear();
    if (cfg.pairing.has_map()) {
        const PairingMap map = cfg.pairing.map();
        d.target_train = mapped_batch(d.source_train, map, cfg.target.tag);
        d.eval_truth = mapped_batch(d.eval_src, map, cfg.target.tag);
        d.target_ref =
            mapped_batch(generate_domain(src, cfg.bench.eval_n, base.stream("ref")), map,
                         cfg.target.tag);
    } else {
        DatasetSpec tgt = cfg.target;
        d.target_train = generate_domain(tgt, tgt.n, base.stream("data-tgt"));
        d.target_ref = generate_domain(tgt, cfg.bench.eval_n, base.stream("ref"));
    }
    d.target_train.labels.clear();
    d.target_ref.labels.clear();
    return d;
}

TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    return cfg;
}

LadmModel& seed_source_model(const ExperimentConfig& cfg, const CellData& d, std::uint64_t seed,
                             SeedCache& cache) {
    auto it = cache.source.find(seed);
    if (it == cache.source.end()) {
        const int dim = cfg.sources.front().dim;
        LadmModel model = train_source_ldm(d.source_train, Autoencoder::identity(dim),
                                           cfg.schedule, cfg.network.build(dim),
                                           with_seed(cfg.train_source, seed));
        model.domain_tag = d.source_train.domain_tag;
        it = cache.source.emplace(seed, std::move(model)).first;
    }
    return it->second;
}

LadmModel& seed_ddib_target(const ExperimentConfig& cfg, const CellData& d, std::uint64_t seed,
                            SeedCache& cache) {
    auto it = cache.ddib_target.find(seed);
    if (it == cache.ddib_target.end()) {
        const int dim = cfg.sources.front().dim;
        LadmModel model = train_source_ldm(d.target_train, Autoencoder::identity(dim),
                                           cfg.schedule, cfg.network.build(dim),
                                           with_seed(cfg.train_ddib_target, seed));
        model.domain_tag = d.target_train.domain_tag;
        it = cache.ddib_target.emplace(seed, std::move(model)).first;
    }
    return it->second;
}

struct Translated {
    Batch forward;  // translated eval points, input order preserved
    Batch cycled;   // translated back to the source domain
};

Translated run_ladb(const ExperimentConfig& cfg, const CellData& d, double fraction,
                    std::uint64_t seed, SeedCache& cache) {
    const int dim = cfg.sources.front().dim;
    const LadmModel& src_model = seed_source_model(cfg, d, seed, cache);

    const PairingMap map = cfg.pairing.map();
    Rng pair_rng = Rng(seed).stream("pairs");
    const PairedData pairs = make_pairs(d.source_train, map, fraction, pair_rng);
    const auto latent_pairs =
        transfer_correspondences(src_model, pairs.paired, cfg.transfer_ode);
    Batch pool = pairs.unpaired_target;
    pool.labels.clear();
    const LadmModel tgt_model =
        train_ladm(latent_pairs, pool, Autoencoder::identity(dim), cfg.schedule,
                   cfg.network.build(dim), with_seed(cfg.train_ladm, seed), cfg.target.tag);

    Translated out;
    out.forward.domain_tag = cfg.target.tag;
    out.cycled.domain_tag = d.source_train.domain_tag;
    for (const Vec& x : d.eval_src.points) {
        out.forward.points.push_back(ladb_sample(src_model, tgt_model, x, cfg.sample_ode));
        out.cycled.points.push_back(
            ladb_sample(tgt_model, src_model, out.forward.points.back(), cfg.sample_ode));
    }
    return out;
}

Translated run_ddib(const ExperimentConfig& cfg, const CellData& d, std::uint64_t seed,
                    SeedCache& cache) {
    const LadmModel& src_model = seed_source_model(cfg, d, seed, cache);
    const LadmModel& tgt_model = seed_ddib_target(cfg, d, seed, cache);

    Translated out;
    out.forward.domain_tag = cfg.target.tag;
    out.cycled.domain_tag = d.source_train.domain_tag;
    for (const Vec& x : d.eval_src.points) {
        out.forward.points.push_back(ddib_translate(src_model, tgt_model, x, cfg.sample_ode));
        out.cycled.points.push_back(
            ddib_translate(tgt_model, src_model, out.forward.points.back(), cfg.sample_ode));
    }
    return out;
}

Translated run_ddbm(const ExperimentConfig& cfg, const CellData& d, double fraction,
                    std::uint64_t seed) {
    const int dim = cfg.sources.front().dim;
    if (!cfg.pairing.has_map()) {
        throw std::invalid_argument("ddbm requires a ground-truth pairing map: "
                                    "no pairs exist without one");
    }
    const PairingMap map = cfg.pairing.map();
    Rng pair_rng = Rng(seed).stream("pairs");
    const PairedData pairs = make_pairs(d.source_train, map, fraction, pair_rng);
    if (pairs.paired.empty()) {
        throw std::invalid_argument("ddbm needs at least one revealed pair (fraction " +
                                    fraction_cell(fraction) + " of n = " +
                                    std::to_string(d.source_train.size()) + " gives none)");
    }

    // the bridge runs from the conditioning endpoint x1 to the generated x0,
    // so the forward direction conditions on the source point
    std::vector<std::pair<Vec, Vec>> fwd_pairs;   // (x0 = target, x1 = source)
    std::vector<std::pair<Vec, Vec>> back_pairs;  // (x0 = source, x1 = target)
    fwd_pairs.reserve(pairs.paired.size());
    back_pairs.reserve(pairs.paired.size());
    for (const auto& [x_src, x_tgt] : pairs.paired) {
        fwd_pairs.emplace_back(x_tgt, x_src);
        back_pairs.emplace_back(x_src, x_tgt);
    }
    const MlpSpec bridge_spec = cfg.network.build(dim, /*condition_dim=*/dim);
    const BridgeNet fwd = ddbm_train(fwd_pairs, cfg.ddbm.sigma_c, bridge_spec,
                                     with_seed(cfg.train_ddbm, seed));
    const BridgeNet back = ddbm_train(back_pairs, cfg.ddbm.sigma_c, bridge_spec,
                                      with_seed(cfg.train_ddbm, seed));

    Rng fwd_rng = Rng(seed).stream("ddbm-fwd");
    Rng back_rng = Rng(seed).stream("ddbm-back");
    Translated out;
    out.forward.domain_tag = cfg.target.tag;
    out.cycled.domain_tag = d.source_train.domain_tag;
    for (const Vec& x : d.eval_src.points) {
        out.forward.points.push_back(ddbm_sample(fwd, x, cfg.ddbm.sample_steps, fwd_rng));
        out.cycled.points.push_back(
            ddbm_sample(back, out.forward.points.back(), cfg.ddbm.sample_steps, back_rng));
    }
    return out;
}

MetricReport run_cell(const ExperimentConfig& cfg, const std::string& method, double fraction,
                      std::uint64_t seed, SeedCache& cache) {
    MetricReport report;
    report.task = cfg.task;
    report.method = method;
    report.paired_fraction = fraction;
    report.seed = seed;
    report.sliced_w2 = kNan;
    report.mmd = kNan;
    report.pairing_mse = kNan;
    report.cycle_err = kNan;
    try {
        const CellData d = make_cell_data(cfg, seed);
        Translated t;
        if (method == "ladb") {
            t = run_ladb(cfg, d, fraction, seed, cache);
        } else if (method == "ddib") {
            t = run_ddib(cfg, d, seed, cache);
        } else if (method == "ddbm") {
            t = run_ddbm(cfg, d, fraction, seed);
        } else {
            throw std::invalid_argument("unknown method '" + method + "'");
        }

        const Batch scored = truncated(t.forward, cfg.metrics.sample_cap);
        const Batch ref = truncated(d.target_ref, cfg.metrics.sample_cap);
        report.n = scored.size();
        Rng metric_rng = Rng(seed).stream("metrics");
        report.sliced_w2 = sliced_w2(scored, ref, cfg.metrics.n_projections, metric_rng);
        // the biased (V-statistic) estimator: non-negative by construction,
        // which the report invariant requires
        report.mmd = mmd_biased(scored, ref, cfg.metrics.mmd_bandwidth);
        if (cfg.pairing.has_map()) {
            report.pairing_mse =
                pairing_mse(scored, truncated(d.eval_truth, cfg.metrics.sample_cap));
        }
        report.cycle_err = pairing_mse(truncated(t.cycled, cfg.metrics.sample_cap),
                                       truncated(d.eval_src, cfg.metrics.sample_cap));
        report.validate();
    } catch (const std::exception& e) {
        report.failed = true;
        report.error = e.what();
        report.n = 0;
        report.sliced_w2 = kNan;
        report.mmd = kNan;
        report.pairing_mse = kNan;
        report.cycle_err = kNan;
    }
    return report;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void MetricReport::validate() const {
    if (failed) return;
    if (task.empty() || method.empty()) {
        throw std::invalid_argument("MetricReport: task and method must be non-empty");
    }
    if (n < 1) throw std::invalid_argument("MetricReport: n must be >= 1");
    require_metric(sliced_w2, "sliced_w2");
    require_metric(mmd, "mmd");
    require_metric(cycle_err, "cycle_err");
    if (!std::isnan(pairing_mse)) require_metric(pairing_mse, "pairing_mse");
}

std::string report_csv(const std::vector<MetricReport>& rows) {
    std::string out = "task,method,paired_fraction,seed,n,sliced_w2,mmd,pairing_mse,cycle_err,"
                      "wall_ms\n";
    for (const MetricReport& r : rows) {
        r.validate();
        out += r.task + ',' + r.method + ',' + fraction_cell(r.paired_fraction) + ',' +
               std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
               metric_cell(r.sliced_w2) + ',' + metric_cell(r.mmd) + ',' +
               metric_cell(r.pairing_mse) + ',' + metric_cell(r.cycle_err) + ",0\n";
    }
    return out;
}

std::vector<AggregateRow> aggregate_report(const std::vector<MetricReport>& rows) {
    std::vector<AggregateRow> out;
    auto find_group = [&](const MetricReport& r) -> AggregateRow& {
        for (AggregateRow& g : out) {
            if (g.task == r.task && g.method == r.method &&
                g.paired_fraction == r.paired_fraction) {
                return g;
            }
        }
        AggregateRow g;
        g.task = r.task;
        g.method = r.method;
        g.paired_fraction = r.paired_fraction;
        out.push_back(std::move(g));
        return out.back();
    };

    // collect per-group metric samples, then fold into mean/std
    struct Samples {
        std::vector<double> w2, mmd, mse, cyc;
    };
    std::vector<Samples> samples;
    for (const MetricReport& r : rows) {
        AggregateRow& g = find_group(r);
        const std::size_t gi = static_cast<std::size_t>(&g - out.data());
        if (samples.size() < out.size()) samples.resize(out.size());
        if (r.failed) continue;
        g.n_seeds += 1;
        samples[gi].w2.push_back(r.sliced_w2);
        samples[gi].mmd.push_back(r.mmd);
        if (!std::isnan(r.pairing_mse)) samples[gi].mse.push_back(r.pairing_mse);
        samples[gi].cyc.push_back(r.cycle_err);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        AggregateRow& g = out[i];
        const Samples& s = samples[i];
        auto fold = [](const std::vector<double>& v, double& mean, double& std) {
            if (v.empty()) {
                mean = kNan;
                std = kNan;
                return;
            }
            mean = mean_of(v);
            std = std_of(v, mean);
        };
        fold(s.w2, g.sliced_w2_mean, g.sliced_w2_std);
        fold(s.mmd, g.mmd_mean, g.mmd_std);
        fold(s.mse, g.pairing_mse_mean, g.pairing_mse_std);
        fold(s.cyc, g.cycle_err_mean, g.cycle_err_std);
    }
    return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "task,method,paired_fraction,n_seeds,sliced_w2_mean,sliced_w2_std,"
                      "mmd_mean,mmd_std,pairing_mse_mean,pairing_mse_std,cycle_err_mean,"
                      "cycle_err_std\n";
    for (const AggregateRow& r : rows) {
        out += r.task + ',' + r.method + ',' + fraction_cell(r.paired_fraction) + ',' +
               std::to_string(r.n_seeds) + ',' + metric_cell(r.sliced_w2_mean) + ',' +
               metric_cell(r.sliced_w2_std) + ',' + metric_cell(r.mmd_mean) + ',' +
               metric_cell(r.mmd_std) + ',' + metric_cell(r.pairing_mse_mean) + ',' +
               metric_cell(r.pairing_mse_std) + ',' + metric_cell(r.cycle_err_mean) + ',' +
               metric_cell(r.cycle_err_std) + '\n';
    }
    return out;
}

MetricReport benchmark_cell(const ExperimentConfig& cfg, const std::string& method,
                            double fraction, std::uint64_t seed) {
    cfg.validate();
    SeedCache cache;
    return run_cell(cfg, method, fraction, seed, cache);
}

BenchResult benchmark_run(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.sources.size() != 1) {
        throw std::invalid_argument(
            "benchmark_run: exactly one source domain is required (got " +
            std::to_string(cfg.sources.size()) + ")");
    }

    BenchResult result;
    SeedCache cache;
    for (std::uint64_t seed : cfg.bench.seeds) {
        for (const std::string& method : cfg.bench.methods) {
            for (double fraction : cfg.bench.fractions) {
                const auto start = std::chrono::steady_clock::now();
                MetricReport report = run_cell(cfg, method, fraction, seed, cache);
                const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                         std::chrono::steady_clock::now() - start)
                                         .count();
                result.total_cells += 1;
                std::string line = "cell task=" + cfg.task + " method=" + method +
                                   " fraction=" + fraction_cell(fraction) +
                                   " seed=" + std::to_string(seed) +
                                   " wall_ms=" + std::to_string(elapsed);
                if (report.failed) {
                    result.failed_cells += 1;
                    line += " FAILED: " + report.error;
                }
                result.log.push_back(std::move(line));
                result.rows.push_back(std::move(report));
            }
        }
    }
    return result;
}

}  // namespace ladb
