#include "ladb/config.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "ladb/io.hpp"

namespace ladb {

using ordered_json = nlohmann::ordered_json;

namespace {

TrainConfig stage_defaults(long steps, double t_min) {
    TrainConfig cfg;
    cfg.steps = steps;
    cfg.batch_size = 64;
    cfg.weighting = Weighting::sigma_squared;
    cfg.t_min = t_min;
    cfg.adam.lr = 2e-3;
    cfg.ema_decay = 0.999;
    cfg.lr_schedule = LrSchedule::cosine;
    return cfg;
}

std::string joined(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void reject_unknown_keys(const ordered_json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
        throw std::invalid_argument(path.empty() ? "config: root must be an object"
                                                 : "config: '" + path + "' must be an object");
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument("config: unknown key '" + joined(path, item.key()) + "'");
        }
    }
}

template <class T>
T get_field(const ordered_json& j, const char* key, const std::string& path, T fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->template get<T>();
    } catch (const ordered_json::exception&) {
        throw std::invalid_argument("config: bad value for '" + joined(path, key) + "'");
    }
}

template <class E, class Parse>
E get_enum(const ordered_json& j, const char* key, const std::string& path, E fallback,
           Parse parse) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return parse(it->template get<std::string>());
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: bad value for '" + joined(path, key) + "': " +
                                    e.what());
    }
}

DatasetSpec parse_dataset(const ordered_json& j, const std::string& path, DatasetSpec base) {
    reject_unknown_keys(j, path, {"tag", "dataset", "n", "noise", "dim", "modes"});
    base.tag = get_field(j, "tag", path, base.tag);
    base.dataset = get_enum(j, "dataset", path, base.dataset, dataset_from_string);
    base.n = get_field(j, "n", path, base.n);
    base.noise = get_field(j, "noise", path, base.noise);
    base.dim = get_field(j, "dim", path, base.dim);
    base.modes = get_field(j, "modes", path, base.modes);
    return base;
}

PairingSpec parse_pairing(const ordered_json& j, const std::string& path, PairingSpec base) {
    reject_unknown_keys(j, path, {"map", "angle", "matrix", "offset", "fraction"});
    base.kind = get_enum(j, "map", path, base.kind, pairing_kind_from_string);
    base.angle = get_field(j, "angle", path, base.angle);
    base.matrix = get_field(j, "matrix", path, base.matrix);
    base.offset = get_field(j, "offset", path, base.offset);
    base.fraction = get_field(j, "fraction", path, base.fraction);
    return base;
}

TrainConfig parse_train(const ordered_json& j, const std::string& path, TrainConfig base) {
    reject_unknown_keys(j, path, {"steps", "batch_size", "weighting", "t_min", "lr", "beta1",
                                  "beta2", "eps", "ema_decay", "lr_schedule"});
    base.steps = get_field(j, "steps", path, base.steps);
    base.batch_size = get_field(j, "batch_size", path, base.batch_size);
    base.weighting = get_enum(j, "weighting", path, base.weighting, weighting_from_string);
    base.t_min = get_field(j, "t_min", path, base.t_min);
    base.adam.lr = get_field(j, "lr", path, base.adam.lr);
    base.adam.beta1 = get_field(j, "beta1", path, base.adam.beta1);
    base.adam.beta2 = get_field(j, "beta2", path, base.adam.beta2);
    base.adam.eps = get_field(j, "eps", path, base.adam.eps);
    base.ema_decay = get_field(j, "ema_decay", path, base.ema_decay);
    base.lr_schedule =
        get_enum(j, "lr_schedule", path, base.lr_schedule, lr_schedule_from_string);
    return base;
}

OdeConfig parse_ode(const ordered_json& j, const std::string& path, OdeConfig base) {
    reject_unknown_keys(j, path, {"n_steps", "method", "t_min"});
    base.n_steps = get_field(j, "n_steps", path, base.n_steps);
    base.method = get_enum(j, "method", path, base.method, ode_method_from_string);
    base.t_min = get_field(j, "t_min", path, base.t_min);
    return base;
}

ordered_json dataset_json(const DatasetSpec& s) {
    ordered_json j;
    j["tag"] = s.tag;
    j["dataset"] = to_string(s.dataset);
    j["n"] = s.n;
    j["noise"] = s.noise;
    j["dim"] = s.dim;
    j["modes"] = s.modes;
    return j;
}

ordered_json train_json(const TrainConfig& cfg) {
    ordered_json j;
    j["steps"] = cfg.steps;
    j["batch_size"] = cfg.batch_size;
    j["weighting"] = to_string(cfg.weighting);
    j["t_min"] = cfg.t_min;
    j["lr"] = cfg.adam.lr;
    j["beta1"] = cfg.adam.beta1;
    j["beta2"] = cfg.adam.beta2;
    j["eps"] = cfg.adam.eps;
    j["ema_decay"] = cfg.ema_decay;
    j["lr_schedule"] = to_string(cfg.lr_schedule);
    return j;
}

ordered_json ode_json(const OdeConfig& cfg) {
    ordered_json j;
    j["n_steps"] = cfg.n_steps;
    j["method"] = to_string(cfg.method);
    j["t_min"] = cfg.t_min;
    return j;
}

}  // namespace

ExperimentConfig::ExperimentConfig()
    : train_source(stage_defaults(8000, 1e-4)),
      train_ladm(stage_defaults(8000, 1e-4)),
      train_ddib_target(stage_defaults(8000, 1e-4)),
      train_ddbm(stage_defaults(6000, 1e-3)) {
    target.tag = "tgt";
    transfer_ode.n_steps = 60;
    transfer_ode.direction = Direction::forward;
    sample_ode.n_steps = 60;
    sample_ode.direction = Direction::forward;
}

PairingMap PairingSpec::map() const {
    switch (kind) {
        case Kind::rotation:
            return PairingMap::rotation(angle);
        case Kind::affine:
            return PairingMap::affine(matrix, offset);
        case Kind::component_swap:
            return PairingMap::component_swap();
        case Kind::none:
            break;
    }
    throw std::invalid_argument("pairing: no ground-truth map configured");
}

PairingSpec::Kind pairing_kind_from_string(const std::string& s) {
    if (s == "none") return PairingSpec::Kind::none;
    if (s == "rotation") return PairingSpec::Kind::rotation;
    if (s == "affine") return PairingSpec::Kind::affine;
    if (s == "component_swap") return PairingSpec::Kind::component_swap;
    throw std::invalid_argument("unknown pairing map '" + s + "'");
}

std::string to_string(PairingSpec::Kind k) {
    switch (k) {
        case PairingSpec::Kind::none: return "none";
        case PairingSpec::Kind::rotation: return "rotation";
        case PairingSpec::Kind::affine: return "affine";
        case PairingSpec::Kind::component_swap: return "component_swap";
    }
    throw std::invalid_argument("unknown pairing map kind");
}

MlpSpec NetworkSpec::build(int dim, int condition_dim) const {
    MlpSpec spec;
    spec.input_dim = dim;
    spec.output_dim = dim;
    spec.hidden_dims = hidden_dims;
    spec.activation = activation;
    spec.time_embedding_dim = time_embedding_dim;
    spec.condition_dim = condition_dim;
    spec.validate();
    return spec;
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

    if (task.empty()) fail("task must be non-empty");
    if (output_dir.empty()) fail("output_dir must be non-empty");
    if (sources.empty()) fail("at least one source is required");

    std::set<std::string> tags;
    auto check_dataset = [&](const DatasetSpec& s, const std::string& what) {
        if (s.tag.empty()) fail(what + ".tag must be non-empty");
        if (!tags.insert(s.tag).second) fail("duplicate domain tag '" + s.tag + "'");
        if (s.n < 1) fail(what + ".n must be >= 1");
        if (!(s.noise >= 0.0) || !std::isfinite(s.noise)) fail(what + ".noise must be >= 0");
        if (s.dim < 2 || s.dim > 16) fail(what + ".dim must lie in [2, 16]");
        if (s.modes < 1) fail(what + ".modes must be >= 1");
        if (s.dim != sources.front().dim) fail("all domains must share one dimension");
    };
    for (std::size_t i = 0; i < sources.size(); ++i) {
        check_dataset(sources[i], "sources[" + std::to_string(i) + "]");
    }
    check_dataset(target, "target");

    if (!(pairing.fraction >= 0.0 && pairing.fraction <= 1.0)) {
        fail("pairing.fraction must lie in [0, 1]");
    }
    if (!pairing.has_map()) {
        if (pairing.fraction != 0.0) fail("pairing.fraction must be 0 when pairing.map is none");
    } else {
        if (pairing.kind == PairingSpec::Kind::affine) {
            const auto d = static_cast<std::size_t>(sources.front().dim);
            if (pairing.matrix.size() != d * d) {
                fail("pairing.matrix must be dim x dim");
            }
            if (pairing.offset.size() != d) fail("pairing.offset must have length dim");
        }
        try {
            (void)pairing.map();
        } catch (const std::exception& e) {
            fail(std::string("pairing: ") + e.what());
        }
    }

    try {
        schedule.validate();
        (void)network.build(sources.front().dim);
        train_source.validate();
        train_ladm.validate();
        train_ddib_target.validate();
        train_ddbm.validate();
        transfer_ode.validate();
        sample_ode.validate();
    } catch (const std::exception& e) {
        fail(e.what());
    }
    if (!(train_ddbm.t_min > 0.0 && train_ddbm.t_min < 0.5)) {
        fail("train.ddbm.t_min must lie in (0, 0.5)");
    }

    if (!(ddbm.sigma_c > 0.0) || !std::isfinite(ddbm.sigma_c)) {
        fail("ddbm.sigma_c must be positive");
    }
    if (ddbm.sample_steps < 1) fail("ddbm.sample_steps must be >= 1");

    if (metrics.n_projections < 1) fail("metrics.n_projections must be >= 1");
    if (metrics.sample_cap < 2) fail("metrics.sample_cap must be >= 2");
    if (!(metrics.mmd_bandwidth >= 0.0)) fail("metrics.bandwidth must be >= 0");

    if (bench.methods.empty()) fail("bench.methods must be non-empty");
    std::set<std::string> seen_methods;
    for (const std::string& m : bench.methods) {
        if (m != "ladb" && m != "ddib" && m != "ddbm") {
            fail("bench.methods entry '" + m + "' is not one of ladb, ddib, ddbm");
        }
        if (!seen_methods.insert(m).second) fail("bench.methods lists '" + m + "' twice");
    }
    if (bench.fractions.empty()) fail("bench.fractions must be non-empty");
    for (double f : bench.fractions) {
        if (!(f >= 0.0 && f <= 1.0)) fail("bench.fractions entries must lie in [0, 1]");
        if (f > 0.0 && !pairing.has_map()) {
            fail("bench.fractions must be 0 when pairing.map is none");
        }
    }
    if (bench.seeds.empty()) fail("bench.seeds must be non-empty");
    if (bench.eval_n < 2) fail("bench.eval_n must be >= 2");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    ordered_json doc = ordered_json::parse(json_text, nullptr, false);
    if (doc.is_discarded()) throw std::invalid_argument("config: not valid JSON");

    reject_unknown_keys(doc, "", {"task", "output_dir", "seed", "sources", "target", "pairing",
                                  "schedule", "network", "train", "ode", "ddbm", "metrics",
                                  "bench"});

    ExperimentConfig cfg;
    cfg.task = get_field(doc, "task", "", cfg.task);
    cfg.output_dir = get_field(doc, "output_dir", "", cfg.output_dir);
    cfg.seed = get_field(doc, "seed", "", cfg.seed);

    if (const auto it = doc.find("sources"); it != doc.end()) {
        if (!it->is_array() || it->empty()) {
            throw std::invalid_argument("config: 'sources' must be a non-empty array");
        }
        cfg.sources.clear();
        for (std::size_t i = 0; i < it->size(); ++i) {
            cfg.sources.push_back(
                parse_dataset((*it)[i], "sources[" + std::to_string(i) + "]", DatasetSpec{}));
        }
    }
    if (const auto it = doc.find("target"); it != doc.end()) {
        DatasetSpec base;
        base.tag = "tgt";
        cfg.target = parse_dataset(*it, "target", base);
    }
    if (const auto it = doc.find("pairing"); it != doc.end()) {
        cfg.pairing = parse_pairing(*it, "pairing", cfg.pairing);
    }
    if (const auto it = doc.find("schedule"); it != doc.end()) {
        reject_unknown_keys(*it, "schedule", {"kind", "beta_min", "beta_max"});
        cfg.schedule.kind =
            get_enum(*it, "kind", "schedule", cfg.schedule.kind, schedule_kind_from_string);
        cfg.schedule.beta_min = get_field(*it, "beta_min", "schedule", cfg.schedule.beta_min);
        cfg.schedule.beta_max = get_field(*it, "beta_max", "schedule", cfg.schedule.beta_max);
    }
    if (const auto it = doc.find("network"); it != doc.end()) {
        reject_unknown_keys(*it, "network", {"hidden_dims", "time_embedding_dim", "activation"});
        cfg.network.hidden_dims =
            get_field(*it, "hidden_dims", "network", cfg.network.hidden_dims);
        cfg.network.time_embedding_dim =
            get_field(*it, "time_embedding_dim", "network", cfg.network.time_embedding_dim);
        cfg.network.activation =
            get_enum(*it, "activation", "network", cfg.network.activation, activation_from_string);
    }
    if (const auto it = doc.find("train"); it != doc.end()) {
        reject_unknown_keys(*it, "train", {"source", "ladm", "ddib_target", "ddbm"});
        if (const auto s = it->find("source"); s != it->end()) {
            cfg.train_source = parse_train(*s, "train.source", cfg.train_source);
        }
        if (const auto s = it->find("ladm"); s != it->end()) {
            cfg.train_ladm = parse_train(*s, "train.ladm", cfg.train_ladm);
        }
        if (const auto s = it->find("ddib_target"); s != it->end()) {
            cfg.train_ddib_target = parse_train(*s, "train.ddib_target", cfg.train_ddib_target);
        }
        if (const auto s = it->find("ddbm"); s != it->end()) {
            cfg.train_ddbm = parse_train(*s, "train.ddbm", cfg.train_ddbm);
        }
    }
    if (const auto it = doc.find("ode"); it != doc.end()) {
        reject_unknown_keys(*it, "ode", {"transfer", "sample"});
        if (const auto s = it->find("transfer"); s != it->end()) {
            cfg.transfer_ode = parse_ode(*s, "ode.transfer", cfg.transfer_ode);
        }
        if (const auto s = it->find("sample"); s != it->end()) {
            cfg.sample_ode = parse_ode(*s, "ode.sample", cfg.sample_ode);
        }
    }
    if (const auto it = doc.find("ddbm"); it != doc.end()) {
        reject_unknown_keys(*it, "ddbm", {"sigma_c", "sample_steps"});
        cfg.ddbm.sigma_c = get_field(*it, "sigma_c", "ddbm", cfg.ddbm.sigma_c);
        cfg.ddbm.sample_steps = get_field(*it, "sample_steps", "ddbm", cfg.ddbm.sample_steps);
    }
    if (const auto it = doc.find("metrics"); it != doc.end()) {
        reject_unknown_keys(*it, "metrics", {"n_projections", "sample_cap", "bandwidth"});
        cfg.metrics.n_projections =
            get_field(*it, "n_projections", "metrics", cfg.metrics.n_projections);
        cfg.metrics.sample_cap = get_field(*it, "sample_cap", "metrics", cfg.metrics.sample_cap);
        cfg.metrics.mmd_bandwidth =
            get_field(*it, "bandwidth", "metrics", cfg.metrics.mmd_bandwidth);
    }
    if (const auto it = doc.find("bench"); it != doc.end()) {
        reject_unknown_keys(*it, "bench", {"methods", "fractions", "seeds", "eval_n"});
        cfg.bench.methods = get_field(*it, "methods", "bench", cfg.bench.methods);
        cfg.bench.fractions = get_field(*it, "fractions", "bench", cfg.bench.fractions);
        cfg.bench.seeds = get_field(*it, "seeds", "bench", cfg.bench.seeds);
        cfg.bench.eval_n = get_field(*it, "eval_n", "bench", cfg.bench.eval_n);
    }

    // stage seeds derive from the experiment seed; the orchestrator may
    // override them per benchmark cell
    cfg.train_source.seed = cfg.seed;
    cfg.train_ladm.seed = cfg.seed;
    cfg.train_ddib_target.seed = cfg.seed;
    cfg.train_ddbm.seed = cfg.seed;
    cfg.transfer_ode.direction = Direction::forward;
    cfg.sample_ode.direction = Direction::forward;

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    try {
        return parse_experiment_config(read_text_file(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["task"] = cfg.task;
    doc["output_dir"] = cfg.output_dir;
    doc["seed"] = cfg.seed;
    ordered_json sources = ordered_json::array();
    for (const DatasetSpec& s : cfg.sources) sources.push_back(dataset_json(s));
    doc["sources"] = std::move(sources);
    doc["target"] = dataset_json(cfg.target);
    ordered_json pairing;
    pairing["map"] = to_string(cfg.pairing.kind);
    if (cfg.pairing.kind == PairingSpec::Kind::rotation) pairing["angle"] = cfg.pairing.angle;
    if (cfg.pairing.kind == PairingSpec::Kind::affine) {
        pairing["matrix"] = cfg.pairing.matrix;
        pairing["offset"] = cfg.pairing.offset;
    }
    pairing["fraction"] = cfg.pairing.fraction;
    doc["pairing"] = std::move(pairing);
    ordered_json schedule;
    schedule["kind"] = to_string(cfg.schedule.kind);
    schedule["beta_min"] = cfg.schedule.beta_min;
    schedule["beta_max"] = cfg.schedule.beta_max;
    doc["schedule"] = std::move(schedule);
    ordered_json network;
    network["hidden_dims"] = cfg.network.hidden_dims;
    network["time_embedding_dim"] = cfg.network.time_embedding_dim;
    network["activation"] = to_string(cfg.network.activation);
    doc["network"] = std::move(network);
    ordered_json train;
    train["source"] = train_json(cfg.train_source);
    train["ladm"] = train_json(cfg.train_ladm);
    train["ddib_target"] = train_json(cfg.train_ddib_target);
    train["ddbm"] = train_json(cfg.train_ddbm);
    doc["train"] = std::move(train);
    ordered_json ode;
    ode["transfer"] = ode_json(cfg.transfer_ode);
    ode["sample"] = ode_json(cfg.sample_ode);
    doc["ode"] = std::move(ode);
    ordered_json ddbm;
    ddbm["sigma_c"] = cfg.ddbm.sigma_c;
    ddbm["sample_steps"] = cfg.ddbm.sample_steps;
    doc["ddbm"] = std::move(ddbm);
    ordered_json metrics;
    metrics["n_projections"] = cfg.metrics.n_projections;
    metrics["sample_cap"] = cfg.metrics.sample_cap;
    metrics["bandwidth"] = cfg.metrics.mmd_bandwidth;
    doc["metrics"] = std::move(metrics);
    ordered_json bench;
    bench["methods"] = cfg.bench.methods;
    bench["fractions"] = cfg.bench.fractions;
    bench["seeds"] = cfg.bench.seeds;
    bench["eval_n"] = cfg.bench.eval_n;
    doc["bench"] = std::move(bench);
    return doc.dump(2) + "\n";
}

}  // namespace ladb
