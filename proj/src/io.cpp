#include "ladb/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ladb {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) {
            throw std::runtime_error("cannot create directory " +
                                     target.parent_path().string() + ": " + ec.message());
        }
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path + ": " +
                                 ec.message());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in && !in.eof()) throw std::runtime_error("read failed for " + path);
    return ss.str();
}

namespace {

std::string pack_doubles(const Vec& values) {
    std::string out;
    out.reserve(values.size() * 20);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(' ');
        out += format_double(values[i]);
    }
    return out;
}

Vec unpack_doubles(const std::string& blob, const std::string& what) {
    Vec out;
    const char* p = blob.c_str();
    const char* end = p + blob.size();
    while (p < end) {
        char* next = nullptr;
        errno = 0;
        const double v = std::strtod(p, &next);
        if (next == p) {
            if (*p == ' ') {
                ++p;
                continue;
            }
            throw std::runtime_error(what + ": malformed number near '" +
                                     std::string(p, std::min<std::size_t>(12, end - p)) + "'");
        }
        if (errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL)) {
            throw std::runtime_error(what + ": number out of range");
        }
        out.push_back(v);
        p = next;
    }
    return out;
}

ordered_json spec_to_json(const MlpSpec& spec) {
    ordered_json j;
    j["input_dim"] = spec.input_dim;
    j["hidden_dims"] = spec.hidden_dims;
    j["output_dim"] = spec.output_dim;
    j["activation"] = to_string(spec.activation);
    j["time_embedding_dim"] = spec.time_embedding_dim;
    j["condition_dim"] = spec.condition_dim;
    return j;
}

MlpSpec spec_from_json(const ordered_json& j) {
    MlpSpec spec;
    spec.input_dim = j.at("input_dim").get<int>();
    spec.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
    spec.output_dim = j.at("output_dim").get<int>();
    spec.activation = activation_from_string(j.at("activation").get<std::string>());
    spec.time_embedding_dim = j.at("time_embedding_dim").get<int>();
    spec.condition_dim = j.at("condition_dim").get<int>();
    spec.validate();
    return spec;
}

ordered_json layout_to_json(const std::vector<TensorShape>& layout) {
    ordered_json arr = ordered_json::array();
    for (const TensorShape& t : layout) {
        ordered_json e;
        e["name"] = t.name;
        e["rows"] = t.rows;
        e["cols"] = t.cols;
        arr.push_back(std::move(e));
    }
    return arr;
}

std::vector<TensorShape> layout_from_json(const ordered_json& arr) {
    std::vector<TensorShape> layout;
    for (const auto& e : arr) {
        TensorShape t;
        t.name = e.at("name").get<std::string>();
        t.rows = e.at("rows").get<std::size_t>();
        t.cols = e.at("cols").get<std::size_t>();
        layout.push_back(std::move(t));
    }
    return layout;
}

ordered_json train_to_json(const TrainConfig& cfg) {
    ordered_json j;
    j["steps"] = cfg.steps;
    j["batch_size"] = cfg.batch_size;
    j["weighting"] = to_string(cfg.weighting);
    j["t_min"] = cfg.t_min;
    j["ema_decay"] = cfg.ema_decay;
    j["lr_schedule"] = to_string(cfg.lr_schedule);
    ordered_json adam;
    adam["lr"] = cfg.adam.lr;
    adam["beta1"] = cfg.adam.beta1;
    adam["beta2"] = cfg.adam.beta2;
    adam["eps"] = cfg.adam.eps;
    j["adam"] = std::move(adam);
    return j;
}

TrainConfig train_from_json(const ordered_json& j, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.steps = j.at("steps").get<long>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.weighting = weighting_from_string(j.at("weighting").get<std::string>());
    cfg.t_min = j.at("t_min").get<double>();
    cfg.ema_decay = j.at("ema_decay").get<double>();
    cfg.lr_schedule = lr_schedule_from_string(j.at("lr_schedule").get<std::string>());
    const ordered_json& adam = j.at("adam");
    cfg.adam.lr = adam.at("lr").get<double>();
    cfg.adam.beta1 = adam.at("beta1").get<double>();
    cfg.adam.beta2 = adam.at("beta2").get<double>();
    cfg.adam.eps = adam.at("eps").get<double>();
    cfg.seed = seed;
    return cfg;
}

ScoreNet score_from_json(const ordered_json& doc, const std::string& path) {
    ScoreNet net;
    net.spec = spec_from_json(doc.at("spec"));
    net.params.layout = layout_from_json(doc.at("layout"));
    if (net.params.layout != net.spec.layout()) {
        throw std::runtime_error(path + ": stored layout does not match the network spec");
    }
    net.params.values = unpack_doubles(doc.at("values").get<std::string>(), path + ": values");
    net.params.validate();
    if (!net.params.finite()) throw std::runtime_error(path + ": non-finite parameter values");
    return net;
}

ordered_json parse_document(const std::string& path) {
    const std::string text = read_text_file(path);
    ordered_json doc = ordered_json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw std::runtime_error(path + ": not valid JSON");
    return doc;
}

ordered_json ode_to_json(const OdeConfig& cfg) {
    ordered_json j;
    j["n_steps"] = cfg.n_steps;
    j["method"] = to_string(cfg.method);
    j["direction"] = to_string(cfg.direction);
    j["t_min"] = cfg.t_min;
    return j;
}

OdeConfig ode_from_json(const ordered_json& j) {
    OdeConfig cfg;
    cfg.n_steps = j.at("n_steps").get<int>();
    cfg.method = ode_method_from_string(j.at("method").get<std::string>());
    cfg.direction = direction_from_string(j.at("direction").get<std::string>());
    cfg.t_min = j.at("t_min").get<double>();
    cfg.validate();
    return cfg;
}

}  // namespace

void save_ldm_checkpoint(const std::string& path, const LadmModel& model,
                         const TrainConfig& train) {
    model.validate();
    ordered_json doc;
    doc["kind"] = "ldm";
    doc["spec"] = spec_to_json(model.score.spec);
    doc["layout"] = layout_to_json(model.score.params.layout);
    doc["values"] = pack_doubles(model.score.params.values);
    ordered_json sched;
    sched["kind"] = to_string(model.schedule.kind);
    sched["beta_min"] = model.schedule.beta_min;
    sched["beta_max"] = model.schedule.beta_max;
    doc["schedule"] = std::move(sched);
    ordered_json ae;
    ae["kind"] = to_string(model.autoencoder.kind());
    ae["latent_dim"] = model.autoencoder.latent_dim();
    if (model.autoencoder.kind() == Autoencoder::Kind::affine) {
        ae["matrix"] = pack_doubles(model.autoencoder.matrix());
        ae["offset"] = pack_doubles(model.autoencoder.offset());
    }
    doc["autoencoder"] = std::move(ae);
    doc["domain_tag"] = model.domain_tag;
    doc["condition_dim"] = model.condition_dim;
    doc["training"] = train_to_json(train);
    doc["seed"] = train.seed;
    write_file_atomic(path, doc.dump(2) + "\n");
}

LdmCheckpoint load_ldm_checkpoint(const std::string& path) {
    const ordered_json doc = parse_document(path);
    try {
        if (doc.at("kind").get<std::string>() != "ldm") {
            throw std::runtime_error(path + ": not an ldm checkpoint (kind = " +
                                     doc.at("kind").get<std::string>() + ")");
        }
        LdmCheckpoint out;
        out.model.score = score_from_json(doc, path);
        out.model.schedule.kind =
            schedule_kind_from_string(doc.at("schedule").at("kind").get<std::string>());
        out.model.schedule.beta_min = doc.at("schedule").at("beta_min").get<double>();
        out.model.schedule.beta_max = doc.at("schedule").at("beta_max").get<double>();
        const ordered_json& ae = doc.at("autoencoder");
        const auto ae_kind = autoencoder_kind_from_string(ae.at("kind").get<std::string>());
        if (ae_kind == Autoencoder::Kind::identity) {
            out.model.autoencoder = Autoencoder::identity(ae.at("latent_dim").get<int>());
        } else {
            out.model.autoencoder = Autoencoder::affine(
                unpack_doubles(ae.at("matrix").get<std::string>(), path + ": matrix"),
                unpack_doubles(ae.at("offset").get<std::string>(), path + ": offset"));
        }
        out.model.domain_tag = doc.at("domain_tag").get<std::string>();
        out.model.condition_dim = doc.at("condition_dim").get<int>();
        out.train = train_from_json(doc.at("training"), doc.at("seed").get<std::uint64_t>());
        out.model.validate();
        return out;
    } catch (const ordered_json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_ddbm_checkpoint(const std::string& path, const BridgeNet& net,
                          const TrainConfig& train) {
    net.validate();
    ordered_json doc;
    doc["kind"] = "ddbm";
    doc["spec"] = spec_to_json(net.score.spec);
    doc["layout"] = layout_to_json(net.score.params.layout);
    doc["values"] = pack_doubles(net.score.params.values);
    doc["sigma_c"] = net.sigma_c;
    doc["bridge_t_min"] = net.t_min;
    doc["training"] = train_to_json(train);
    doc["seed"] = train.seed;
    write_file_atomic(path, doc.dump(2) + "\n");
}

DdbmCheckpoint load_ddbm_checkpoint(const std::string& path) {
    const ordered_json doc = parse_document(path);
    try {
        if (doc.at("kind").get<std::string>() != "ddbm") {
            throw std::runtime_error(path + ": not a ddbm checkpoint (kind = " +
                                     doc.at("kind").get<std::string>() + ")");
        }
        DdbmCheckpoint out;
        out.net.score = score_from_json(doc, path);
        out.net.sigma_c = doc.at("sigma_c").get<double>();
        out.net.t_min = doc.at("bridge_t_min").get<double>();
        out.train = train_from_json(doc.at("training"), doc.at("seed").get<std::uint64_t>());
        out.net.validate();
        return out;
    } catch (const ordered_json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string checkpoint_kind(const std::string& path) {
    const ordered_json doc = parse_document(path);
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        throw std::runtime_error(path + ": missing checkpoint kind");
    }
    return doc["kind"].get<std::string>();
}

void save_batch_csv(const std::string& path, const Batch& batch) {
    batch.validate();
    if (batch.size() == 0) throw std::invalid_argument("save_batch_csv: empty batch");
    const int d = batch.dim();
    std::string out;
    for (int c = 0; c < d; ++c) {
        if (c) out.push_back(',');
        out += "x" + std::to_string(c);
    }
    const bool labelled = !batch.labels.empty();
    if (labelled) out += ",label";
    out.push_back('\n');
    for (int i = 0; i < batch.size(); ++i) {
        const Vec& p = batch.points[static_cast<std::size_t>(i)];
        for (int c = 0; c < d; ++c) {
            if (c) out.push_back(',');
            out += format_double(p[static_cast<std::size_t>(c)]);
        }
        if (labelled) {
            out.push_back(',');
            out += std::to_string(batch.labels[static_cast<std::size_t>(i)]);
        }
        out.push_back('\n');
    }
    write_file_atomic(path, out);
}

Batch load_batch_csv(const std::string& path, const std::string& domain_tag) {
    const std::string text = read_text_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    // header: x0,...,xd-1[,label]
    std::vector<std::string> cols;
    {
        std::istringstream h(line);
        std::string c;
        while (std::getline(h, c, ',')) cols.push_back(c);
    }
    bool labelled = false;
    if (!cols.empty() && cols.back() == "label") {
        labelled = true;
        cols.pop_back();
    }
    const int d = static_cast<int>(cols.size());
    if (d == 0) throw std::runtime_error(path + ": no coordinate columns in header");
    for (int c = 0; c < d; ++c) {
        if (cols[static_cast<std::size_t>(c)] != "x" + std::to_string(c)) {
            throw std::runtime_error(path + ": unexpected header column '" +
                                     cols[static_cast<std::size_t>(c)] + "'");
        }
    }

    Batch batch;
    batch.domain_tag =
        domain_tag.empty() ? std::filesystem::path(path).stem().string() : domain_tag;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        Vec p;
        int label = 0;
        int idx = 0;
        const int want = d + (labelled ? 1 : 0);
        while (std::getline(row, cell, ',')) {
            char* end = nullptr;
            errno = 0;
            if (idx < d) {
                const double v = std::strtod(cell.c_str(), &end);
                const bool overflow = errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL);
                if (end == cell.c_str() || *end != '\0' || overflow) {
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": malformed value '" + cell + "'");
                }
                p.push_back(v);
            } else if (labelled && idx == d) {
                const long v = std::strtol(cell.c_str(), &end, 10);
                if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
                    throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                             ": malformed label '" + cell + "'");
                }
                label = static_cast<int>(v);
            }
            // cells beyond the expected width are only counted; the check
            // below reports the width mismatch
            ++idx;
        }
        if (idx != want) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(want) + " cells, got " + std::to_string(idx));
        }
        batch.points.push_back(std::move(p));
        if (labelled) batch.labels.push_back(label);
    }
    if (batch.points.empty()) throw std::runtime_error(path + ": no data rows");
    batch.validate();
    return batch;
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
    if (traj.times.size() != traj.points.size() || traj.points.empty()) {
        throw std::invalid_argument("save_trajectory_csv: malformed trajectory");
    }
    const std::size_t d = traj.points.front().size();
    std::string out = "t";
    for (std::size_t c = 0; c < d; ++c) out += ",x" + std::to_string(c);
    out.push_back('\n');
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out += format_double(traj.times[i]);
        for (std::size_t c = 0; c < d; ++c) {
            out.push_back(',');
            out += format_double(traj.points[i][c]);
        }
        out.push_back('\n');
    }
    write_file_atomic(path, out);
}

void save_losses_csv(const std::string& path, const std::vector<double>& losses) {
    std::string out = "step,loss\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        out += std::to_string(i);
        out.push_back(',');
        out += format_double(losses[i]);
        out.push_back('\n');
    }
    write_file_atomic(path, out);
}

long MixtureManifest::paired_count() const {
    long n = 0;
    for (const PairedRef& p : paired) n += p.count;
    return n;
}

long MixtureManifest::unpaired_count() const {
    long n = 0;
    for (const UnpairedRef& u : unpaired) n += u.count;
    return n;
}

void save_mixture_manifest(const std::string& path, const MixtureManifest& manifest) {
    ordered_json doc;
    doc["kind"] = "mixture-manifest";
    ordered_json paired = ordered_json::array();
    for (const auto& p : manifest.paired) {
        ordered_json e;
        e["source_csv"] = p.source_csv;
        e["target_csv"] = p.target_csv;
        e["count"] = p.count;
        paired.push_back(std::move(e));
    }
    doc["paired"] = std::move(paired);
    ordered_json unpaired = ordered_json::array();
    for (const auto& u : manifest.unpaired) {
        ordered_json e;
        e["csv"] = u.csv;
        e["count"] = u.count;
        unpaired.push_back(std::move(e));
    }
    doc["unpaired"] = std::move(unpaired);
    doc["transfer_ode"] = ode_to_json(manifest.transfer_ode);
    write_file_atomic(path, doc.dump(2) + "\n");
}

MixtureManifest load_mixture_manifest(const std::string& path) {
    const ordered_json doc = parse_document(path);
    try {
        if (doc.at("kind").get<std::string>() != "mixture-manifest") {
            throw std::runtime_error(path + ": not a mixture manifest");
        }
        MixtureManifest m;
        for (const auto& e : doc.at("paired")) {
            MixtureManifest::PairedRef p;
            p.source_csv = e.at("source_csv").get<std::string>();
            p.target_csv = e.at("target_csv").get<std::string>();
            p.count = e.at("count").get<long>();
            m.paired.push_back(std::move(p));
        }
        for (const auto& e : doc.at("unpaired")) {
            MixtureManifest::UnpairedRef u;
            u.csv = e.at("csv").get<std::string>();
            u.count = e.at("count").get<long>();
            m.unpaired.push_back(std::move(u));
        }
        m.transfer_ode = ode_from_json(doc.at("transfer_ode"));
        return m;
    } catch (const ordered_json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_pipeline_manifest(const std::string& path, const PipelineManifest& manifest) {
    ordered_json doc;
    doc["kind"] = "pipeline-manifest";
    ordered_json sources;
    for (const auto& [tag, ckpt] : manifest.source_checkpoints) sources[tag] = ckpt;
    doc["source_checkpoints"] = std::move(sources);
    doc["transfer_ode"] = ode_to_json(manifest.transfer_ode);
    doc["mixture_manifest"] = manifest.mixture_manifest;
    doc["target_checkpoint"] = manifest.target_checkpoint;
    write_file_atomic(path, doc.dump(2) + "\n");
}

PipelineManifest load_pipeline_manifest(const std::string& path) {
    const ordered_json doc = parse_document(path);
    try {
        if (doc.at("kind").get<std::string>() != "pipeline-manifest") {
            throw std::runtime_error(path + ": not a pipeline manifest");
        }
        PipelineManifest m;
        for (const auto& [tag, ckpt] : doc.at("source_checkpoints").items()) {
            m.source_checkpoints[tag] = ckpt.get<std::string>();
        }
        m.transfer_ode = ode_from_json(doc.at("transfer_ode"));
        m.mixture_manifest = doc.at("mixture_manifest").get<std::string>();
        m.target_checkpoint = doc.at("target_checkpoint").get<std::string>();
        return m;
    } catch (const ordered_json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace ladb
