#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "ladb/io.hpp"
#include "ladb/rng.hpp"

using namespace ladb;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "ladb-io-scratch";
    fs::create_directories(dir);
    return dir;
}

std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!same_bits(a[i], b[i])) return false;
    }
    return true;
}

template <class F>
std::string thrown_message(F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

MlpSpec small_spec(int dim, int condition_dim = 0) {
    MlpSpec spec;
    spec.input_dim = dim;
    spec.hidden_dims = {5, 4};
    spec.output_dim = dim;
    spec.time_embedding_dim = 4;
    spec.condition_dim = condition_dim;
    return spec;
}

// Model with irrational-looking weights so the text round trip is a real
// precision test, not a round-numbers one.
LadmModel make_ldm(std::uint64_t seed, bool affine_ae = false) {
    LadmModel m;
    m.score.spec = small_spec(2);
    Rng init = Rng(seed).stream("init");
    m.score.params = init_params(m.score.spec, init);
    Rng noise = Rng(seed).stream("values");
    for (double& v : m.score.params.values) v = 0.37 * noise.normal() + 0.1;
    if (affine_ae) {
        m.autoencoder = Autoencoder::affine({0.0, 1.0, -1.0, 0.25}, {1.0 / 3.0, -0.7});
    } else {
        m.autoencoder = Autoencoder::identity(2);
    }
    m.domain_tag = "alpha";
    return m;
}

TrainConfig fancy_train_config() {
    TrainConfig cfg;
    cfg.steps = 1234;
    cfg.batch_size = 32;
    cfg.weighting = Weighting::uniform;
    cfg.t_min = 3e-4;
    cfg.adam.lr = 2.5e-3;
    cfg.adam.beta1 = 0.93;
    cfg.adam.beta2 = 0.9991;
    cfg.adam.eps = 1e-9;
    cfg.ema_decay = 0.999;
    cfg.lr_schedule = LrSchedule::cosine;
    cfg.seed = 777;
    return cfg;
}

void check_train_equal(const TrainConfig& a, const TrainConfig& b) {
    CHECK(a.steps == b.steps);
    CHECK(a.batch_size == b.batch_size);
    CHECK(a.weighting == b.weighting);
    CHECK(same_bits(a.t_min, b.t_min));
    CHECK(same_bits(a.adam.lr, b.adam.lr));
    CHECK(same_bits(a.adam.beta1, b.adam.beta1));
    CHECK(same_bits(a.adam.beta2, b.adam.beta2));
    CHECK(same_bits(a.adam.eps, b.adam.eps));
    CHECK(same_bits(a.ema_decay, b.ema_decay));
    CHECK(a.lr_schedule == b.lr_schedule);
    CHECK(a.seed == b.seed);
}

// Rewrite one substring of an already-saved document and park the result next
// to it, for corruption tests.
std::string tampered_copy(const std::string& path, const std::string& from,
                          const std::string& to, const std::string& suffix) {
    std::string text = read_text_file(path);
    const auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, from.size(), to);
    const std::string out = path + suffix;
    std::ofstream(out, std::ios::binary) << text;
    return out;
}

}  // namespace

TEST_CASE("decimal formatting survives a parse round trip bit for bit") {
    std::vector<double> awkward = {0.1,
                                   1.0 / 3.0,
                                   -1e300,
                                   1e-300,
                                   4.9406564584124654e-324,  // smallest denormal
                                   3.14159265358979323846,
                                   0.0,
                                   -0.0,
                                   123456789.123456789,
                                   9007199254740993.0,  // 2^53 + 1 rounds to 2^53
                                   -2.2250738585072014e-308};
    Rng rng = Rng(11).stream("format");
    for (int i = 0; i < 1000; ++i) {
        awkward.push_back(rng.normal() * std::exp(rng.uniform(-200.0, 200.0)));
    }
    for (double v : awkward) {
        const std::string text = format_double(v);
        const double back = std::strtod(text.c_str(), nullptr);
        CHECK(same_bits(v, back));
    }
    // the sign of zero is part of the contract
    CHECK(format_double(-0.0) == "-0");
    CHECK(format_double(0.0) == "0");
}

TEST_CASE("atomic writes create parents, land complete, and leave no temp file") {
    const fs::path root = scratch_dir() / "nested";
    fs::remove_all(root);
    const std::string path = (root / "a" / "b" / "out.txt").string();

    write_file_atomic(path, "first\n");
    CHECK(read_text_file(path) == "first\n");
    CHECK_FALSE(fs::exists(path + ".tmp"));

    write_file_atomic(path, "second version\n");
    CHECK(read_text_file(path) == "second version\n");
    CHECK_FALSE(fs::exists(path + ".tmp"));

    CHECK_THROWS_AS(read_text_file((root / "missing.txt").string()), std::exception);
}

TEST_CASE("ldm checkpoint round trip restores every field bit for bit") {
    const LadmModel model = make_ldm(42);
    const TrainConfig train = fancy_train_config();
    const std::string path = scratch("ldm.json");
    save_ldm_checkpoint(path, model, train);

    const LdmCheckpoint back = load_ldm_checkpoint(path);
    CHECK(back.model.score.spec == model.score.spec);
    CHECK(back.model.score.params.layout == model.score.params.layout);
    CHECK(same_bits(back.model.score.params.values, model.score.params.values));
    CHECK(back.model.schedule.kind == model.schedule.kind);
    CHECK(same_bits(back.model.schedule.beta_min, model.schedule.beta_min));
    CHECK(same_bits(back.model.schedule.beta_max, model.schedule.beta_max));
    CHECK(back.model.autoencoder.kind() == Autoencoder::Kind::identity);
    CHECK(back.model.autoencoder.latent_dim() == 2);
    CHECK(back.model.domain_tag == "alpha");
    CHECK(back.model.condition_dim == 0);
    check_train_equal(back.train, train);

    // saving the same state again produces the same bytes
    const std::string again = scratch("ldm-again.json");
    save_ldm_checkpoint(again, model, train);
    CHECK(read_text_file(again) == read_text_file(path));

    // and saving the loaded copy reproduces the document exactly
    const std::string resaved = scratch("ldm-resaved.json");
    save_ldm_checkpoint(resaved, back.model, back.train);
    CHECK(read_text_file(resaved) == read_text_file(path));
}

TEST_CASE("ldm checkpoint carries an affine autoencoder exactly") {
    const LadmModel model = make_ldm(43, /*affine_ae=*/true);
    const std::string path = scratch("ldm-affine.json");
    save_ldm_checkpoint(path, model, fancy_train_config());

    const LdmCheckpoint back = load_ldm_checkpoint(path);
    CHECK(back.model.autoencoder.kind() == Autoencoder::Kind::affine);
    CHECK(same_bits(Vec(back.model.autoencoder.matrix()), Vec(model.autoencoder.matrix())));
    CHECK(same_bits(back.model.autoencoder.offset(), model.autoencoder.offset()));
    // encode/decode behave identically after the round trip
    const Vec x = {0.3, -1.7};
    CHECK(same_bits(back.model.autoencoder.encode(x), model.autoencoder.encode(x)));
}

TEST_CASE("ddbm checkpoint round trip restores the bridge exactly") {
    BridgeNet net;
    net.score.spec = small_spec(2, /*condition_dim=*/2);
    Rng init = Rng(50).stream("init");
    net.score.params = init_params(net.score.spec, init);
    Rng noise = Rng(50).stream("values");
    for (double& v : net.score.params.values) v = 0.21 * noise.normal() - 0.05;
    net.sigma_c = 0.73010159265;
    net.t_min = 2e-3;

    TrainConfig train = fancy_train_config();
    train.seed = 909;
    const std::string path = scratch("ddbm.json");
    save_ddbm_checkpoint(path, net, train);

    const DdbmCheckpoint back = load_ddbm_checkpoint(path);
    CHECK(back.net.score.spec == net.score.spec);
    CHECK(same_bits(back.net.score.params.values, net.score.params.values));
    CHECK(same_bits(back.net.sigma_c, net.sigma_c));
    CHECK(same_bits(back.net.t_min, net.t_min));
    check_train_equal(back.train, train);

    const std::string again = scratch("ddbm-again.json");
    save_ddbm_checkpoint(again, net, train);
    CHECK(read_text_file(again) == read_text_file(path));
}

TEST_CASE("checkpoint kind is readable without loading tensors") {
    save_ldm_checkpoint(scratch("kind-ldm.json"), make_ldm(44), TrainConfig{});
    CHECK(checkpoint_kind(scratch("kind-ldm.json")) == "ldm");

    BridgeNet net;
    net.score.spec = small_spec(2, 2);
    Rng init = Rng(51).stream("init");
    net.score.params = init_params(net.score.spec, init);
    save_ddbm_checkpoint(scratch("kind-ddbm.json"), net, TrainConfig{});
    CHECK(checkpoint_kind(scratch("kind-ddbm.json")) == "ddbm");

    write_file_atomic(scratch("kind-none.json"), "{\"other\": 1}\n");
    CHECK(thrown_message([] { checkpoint_kind(scratch("kind-none.json")); })
              .find("missing checkpoint kind") != std::string::npos);

    write_file_atomic(scratch("kind-garbage.json"), "not json at all");
    CHECK(thrown_message([] { checkpoint_kind(scratch("kind-garbage.json")); })
              .find("not valid JSON") != std::string::npos);
}

TEST_CASE("mismatched checkpoint kinds are refused") {
    const std::string ldm_path = scratch("cross-ldm.json");
    save_ldm_checkpoint(ldm_path, make_ldm(45), TrainConfig{});

    BridgeNet net;
    net.score.spec = small_spec(2, 2);
    Rng init = Rng(52).stream("init");
    net.score.params = init_params(net.score.spec, init);
    const std::string ddbm_path = scratch("cross-ddbm.json");
    save_ddbm_checkpoint(ddbm_path, net, TrainConfig{});

    CHECK(thrown_message([&] { load_ddbm_checkpoint(ldm_path); }).find("not a ddbm checkpoint") !=
          std::string::npos);
    CHECK(thrown_message([&] { load_ldm_checkpoint(ddbm_path); }).find("not an ldm checkpoint") !=
          std::string::npos);
}

TEST_CASE("corrupted checkpoints are rejected with a reason") {
    const std::string path = scratch("corrupt-base.json");
    const LadmModel model = make_ldm(46);
    save_ldm_checkpoint(path, model, TrainConfig{});

    SUBCASE("non-numeric parameter text") {
        const std::string bad = tampered_copy(path, "\"values\": \"", "\"values\": \"abc ", ".1");
        CHECK(thrown_message([&] { load_ldm_checkpoint(bad); }).find("malformed number") !=
              std::string::npos);
    }
    SUBCASE("non-finite parameter value") {
        // swap the first stored number for nan without changing the count
        std::string text = read_text_file(path);
        const std::string key = "\"values\": \"";
        const auto start = text.find(key) + key.size();
        REQUIRE(start != std::string::npos + key.size());
        const auto space = text.find(' ', start);
        REQUIRE(space != std::string::npos);
        text.replace(start, space - start, "nan");
        const std::string bad = path + ".2";
        std::ofstream(bad, std::ios::binary) << text;
        CHECK(thrown_message([&] { load_ldm_checkpoint(bad); }).find("non-finite") !=
              std::string::npos);
    }
    SUBCASE("parameter count that disagrees with the layout") {
        // append one extra number to the blob
        const std::string bad =
            tampered_copy(path, "\"values\": \"", "\"values\": \"0.5 ", ".3");
        CHECK_THROWS_AS(load_ldm_checkpoint(bad), std::exception);
    }
    SUBCASE("layout that disagrees with the network spec") {
        const std::string bad = tampered_copy(path, "\"rows\": 5", "\"rows\": 6", ".4");
        CHECK(thrown_message([&] { load_ldm_checkpoint(bad); })
                  .find("layout does not match") != std::string::npos);
    }
    SUBCASE("missing section") {
        const std::string bad = tampered_copy(path, "\"schedule\"", "\"shedule\"", ".5");
        const std::string msg = thrown_message([&] { load_ldm_checkpoint(bad); });
        CHECK(msg.find(bad) != std::string::npos);  // names the offending file
    }
    SUBCASE("truncated document") {
        std::string text = read_text_file(path);
        text.resize(text.size() / 2);
        const std::string bad = path + ".6";
        std::ofstream(bad, std::ios::binary) << text;
        CHECK(thrown_message([&] { load_ldm_checkpoint(bad); }).find("not valid JSON") !=
              std::string::npos);
    }
}

TEST_CASE("batch csv round trips unlabeled points at full precision") {
    Batch batch;
    batch.domain_tag = "src";
    Rng rng = Rng(60).stream("points");
    for (int i = 0; i < 7; ++i) batch.points.push_back(rng.normal_vec(3));

    const std::string path = scratch("batch-src.csv");
    save_batch_csv(path, batch);

    const std::string text = read_text_file(path);
    CHECK(text.rfind("x0,x1,x2\n", 0) == 0);

    const Batch back = load_batch_csv(path);
    CHECK(back.domain_tag == "batch-src");  // stem of the file name
    REQUIRE(back.size() == batch.size());
    CHECK(back.labels.empty());
    for (int i = 0; i < batch.size(); ++i) {
        CHECK(same_bits(back.points[static_cast<std::size_t>(i)],
                        batch.points[static_cast<std::size_t>(i)]));
    }

    const Batch tagged = load_batch_csv(path, "override");
    CHECK(tagged.domain_tag == "override");
}

TEST_CASE("batch csv round trips labels") {
    Batch batch;
    batch.domain_tag = "labelled";
    Rng rng = Rng(61).stream("points");
    for (int i = 0; i < 9; ++i) {
        batch.points.push_back(rng.normal_vec(2));
        batch.labels.push_back(i % 3);
    }
    const std::string path = scratch("batch-labelled.csv");
    save_batch_csv(path, batch);
    CHECK(read_text_file(path).rfind("x0,x1,label\n", 0) == 0);

    const Batch back = load_batch_csv(path);
    CHECK(back.labels == batch.labels);
    for (int i = 0; i < batch.size(); ++i) {
        CHECK(same_bits(back.points[static_cast<std::size_t>(i)],
                        batch.points[static_cast<std::size_t>(i)]));
    }
}

TEST_CASE("malformed batch csv files are refused") {
    CHECK_THROWS_AS(save_batch_csv(scratch("batch-empty.csv"), Batch{}), std::invalid_argument);

    write_file_atomic(scratch("bad-count.csv"), "x0,x1\n1.0,2.0,3.0\n");
    CHECK(thrown_message([] { load_batch_csv(scratch("bad-count.csv")); }).find("expected") !=
          std::string::npos);

    write_file_atomic(scratch("bad-value.csv"), "x0,x1\n1.0,foo\n");
    CHECK(thrown_message([] { load_batch_csv(scratch("bad-value.csv")); })
              .find("malformed value") != std::string::npos);

    write_file_atomic(scratch("bad-label.csv"), "x0,label\n1.0,zero\n");
    CHECK(thrown_message([] { load_batch_csv(scratch("bad-label.csv")); })
              .find("malformed label") != std::string::npos);

    write_file_atomic(scratch("bad-header.csv"), "a,b\n1.0,2.0\n");
    CHECK(thrown_message([] { load_batch_csv(scratch("bad-header.csv")); })
              .find("unexpected header column") != std::string::npos);

    write_file_atomic(scratch("no-rows.csv"), "x0,x1\n");
    CHECK(thrown_message([] { load_batch_csv(scratch("no-rows.csv")); }).find("no data rows") !=
          std::string::npos);

    write_file_atomic(scratch("empty.csv"), "");
    CHECK_THROWS_AS(load_batch_csv(scratch("empty.csv")), std::exception);
}

TEST_CASE("trajectory csv lays out time then coordinates") {
    Trajectory traj;
    traj.times = {0.0, 0.5, 1.0};
    traj.points = {{1.5, -2.0}, {0.25, 1.0 / 3.0}, {0.0, 0.125}};
    const std::string path = scratch("traj.csv");
    save_trajectory_csv(path, traj);

    const std::string text = read_text_file(path);
    CHECK(text == "t,x0,x1\n"
                  "0,1.5,-2\n"
                  "0.5,0.25," + format_double(1.0 / 3.0) + "\n"
                  "1,0,0.125\n");

    Trajectory ragged;
    ragged.times = {0.0, 1.0};
    ragged.points = {{1.0, 2.0}};
    CHECK_THROWS_AS(save_trajectory_csv(scratch("traj-bad.csv"), ragged), std::invalid_argument);
}

TEST_CASE("loss csv carries one row per step") {
    save_losses_csv(scratch("losses.csv"), {0.5, 0.25});
    CHECK(read_text_file(scratch("losses.csv")) == "step,loss\n0,0.5\n1,0.25\n");
}

TEST_CASE("mixture manifest round trips and counts couplings") {
    MixtureManifest m;
    m.paired.push_back({"pairs/src.csv", "pairs/tgt.csv", 10});
    m.paired.push_back({"pairs/src2.csv", "pairs/tgt2.csv", 5});
    m.unpaired.push_back({"solo/tgt.csv", 40});
    m.transfer_ode.n_steps = 77;
    m.transfer_ode.method = OdeMethod::heun;
    m.transfer_ode.direction = Direction::reverse;
    m.transfer_ode.t_min = 2e-4;

    const std::string path = scratch("mixture.json");
    save_mixture_manifest(path, m);
    const MixtureManifest back = load_mixture_manifest(path);

    REQUIRE(back.paired.size() == 2);
    REQUIRE(back.unpaired.size() == 1);
    CHECK(back.paired[0].source_csv == "pairs/src.csv");
    CHECK(back.paired[0].target_csv == "pairs/tgt.csv");
    CHECK(back.paired[0].count == 10);
    CHECK(back.paired[1].count == 5);
    CHECK(back.unpaired[0].csv == "solo/tgt.csv");
    CHECK(back.unpaired[0].count == 40);
    CHECK(back.transfer_ode.n_steps == 77);
    CHECK(back.transfer_ode.method == OdeMethod::heun);
    CHECK(back.transfer_ode.direction == Direction::reverse);
    CHECK(same_bits(back.transfer_ode.t_min, 2e-4));
    CHECK(back.paired_count() == 15);
    CHECK(back.unpaired_count() == 40);

    const std::string again = scratch("mixture-again.json");
    save_mixture_manifest(again, back);
    CHECK(read_text_file(again) == read_text_file(path));
}

TEST_CASE("pipeline manifest round trips with sorted source tags") {
    PipelineManifest m;
    m.source_checkpoints["b"] = "ck/b.json";
    m.source_checkpoints["a"] = "ck/a.json";
    m.transfer_ode.n_steps = 120;
    m.transfer_ode.direction = Direction::forward;
    m.mixture_manifest = "mix.json";
    m.target_checkpoint = "ck/target.json";

    const std::string path = scratch("pipeline.json");
    save_pipeline_manifest(path, m);
    const PipelineManifest back = load_pipeline_manifest(path);

    CHECK(back.source_checkpoints == m.source_checkpoints);
    CHECK(back.transfer_ode.n_steps == 120);
    CHECK(back.mixture_manifest == "mix.json");
    CHECK(back.target_checkpoint == "ck/target.json");

    const std::string again = scratch("pipeline-again.json");
    save_pipeline_manifest(again, back);
    CHECK(read_text_file(again) == read_text_file(path));

    // a manifest of the other flavour is refused by name
    MixtureManifest mix;
    mix.unpaired.push_back({"solo.csv", 3});
    const std::string mix_path = scratch("pipeline-crosscheck-mix.json");
    save_mixture_manifest(mix_path, mix);
    CHECK(thrown_message([&] { load_mixture_manifest(path); }).find("not a mixture manifest") !=
          std::string::npos);
    CHECK(thrown_message([&] { load_pipeline_manifest(mix_path); })
              .find("not a pipeline manifest") != std::string::npos);
}
