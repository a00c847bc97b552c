#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "ladb/adam.hpp"
#include "ladb/mlp.hpp"
#include "ladb/param_vector.hpp"
#include "ladb/rng.hpp"
#include "ladb/vec.hpp"
#include "test_util.hpp"

using namespace ladb;

TEST_CASE("vec helpers") {
    Vec a{1.0, 2.0, 3.0};
    Vec b{4.0, -1.0, 0.5};
    CHECK(dot(a, b) == doctest::Approx(1.0 * 4.0 - 2.0 + 1.5));
    CHECK(squared_norm(a) == doctest::Approx(14.0));
    CHECK(norm(Vec{3.0, 4.0}) == doctest::Approx(5.0));
    CHECK(squared_distance(a, b) == doctest::Approx(9.0 + 9.0 + 6.25));

    Vec y = a;
    axpy(y, 2.0, b);
    CHECK(y[0] == doctest::Approx(9.0));
    CHECK(y[1] == doctest::Approx(0.0));
    CHECK(y[2] == doctest::Approx(4.0));

    CHECK(all_finite(a));
    Vec bad{1.0, std::nan("")};
    CHECK_FALSE(all_finite(bad));
    CHECK_THROWS_AS(dot(a, Vec{1.0}), std::invalid_argument);
}

TEST_CASE("rng determinism and stream independence") {
    Rng r1(42);
    Rng r2(42);
    for (int i = 0; i < 16; ++i) CHECK(r1.next_u64() == r2.next_u64());

    Rng parent(7);
    const double before = Rng(7).uniform();
    Rng sa = parent.stream("alpha");
    Rng sb = parent.stream("beta");
    Rng s0 = parent.stream(std::uint64_t{0});
    Rng s1 = parent.stream(std::uint64_t{1});
    // deriving streams must not consume from the parent
    CHECK(parent.uniform() == before);
    // distinct derivations produce distinct sequences
    std::set<std::uint64_t> firsts{sa.next_u64(), sb.next_u64(), s0.next_u64(), s1.next_u64(),
                                   Rng(7).next_u64()};
    CHECK(firsts.size() == 5);

    // different seeds diverge
    CHECK(Rng(1).next_u64() != Rng(2).next_u64());
}

TEST_CASE("rng uniform and normal moments") {
    Rng rng(1234);
    const int n = 20000;
    std::vector<double> us(n), zs(n);
    for (int i = 0; i < n; ++i) us[i] = rng.uniform();
    for (int i = 0; i < n; ++i) zs[i] = rng.normal();

    for (double u : us) {
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(test_util::sample_mean(us) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(test_util::sample_variance(us) == doctest::Approx(1.0 / 12.0).epsilon(0.05));
    CHECK(std::abs(test_util::sample_mean(zs)) < 0.03);
    CHECK(test_util::sample_variance(zs) == doctest::Approx(1.0).epsilon(0.05));

    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform(-2.0, 5.0);
        CHECK(x >= -2.0);
        CHECK(x < 5.0);
    }
}

TEST_CASE("rng index is uniform and permutation is valid") {
    Rng rng(99);
    const std::size_t k = 7;
    const int n = 70000;
    std::vector<double> counts(k, 0.0);
    for (int i = 0; i < n; ++i) counts[rng.index(k)] += 1.0;
    const double expect = static_cast<double>(n) / static_cast<double>(k);
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < test_util::chi2_critical(static_cast<double>(k - 1), test_util::kZ99));

    auto perm = rng.permutation(50);
    std::set<std::size_t> seen(perm.begin(), perm.end());
    CHECK(seen.size() == 50);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == 49);

    CHECK_THROWS_AS(rng.index(0), std::invalid_argument);
}

TEST_CASE("param vector layout and blocks") {
    std::vector<TensorShape> layout{{"W0", 2, 3}, {"b0", 2, 1}};
    ParamVector p = ParamVector::zeros(layout);
    CHECK(p.total() == 8);
    CHECK(p.values.size() == 8);
    auto w = p.block(0);
    CHECK(w.size() == 6);
    w[5] = 3.5;
    CHECK(p.values[5] == 3.5);
    auto b = p.block(1);
    CHECK(b.size() == 2);
    b[0] = -1.0;
    CHECK(p.values[6] == -1.0);

    ParamVector bad = p;
    bad.values.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    p.values[3] = std::numeric_limits<double>::infinity();
    CHECK_FALSE(p.finite());
}

TEST_CASE("time embedding doubles frequency per pair") {
    Vec emb(4);
    time_embedding(0.0, 4, emb);
    CHECK(emb[0] == doctest::Approx(0.0));
    CHECK(emb[1] == doctest::Approx(1.0));
    CHECK(emb[2] == doctest::Approx(0.0));
    CHECK(emb[3] == doctest::Approx(1.0));

    const double t = 0.37;
    Vec e6(6);
    time_embedding(t, 6, e6);
    const double pi = std::acos(-1.0);
    CHECK(e6[0] == doctest::Approx(std::sin(pi * t)));
    CHECK(e6[1] == doctest::Approx(std::cos(pi * t)));
    CHECK(e6[2] == doctest::Approx(std::sin(2.0 * pi * t)));
    CHECK(e6[3] == doctest::Approx(std::cos(2.0 * pi * t)));
    CHECK(e6[4] == doctest::Approx(std::sin(4.0 * pi * t)));
    CHECK(e6[5] == doctest::Approx(std::cos(4.0 * pi * t)));
}

TEST_CASE("mlp spec validation and layout") {
    MlpSpec spec;
    spec.input_dim = 2;
    spec.hidden_dims = {5, 3};
    spec.output_dim = 2;
    spec.time_embedding_dim = 4;
    CHECK(spec.first_layer_width() == 6);
    auto layout = spec.layout();
    REQUIRE(layout.size() == 6);
    CHECK(layout[0].rows == 5);
    CHECK(layout[0].cols == 6);
    CHECK(layout[2].rows == 3);
    CHECK(layout[2].cols == 5);
    CHECK(layout[4].rows == 2);
    CHECK(layout[4].cols == 3);
    CHECK(layout[5].rows == 2);
    CHECK(layout[5].cols == 1);

    MlpSpec odd = spec;
    odd.time_embedding_dim = 3;
    CHECK_THROWS_AS(odd.validate(), std::invalid_argument);
    MlpSpec neg = spec;
    neg.input_dim = 0;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
}

TEST_CASE("mlp forward matches hand-computed tiny network") {
    MlpSpec spec;
    spec.input_dim = 1;
    spec.hidden_dims = {2};
    spec.output_dim = 1;
    spec.activation = Activation::tanh;
    spec.time_embedding_dim = 2;

    ParamVector p = ParamVector::zeros(spec.layout());
    // W0 (2x3), input ordering is [x, sin, cos]
    p.values = {1.0, 0.0, -1.0,  // row 0
                0.5, 2.0, 0.0,   // row 1
                0.5, -1.0,       // b0
                2.0, -3.0,       // W1 (1x2)
                0.25};           // b1

    // at t = 0 the embedding is exactly [0, 1]
    const Vec x{2.0};
    const Vec out = mlp_forward(p, spec, x, 0.0, nullptr);
    REQUIRE(out.size() == 1);
    const double z0 = 1.0 * 2.0 + 0.0 * 0.0 + (-1.0) * 1.0 + 0.5;  // 1.5
    const double z1 = 0.5 * 2.0 + 2.0 * 0.0 + 0.0 * 1.0 - 1.0;     // 0.0
    const double want = 2.0 * std::tanh(z0) - 3.0 * std::tanh(z1) + 0.25;
    CHECK(out[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("fresh networks output exactly zero") {
    MlpSpec spec;
    spec.input_dim = 3;
    spec.hidden_dims = {16, 16};
    spec.output_dim = 3;
    spec.activation = Activation::silu;
    Rng rng(5);
    ParamVector p = init_params(spec, rng);
    // hidden weights are populated, the final layer is left at zero
    CHECK(norm(Vec(p.values.begin(), p.values.begin() + 16 * spec.first_layer_width())) > 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        Vec x = rng.normal_vec(3);
        Vec out = mlp_forward(p, spec, x, rng.uniform(), nullptr);
        for (double v : out) CHECK(v == 0.0);
    }
}

namespace {

double inner_loss(const ParamVector& p, const MlpSpec& spec, const Vec& x, double t,
                  const Vec* cond, const Vec& upstream) {
    Vec out = mlp_forward(p, spec, x, t, cond);
    return dot(upstream, out);
}

void check_gradient(const MlpSpec& spec, std::uint64_t seed, double tol) {
    Rng rng(seed);
    ParamVector p = init_params(spec, rng);
    // perturb the zero final layer so its gradient path is generic
    for (std::size_t i = p.total() - (spec.hidden_dims.back() + 1) * spec.output_dim;
         i < p.total(); ++i) {
        p.values[i] = 0.3 * rng.normal();
    }
    const Vec x = rng.normal_vec(spec.input_dim);
    const double t = rng.uniform(0.1, 0.9);
    Vec cond_store;
    const Vec* cond = nullptr;
    if (spec.condition_dim > 0) {
        cond_store = rng.normal_vec(spec.condition_dim);
        cond = &cond_store;
    }
    const Vec upstream = rng.normal_vec(spec.output_dim);

    ParamVector grad = mlp_backward(p, spec, x, t, cond, upstream);
    Vec fd = test_util::fd_gradient(
        [&](const ParamVector& q) { return inner_loss(q, spec, x, t, cond, upstream); }, p);

    double scale = 0.0;
    for (double g : grad.values) scale = std::max(scale, std::abs(g));
    scale = std::max(scale, 1.0);
    CHECK(test_util::max_abs_diff(grad.values, fd) / scale < tol);
}

}  // namespace

TEST_CASE("mlp backward matches finite differences") {
    MlpSpec tanh_spec;
    tanh_spec.input_dim = 2;
    tanh_spec.hidden_dims = {8, 6};
    tanh_spec.output_dim = 2;
    tanh_spec.activation = Activation::tanh;
    tanh_spec.time_embedding_dim = 4;
    check_gradient(tanh_spec, 11, 1e-6);

    MlpSpec silu_spec = tanh_spec;
    silu_spec.activation = Activation::silu;
    check_gradient(silu_spec, 12, 1e-6);

    MlpSpec cond_spec = silu_spec;
    cond_spec.condition_dim = 3;
    check_gradient(cond_spec, 13, 1e-6);
}

TEST_CASE("mlp backward accumulates into the gradient buffer") {
    MlpSpec spec;
    spec.input_dim = 2;
    spec.hidden_dims = {4};
    spec.output_dim = 2;
    Rng rng(21);
    ParamVector p = init_params(spec, rng);
    const Vec x = rng.normal_vec(2);
    const Vec upstream{1.0, -2.0};

    ParamVector once = mlp_backward(p, spec, x, 0.5, nullptr, upstream);
    ParamVector twice = ParamVector::zeros_like(p);
    MlpWorkspace ws;
    mlp_backward(p, spec, x, 0.5, nullptr, upstream, twice, ws);
    mlp_backward(p, spec, x, 0.5, nullptr, upstream, twice, ws);
    for (std::size_t i = 0; i < p.total(); ++i) {
        CHECK(twice.values[i] == doctest::Approx(2.0 * once.values[i]).epsilon(1e-13));
    }
}

TEST_CASE("mlp rejects malformed inputs") {
    MlpSpec spec;
    spec.input_dim = 2;
    spec.hidden_dims = {4};
    spec.output_dim = 2;
    Rng rng(3);
    ParamVector p = init_params(spec, rng);

    CHECK_THROWS_AS(mlp_forward(p, spec, Vec{1.0}, 0.5, nullptr), std::invalid_argument);
    CHECK_THROWS_AS(mlp_forward(p, spec, Vec{1.0, std::nan("")}, 0.5, nullptr),
                    std::invalid_argument);
    CHECK_THROWS_AS(mlp_forward(p, spec, Vec{1.0, 2.0}, std::nan(""), nullptr),
                    std::invalid_argument);
    Vec cond{1.0};
    CHECK_THROWS_AS(mlp_forward(p, spec, Vec{1.0, 2.0}, 0.5, &cond), std::invalid_argument);

    MlpSpec cond_spec = spec;
    cond_spec.condition_dim = 1;
    Rng rng2(4);
    ParamVector pc = init_params(cond_spec, rng2);
    CHECK_THROWS_AS(mlp_forward(pc, cond_spec, Vec{1.0, 2.0}, 0.5, nullptr),
                    std::invalid_argument);
    // params from one spec rejected under another
    CHECK_THROWS_AS(mlp_forward(p, cond_spec, Vec{1.0, 2.0}, 0.5, &cond), std::invalid_argument);
}

TEST_CASE("adam first step moves each weight by lr times gradient sign") {
    std::vector<TensorShape> layout{{"w", 4, 1}};
    ParamVector p = ParamVector::zeros(layout);
    p.values = {1.0, -2.0, 0.5, 3.0};
    ParamVector g = ParamVector::zeros(layout);
    g.values = {0.2, -0.7, 1e-3, 0.0};

    AdamConfig cfg;
    cfg.lr = 0.01;
    AdamState state(p.total());
    const ParamVector before = p;
    CHECK(adam_step(p, g, state, cfg));
    CHECK(state.step == 1);
    for (std::size_t i = 0; i < p.total(); ++i) {
        // from zero state the bias-corrected update is lr * g / (|g| + eps)
        const double want = before.values[i] - cfg.lr * g.values[i] / (std::abs(g.values[i]) + cfg.eps);
        CHECK(p.values[i] == doctest::Approx(want).epsilon(1e-14));
    }
    // zero gradient leaves the weight untouched
    CHECK(p.values[3] == before.values[3]);
}

TEST_CASE("adam skips non-finite gradients and flags them") {
    std::vector<TensorShape> layout{{"w", 2, 1}};
    ParamVector p = ParamVector::zeros(layout);
    p.values = {1.0, 2.0};
    ParamVector g = ParamVector::zeros(layout);
    g.values = {0.1, std::numeric_limits<double>::quiet_NaN()};

    AdamConfig cfg;
    AdamState state(2);
    const Vec before = p.values;
    CHECK_FALSE(adam_step(p, g, state, cfg));
    CHECK(state.step == 0);
    CHECK(state.skipped == 1);
    CHECK(p.values == before);
    CHECK(state.m == Vec(2, 0.0));

    g.values[1] = -0.3;
    CHECK(adam_step(p, g, state, cfg));
    CHECK(state.step == 1);
    CHECK(state.skipped == 1);
}

TEST_CASE("adam config validation") {
    AdamConfig cfg;
    cfg.lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = AdamConfig{};
    cfg.beta1 = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = AdamConfig{};
    cfg.beta2 = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("adam converges on a quadratic bowl") {
    std::vector<TensorShape> layout{{"w", 3, 1}};
    ParamVector p = ParamVector::zeros(layout);
    p.values = {2.0, -1.5, 0.7};
    const Vec target{-0.3, 0.9, 0.1};
    AdamConfig cfg;
    cfg.lr = 0.05;
    AdamState state(3);
    ParamVector g = ParamVector::zeros(layout);
    for (int it = 0; it < 2000; ++it) {
        for (int i = 0; i < 3; ++i) g.values[i] = 2.0 * (p.values[i] - target[i]);
        adam_step(p, g, state, cfg);
    }
    for (int i = 0; i < 3; ++i) CHECK(p.values[i] == doctest::Approx(target[i]).epsilon(1e-4));
}
