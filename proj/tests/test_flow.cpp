// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "flowpref/common/errors.hpp"
#include "flowpref/flow/condition.hpp"
#include "flowpref/flow/flow_matching.hpp"
#include "flowpref/flow/model_io.hpp"
#include "flowpref/flow/sampler.hpp"
#include "flowpref/flow/toy_task.hpp"
#include "flowpref/flow/velocity_model.hpp"
#include "flowpref/nn/grad_check.hpp"
#include "support.hpp"

using namespace flowpref;
using namespace flowpref::flow;
using doctest::Approx;

namespace {

/// Small trained model reused by the sampling tests.
const PretrainResult& trained_d2() {
    static const PretrainResult result = [] {
        ToyTaskSpec spec{.dim = 2, .num_classes = 2, .components_per_class = 2, .seed = 3};
        PretrainConfig cfg;
        cfg.steps = 5000;
        cfg.hidden = {32, 32};
        cfg.seed = 5;
        return pretrain(ToyTask::generate(spec), cfg);
    }();
    return result;
}

}  // namespace

TEST_SUITE("toy_task") {
    TEST_CASE("generated mixtures satisfy their invariants") {
        const auto task = ToyTask::generate({});
        CHECK(task.dim() == 8);
        CHECK(task.num_classes() == 4);
        for (std::size_t k = 0; k < 4; ++k) {
            double w = 0.0;
            for (const auto& c : task.mixture(k).components) {
                CHECK(c.scale > 0.0);
                w += c.weight;
            }
            CHECK(w == Approx(1.0).epsilon(1e-12));
            double r2 = 0.0;
            for (double v : task.centroid(k)) {
                r2 += v * v;
            }
            CHECK(std::sqrt(r2) <= 3.0 + 1.0 + 1e-9);
        }
    }

    TEST_CASE("invalid mixtures are rejected") {
        MixtureComponent c{.mean = {0.0, 0.0}, .scale = 1.0, .weight = 0.6};
        CHECK_THROWS_AS(ToyTask(2, {ClassMixture{{c}}}), InputError);
        c.weight = 1.0;
        c.scale = -1.0;
        CHECK_THROWS_AS(ToyTask(2, {ClassMixture{{c}}}), InputError);
        c.scale = 1.0;
        CHECK_THROWS_AS(ToyTask(3, {ClassMixture{{c}}}), InputError);
        CHECK_NOTHROW(ToyTask(2, {ClassMixture{{c}}}));
    }

    TEST_CASE("log density matches a direct mixture evaluation") {
        const auto task = ToyTask::generate({.dim = 3, .num_classes = 2});
        Rng rng(1);
        for (int i = 0; i < 50; ++i) {
            const auto x = testing::random_vec(rng, 3, 2.0);
            const std::size_t k = static_cast<std::size_t>(i % 2);
            CHECK(task.log_density(k, x) == Approx(testing::mixture_log_density(task, k, x)).epsilon(1e-10));
        }
    }
}

TEST_SUITE("condition") {
    TEST_CASE("embedding is one-hot with a separate null slot") {
        const auto e = condition_embedding({.class_id = 2}, 4);
        CHECK(e == Vec{0, 0, 1, 0, 0});
        const auto n = condition_embedding({.class_id = 2, .drop_flag = true}, 4);
        CHECK(n == null_embedding(4));
        CHECK(n == Vec{0, 0, 0, 0, 1});
        CHECK_THROWS_AS(condition_embedding({.class_id = 4}, 4), InputError);
    }

    TEST_CASE("prompt i depends only on the seed and i") {
        const auto a = draw_conditions(4, 10, 0.5, 9);
        const auto b = draw_conditions(4, 25, 0.5, 9);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i] == b[i]);
            CHECK(a[i].class_id < 4);
            CHECK_FALSE(a[i].drop_flag);
        }
        std::size_t with_text = 0;
        for (const auto& c : draw_conditions(4, 2000, 0.5, 1)) {
            with_text += c.text_present ? 1 : 0;
        }
        CHECK(with_text > 900);
        CHECK(with_text < 1100);
    }
}

TEST_SUITE("flow_matching") {
    TEST_CASE("interpolate endpoints and a worked value") {
        const Vec a0{1.0, 0.0}, eps{0.0, 1.0};
        CHECK(interpolate(a0, eps, 0.0).a_t == a0);
        CHECK(interpolate(a0, eps, 1.0).a_t == eps);
        const auto s = interpolate(a0, eps, 0.25);
        CHECK(s.a_t == Vec{0.75, 0.25});
        CHECK(s.v_target == Vec{-1.0, 1.0});
        CHECK(s.t == 0.25);
    }

    TEST_CASE("interpolate endpoints are exact for arbitrary vectors") {
        Rng rng(2);
        for (int i = 0; i < 100; ++i) {
            const auto a0 = testing::random_vec(rng, 5, 3.0);
            const auto eps = testing::random_vec(rng, 5);
            CHECK(interpolate(a0, eps, 0.0).a_t == a0);
            CHECK(interpolate(a0, eps, 1.0).a_t == eps);
        }
    }

    TEST_CASE("interpolate rejects bad input") {
        CHECK_THROWS_AS(interpolate(Vec{1.0}, Vec{0.0}, 1.5), InputError);
        CHECK_THROWS_AS(interpolate(Vec{1.0}, Vec{0.0}, -0.01), InputError);
        CHECK_THROWS_AS(interpolate(Vec{1.0}, Vec{0.0, 1.0}, 0.5), InputError);
    }

    TEST_CASE("fm_loss is zero when outputs equal the targets") {
        const VelocityModel zero(2, 2, 0.1, nn::Mlp({2 + 1 + 3, 4, 2}));
        std::vector<FlowExample> batch;
        batch.push_back({interpolate(Vec{0.3, -1.0}, Vec{0.3, -1.0}, 0.4), {.class_id = 1}});
        batch.push_back({interpolate(Vec{2.0, 0.5}, Vec{2.0, 0.5}, 0.9), {.class_id = 0}});
        CHECK(fm_loss(zero, batch) == 0.0);
    }

    TEST_CASE("fm_loss of the zero model is the mean squared target") {
        const auto task = ToyTask::generate({.dim = 3, .num_classes = 2});
        const VelocityModel zero(3, 2, 0.1, nn::Mlp({3 + 1 + 3, 5, 3}));
        Rng rng(4);
        const auto batch = draw_flow_batch(task, 32, 0.2, rng);
        double expected = 0.0;
        for (const auto& ex : batch) {
            Vec diff(3);
            for (std::size_t i = 0; i < 3; ++i) {
                diff[i] = ex.sample.eps[i] - ex.sample.a0[i];
            }
            expected += testing::dot(diff, diff);
        }
        expected /= 32.0;
        CHECK(fm_loss(zero, batch) == Approx(expected).epsilon(1e-13));
        CHECK_THROWS_AS(fm_loss(zero, std::vector<FlowExample>{}), InputError);
    }

    TEST_CASE("fm_loss gradient matches central differences") {
        const auto task = ToyTask::generate({.dim = 3, .num_classes = 3});
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(300 + seed);
            auto model = testing::random_velocity_model(3, 3, rng, {7});
            const auto batch = draw_flow_batch(task, 6, 0.3, rng);
            Vec grad(model.net().num_params(), 0.0);
            fm_loss(model, batch, grad);
            const Vec p0(model.net().params().begin(), model.net().params().end());
            auto f = [&](std::span<const double> p) {
                VelocityModel probe = model;
                std::copy(p.begin(), p.end(), probe.net().params().begin());
                return fm_loss(probe, batch);
            };
            CHECK(nn::max_relative_error(grad, nn::finite_diff_grad(f, p0)) < 1e-4);
        }
    }

    TEST_CASE("zero pretraining steps return the initialization") {
        const auto task = ToyTask::generate({.dim = 2, .num_classes = 2});
        PretrainConfig cfg;
        cfg.steps = 0;
        cfg.hidden = {8};
        cfg.seed = 12;
        const auto result = pretrain(task, cfg);
        Rng init(derive_seed(12, {0}));
        CHECK(result.model == VelocityModel::initialize(2, 2, {8}, cfg.cond_drop_prob, init));
    }

    TEST_CASE("pretraining halves the zero-model loss and is deterministic") {
        const auto& r = trained_d2();
        CHECK(r.heldout_loss <= 0.5 * r.zero_baseline_loss);
        ToyTaskSpec spec{.dim = 2, .num_classes = 2, .components_per_class = 2, .seed = 3};
        PretrainConfig cfg;
        cfg.steps = 300;
        cfg.hidden = {16};
        const auto a = pretrain(ToyTask::generate(spec), cfg);
        const auto b = pretrain(ToyTask::generate(spec), cfg);
        CHECK(velocity_model_to_string(a.model) == velocity_model_to_string(b.model));
    }

    TEST_CASE("pretraining enforces the loss ceiling") {
        PretrainConfig cfg;
        cfg.steps = 1;
        cfg.hidden = {4};
        cfg.loss_ceiling = 1e-6;
        CHECK_THROWS(pretrain(ToyTask::generate({.dim = 2, .num_classes = 2}), cfg));
    }
}

TEST_SUITE("sampler") {
    TEST_CASE("guidance endpoints are the plain predictions") {
        Rng rng(6);
        const auto model = testing::random_velocity_model(3, 2, rng);
        const auto a = testing::random_vec(rng, 3);
        const Condition cond{.class_id = 1, .text_present = true};
        Condition null = cond;
        null.drop_flag = true;
        CHECK(guided_velocity(model, a, 0.3, cond, 1.0) == model.velocity(a, 0.3, cond));
        CHECK(guided_velocity(model, a, 0.3, cond, 0.0) == model.velocity(a, 0.3, null));
    }

    TEST_CASE("guidance at 4.5 is the affine combination of both passes") {
        Rng rng(7);
        const auto model = testing::random_velocity_model(4, 3, rng);
        const auto a = testing::random_vec(rng, 4);
        const Condition cond{.class_id = 2};
        Condition null = cond;
        null.drop_flag = true;
        const auto uc = model.velocity(a, 0.6, cond);
        const auto un = model.velocity(a, 0.6, null);
        const auto g = guided_velocity(model, a, 0.6, cond, 4.5);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(g[i] == Approx(un[i] + 4.5 * (uc[i] - un[i])).epsilon(1e-13));
        }
    }

    TEST_CASE("guidance is affine in gamma") {
        Rng rng(8);
        const auto model = testing::random_velocity_model(3, 2, rng);
        for (int trial = 0; trial < 50; ++trial) {
            const auto a = testing::random_vec(rng, 3);
            const double g1 = 6.0 * uniform01(rng), g2 = 6.0 * uniform01(rng);
            const Condition cond{.class_id = static_cast<std::size_t>(trial % 2)};
            const auto o1 = guided_velocity(model, a, 0.5, cond, g1);
            const auto o2 = guided_velocity(model, a, 0.5, cond, g2);
            const auto om = guided_velocity(model, a, 0.5, cond, 0.5 * (g1 + g2));
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(o1[i] + o2[i] == Approx(2.0 * om[i]).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("zero field returns the starting noise") {
        const VelocityModel zero(3, 2, 0.1, nn::Mlp({3 + 1 + 3, 4, 3}));
        Rng a(10), b(10);
        const auto out = sample(zero, {.class_id = 0}, 4.5, 50, a);
        CHECK(out == standard_normal(b, 3));
    }

    TEST_CASE("one Euler step on the straight path recovers the data point") {
        const Vec a0{0.5, -1.25, 3.0}, eps{1.0, 0.25, -2.0};
        Vec v(3);
        for (std::size_t i = 0; i < 3; ++i) {
            v[i] = eps[i] - a0[i];
        }
        const auto out = integrate_euler([&](std::span<const double>, double) { return v; }, eps, 1);
        CHECK(out == a0);
    }

    TEST_CASE("Euler on a linear field is exact for the affine oracle and converges") {
        // u(a, t) = a - b for the path a_t = b + t (eps - b): every step size is exact.
        const Vec b{2.0, -1.0};
        auto field = [&](std::span<const double> a, double t) {
            Vec u(2);
            for (std::size_t i = 0; i < 2; ++i) {
                u[i] = t > 0.0 ? (a[i] - b[i]) / t : 0.0;
            }
            return u;
        };
        for (std::size_t n : {1u, 3u, 10u}) {
            const auto out = integrate_euler(field, Vec{0.5, 0.25}, n);
            CHECK(out[0] == Approx(b[0]).epsilon(1e-12));
            CHECK(out[1] == Approx(b[1]).epsilon(1e-12));
        }
    }

    TEST_CASE("integration error shrinks with more steps on a learned field") {
        const auto& model = trained_d2().model;
        const std::vector<std::size_t> steps{2, 5, 10, 25, 50};
        std::vector<double> err(steps.size(), 0.0);
        for (std::size_t s = 0; s < 100; ++s) {
            Rng rng(derive_seed(99, {s}));
            const auto noise = standard_normal(rng, 2);
            const Condition cond{.class_id = s % 2};
            const auto fine = sample_from_noise(model, cond, 1.0, 800, noise);
            for (std::size_t k = 0; k < steps.size(); ++k) {
                err[k] += std::sqrt(testing::sq_norm_diff(sample_from_noise(model, cond, 1.0, steps[k], noise), fine));
            }
        }
        for (std::size_t k = 1; k < steps.size(); ++k) {
            CHECK(err[k] < err[k - 1]);
        }
    }

    TEST_CASE("sampling is reproducible per seed") {
        const auto& model = trained_d2().model;
        Rng a(77), b(77);
        CHECK(sample(model, {.class_id = 1}, 4.5, 20, a) == sample(model, {.class_id = 1}, 4.5, 20, b));
    }

    TEST_CASE("sampler errors") {
        const VelocityModel zero(2, 2, 0.1, nn::Mlp({2 + 1 + 3, 2}));
        Rng rng(1);
        CHECK_THROWS_AS(sample(zero, {.class_id = 0}, 1.0, 0, rng), InputError);
        auto blowup = [](std::span<const double>, double t) {
            return Vec{t < 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0};
        };
        try {
            integrate_euler(blowup, Vec{0.0}, 4);
            FAIL("expected NumericError");
        } catch (const NumericError& e) {
            CHECK(std::string(e.what()).find("step") != std::string::npos);
        }
    }

    TEST_CASE("trained 1-d two-class model reproduces the class means") {
        const ToyTask task(1, {ClassMixture{{{{-2.5}, 0.35, 0.5}, {{-1.5}, 0.35, 0.5}}},
                               ClassMixture{{{{1.5}, 0.35, 0.5}, {{2.5}, 0.35, 0.5}}}});
        PretrainConfig cfg;
        cfg.steps = 10000;
        cfg.batch_size = 256;
        cfg.hidden = {32, 32};
        cfg.seed = 2;
        const auto model = pretrain(task, cfg).model;
        for (std::size_t k = 0; k < 2; ++k) {
            double mean = 0.0;
            for (std::size_t i = 0; i < 2000; ++i) {
                Rng rng(derive_seed(k, {i}));
                mean += sample(model, {.class_id = k}, 1.0, 50, rng)[0];
            }
            mean /= 2000.0;
            CHECK(std::abs(mean - task.centroid(k)[0]) < 0.1);
        }
    }
}

TEST_SUITE("model_io") {
    TEST_CASE("velocity checkpoints round-trip bit-exactly") {
        Rng rng(13);
        const auto model = testing::random_velocity_model(4, 3, rng, {5, 6});
        const auto text = velocity_model_to_string(model);
        const auto back = velocity_model_from_string(text);
        CHECK(back == model);
        CHECK(velocity_model_to_string(back) == text);
        CHECK(checkpoint_id(back) == checkpoint_id(model));
        testing::TempDir dir("model");
        save_velocity_model(dir.file("m.txt"), model);
        CHECK(load_velocity_model(dir.file("m.txt")) == model);
    }

    TEST_CASE("corrupt headers are parse errors") {
        Rng rng(14);
        const auto model = testing::random_velocity_model(2, 2, rng);
        auto text = velocity_model_to_string(model);
        const auto pos = text.find("null_embedding");
        REQUIRE(pos != std::string::npos);
        auto bad = text;
        bad.replace(pos, std::string("null_embedding 0 0 1").size(), "null_embedding 1 0 0");
        CHECK_THROWS_AS(velocity_model_from_string(bad), ParseError);
        CHECK_THROWS_AS(velocity_model_from_string("velocity_model 1\ndim x\n"), ParseError);
        CHECK_THROWS_AS(load_velocity_model("/nonexistent/model.txt"), IoError);
    }

    TEST_CASE("architecture mismatches are rejected at construction") {
        CHECK_THROWS_AS(VelocityModel(2, 2, 0.1, nn::Mlp({5, 2})), InputError);
        CHECK_THROWS_AS(VelocityModel(2, 2, 0.1, nn::Mlp({6, 3})), InputError);
        CHECK_THROWS_AS(VelocityModel(2, 2, 1.5, nn::Mlp({6, 2})), InputError);
    }
}
