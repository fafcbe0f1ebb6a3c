// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "flowpref/common/errors.hpp"
#include "flowpref/eval/metrics.hpp"
#include "flowpref/eval/report.hpp"
#include "flowpref/flow/model_io.hpp"
#include "flowpref/flow/sampler.hpp"
#include "support.hpp"

using namespace flowpref;
using namespace flowpref::eval;
using doctest::Approx;

namespace {

struct Fixture {
    flow::ToyTask task = flow::ToyTask::generate({.dim = 3, .num_classes = 2});
    scorer::ToyExtractor extractor{task};
    flow::VelocityModel reference = make_model(31);
    flow::VelocityModel policy = make_model(32);
    scorer::ScoreHead head = make_head();

    static flow::VelocityModel make_model(std::uint64_t seed) {
        Rng rng(seed);
        return testing::random_velocity_model(3, 2, rng, {8}, 0.3);
    }
    static scorer::ScoreHead make_head() {
        Rng rng(33);
        return scorer::ScoreHead{testing::random_mlp({5, 8, 3}, rng, 1.0), {}};
    }
};

std::vector<Vec> normals(Rng& rng, std::size_t n, std::size_t d, double shift) {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto v = testing::random_vec(rng, d);
        v[0] += shift;
        out.push_back(v);
    }
    return out;
}

double mean_dist_oracle(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            s += std::sqrt(testing::sq_norm_diff(a[i], b[j]));
        }
    }
    return s / static_cast<double>(a.size() * b.size());
}

}  // namespace

TEST_SUITE("energy_distance") {
    TEST_CASE("identical sets give zero") {
        Rng rng(1);
        const auto x = normals(rng, 50, 3, 0.0);
        CHECK(std::abs(energy_distance(x, x)) <= 1e-12);
    }

    TEST_CASE("two point masses at distance r give 2r") {
        const std::vector<Vec> a{{0.0, 0.0}}, b{{3.0, 4.0}};
        CHECK(energy_distance(a, b) == Approx(10.0).epsilon(1e-15));
    }

    TEST_CASE("matches a brute-force double loop and is symmetric") {
        Rng rng(2);
        const auto x = normals(rng, 200, 4, 0.0);
        const auto y = normals(rng, 200, 4, 0.7);
        const double oracle = 2.0 * mean_dist_oracle(x, y) - mean_dist_oracle(x, x) - mean_dist_oracle(y, y);
        CHECK(energy_distance(x, y) == Approx(oracle).epsilon(1e-12));
        CHECK(energy_distance(y, x) == Approx(oracle).epsilon(1e-12));
        CHECK(oracle > 0.0);
    }

    TEST_CASE("dimension mismatch and empty sets are input errors") {
        const std::vector<Vec> a{{0.0, 1.0}}, b{{1.0}};
        CHECK_THROWS_AS(energy_distance(a, b), InputError);
        CHECK_THROWS_AS(energy_distance(a, std::vector<Vec>{}), InputError);
    }
}

TEST_SUITE("reward_metrics") {
    TEST_CASE("uniform head gives one third") {
        Fixture f;
        const scorer::ScoreHead uniform{nn::Mlp({5, 4, 3}), {}};
        const auto conds = flow::draw_conditions(2, 99, 0.5, 1);
        const auto r = mean_good_prob(f.reference, uniform, f.extractor, conds, {.n_steps = 5, .seed = 2});
        CHECK(r.mean == Approx(1.0 / 3.0).epsilon(1e-15));
        for (double p : r.per_prompt) {
            CHECK(p == 1.0 / 3.0);
        }
    }

    TEST_CASE("mean p(Good) is reproducible and equals a recount") {
        Fixture f;
        const auto conds = flow::draw_conditions(2, 100, 0.5, 3);
        const SamplingSettings s{.gamma = 4.5, .n_steps = 8, .seed = 4};
        const auto a = mean_good_prob(f.policy, f.head, f.extractor, conds, s);
        const auto b = mean_good_prob(f.policy, f.head, f.extractor, conds, {.gamma = 4.5, .n_steps = 8, .seed = 4, .threads = 3});
        CHECK(a.mean == b.mean);
        CHECK(a.per_prompt == b.per_prompt);
        double sum = 0.0;
        for (std::size_t i = 0; i < conds.size(); ++i) {
            Rng rng(derive_seed(4, {i}));
            const auto x = flow::sample(f.policy, conds[i], 4.5, 8, rng);
            const double p = scorer::score_probs(f.head, f.extractor.extract(x, conds[i])).good;
            CHECK(a.per_prompt[i] == p);
            sum += p;
        }
        CHECK(a.mean == Approx(sum / 100.0).epsilon(1e-14));
        CHECK(a.mean >= 0.0);
        CHECK(a.mean <= 1.0);
    }

    TEST_CASE("a model against itself wins exactly half") {
        Fixture f;
        const auto conds = flow::draw_conditions(2, 50, 0.5, 5);
        const auto w = win_rate(f.policy, f.policy, f.head, f.extractor, conds, {.n_steps = 5, .seed = 6});
        CHECK(w.win_rate == 0.5);
    }

    TEST_CASE("single-prompt wins and the recount from the per-prompt log") {
        CHECK(win_rate_from(std::vector<double>{0.6}, std::vector<double>{0.4}).win_rate == 1.0);
        CHECK(win_rate_from(std::vector<double>{0.4}, std::vector<double>{0.6}).win_rate == 0.0);
        CHECK_THROWS_AS(win_rate_from(std::vector<double>{}, std::vector<double>{}), InputError);

        Fixture f;
        const auto conds = flow::draw_conditions(2, 500, 0.5, 7);
        const auto w = win_rate(f.policy, f.reference, f.head, f.extractor, conds, {.n_steps = 4, .seed = 8});
        double wins = 0.0;
        for (std::size_t i = 0; i < conds.size(); ++i) {
            const double p = w.policy_good[i], r = w.reference_good[i];
            wins += p > r ? 1.0 : (p == r ? 0.5 : 0.0);
        }
        CHECK(w.win_rate == Approx(wins / 500.0).epsilon(1e-14));
        CHECK(w.win_rate >= 0.0);
        CHECK(w.win_rate <= 1.0);

        Rng rng(1);
        const auto wider = testing::random_velocity_model(3, 2, rng, {9});
        CHECK_THROWS_AS(win_rate(f.policy, wider, f.head, f.extractor, conds, {}), InputError);
    }

    TEST_CASE("bootstrap lower bound") {
        const std::vector<double> flat(40, 0.25);
        CHECK(bootstrap_mean_lower_bound(flat, 0.95, 500, 1) == 0.25);
        Rng rng(9);
        std::vector<double> v(300);
        double mean = 0.0;
        for (auto& x : v) {
            x = 0.1 + testing::random_vec(rng, 1)[0];
            mean += x;
        }
        mean /= 300.0;
        const double lb = bootstrap_mean_lower_bound(v, 0.95, 2000, 3);
        CHECK(lb < mean);
        CHECK(lb == bootstrap_mean_lower_bound(v, 0.95, 2000, 3));
        CHECK(mean - lb == Approx(1.645 / std::sqrt(300.0)).epsilon(0.2));
        CHECK_THROWS_AS(bootstrap_mean_lower_bound(v, 1.5, 10, 1), InputError);
        CHECK_THROWS_AS(bootstrap_mean_lower_bound(std::vector<double>{}, 0.9, 10, 1), InputError);
    }
}

TEST_SUITE("report") {
    TEST_CASE("report fields equal independently recomputed metrics") {
        Fixture f;
        const auto conds = flow::draw_conditions(2, 60, 0.5, 10);
        const SamplingSettings s{.gamma = 2.0, .n_steps = 6, .seed = 11};
        const auto r = evaluate(f.policy, f.reference, f.head, f.extractor, f.task, conds, s, 10);
        const auto pg = mean_good_prob(f.policy, f.head, f.extractor, conds, s);
        const auto rg = mean_good_prob(f.reference, f.head, f.extractor, conds, s);
        CHECK(r.mean_good_prob_policy == pg.mean);
        CHECK(r.mean_good_prob_reference == rg.mean);
        CHECK(r.win_rate == win_rate(f.policy, f.reference, f.head, f.extractor, conds, s).win_rate);
        CHECK(r.good_prob_margin == pg.mean - rg.mean);
        std::vector<Vec> target;
        for (std::size_t i = 0; i < conds.size(); ++i) {
            Rng rng(derive_seed(11, {i, 1}));
            target.push_back(f.task.sample(conds[i].class_id, rng));
        }
        CHECK(r.energy_distance == energy_distance(sample_prompts(f.policy, conds, s), target));
        CHECK(r.n_prompts == 60);
        CHECK(r.policy_id == flow::checkpoint_id(f.policy));
        CHECK(r.reference_id == flow::checkpoint_id(f.reference));
        CHECK(r.head_id == scorer::head_checkpoint_id(f.head));
        CHECK(r.eval_seed == 11);
        CHECK(r.prompt_seed == 10);
    }

    TEST_CASE("untrained policy against itself") {
        Fixture f;
        const auto conds = flow::draw_conditions(2, 30, 0.5, 12);
        const auto r = evaluate(f.reference, f.reference, f.head, f.extractor, f.task, conds, {.n_steps = 4, .seed = 1});
        CHECK(r.win_rate == 0.5);
        CHECK(r.good_prob_margin == 0.0);
        CHECK(r.margin_lower_95 == 0.0);
    }

    TEST_CASE("reports round-trip and re-run bit-identically") {
        Fixture f;
        const auto conds = flow::draw_conditions(2, 30, 0.5, 13);
        const SamplingSettings s{.n_steps = 4, .seed = 2};
        const auto r = evaluate(f.policy, f.reference, f.head, f.extractor, f.task, conds, s, 13);
        std::ostringstream out;
        write_report(out, r);
        std::istringstream in(out.str());
        CHECK(read_report(in) == r);
        CHECK(evaluate(f.policy, f.reference, f.head, f.extractor, f.task, conds, s, 13) == r);
        std::istringstream bad(R"({"policy_id": "x"})");
        CHECK_THROWS_AS(read_report(bad), ParseError);
    }

    TEST_CASE("summary table lists metrics in a fixed order") {
        EvalReport r;
        r.n_prompts = 500;
        const auto t = summary_table(r);
        const auto pos = [&](const char* key) { return t.find(key); };
        CHECK(pos("energy_distance") < pos("mean_good_prob_policy"));
        CHECK(pos("mean_good_prob_policy") < pos("mean_good_prob_reference"));
        CHECK(pos("mean_good_prob_reference") < pos("good_prob_margin"));
        CHECK(pos("margin_lower_95") < pos("win_rate"));
        CHECK(pos("win_rate") < pos("n_prompts"));
    }
}
