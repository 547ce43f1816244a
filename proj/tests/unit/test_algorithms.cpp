#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vrcq/algorithms.hpp"
#include "vrcq/error.hpp"
#include "vrcq/operators.hpp"

using namespace vrcq;

TEST_SUITE("algorithms") {

TEST_CASE("step sizes") {
    CHECK(step_size(StepPolicy::rescaled_linear(), 10, 0.9) == doctest::Approx(0.5));
    CHECK(step_size(StepPolicy::rescaled_linear(), 90, 0.9) == doctest::Approx(0.1));
    CHECK(step_size(StepPolicy::polynomial(-0.5), 1, 0.9) == 1.0);
    CHECK(step_size(StepPolicy::polynomial(-0.7), 1, 0.9) == 1.0);
    CHECK(step_size(StepPolicy::polynomial(-0.5), 16, 0.9) == doctest::Approx(0.25));
    for (std::uint64_t n : {1u, 7u, 1000u}) {
        CHECK(step_size(StepPolicy::constant_step(0.3), n, 0.5) == 0.3);
    }
    CHECK_THROWS_AS(step_size(StepPolicy::rescaled_linear(), 0, 0.9), ModelError);
    CHECK_THROWS_AS(step_size(StepPolicy::polynomial(0.5), 3, 0.9), ModelError);
    CHECK_THROWS_AS(step_size(StepPolicy::constant_step(1.5), 3, 0.9), ModelError);
}

TEST_CASE("cq: first output is the initial table, accounting is exact") {
    const auto m = garnet(6, 2, 3, 1, 0.9, 0.3);
    std::mt19937_64 gen(1);
    const auto theta0 = testsupport::random_table(6, 2, gen);
    RngStream s(2);
    const auto one = cq_run(m, s, theta0, 0.3, 1);
    CHECK(linf_distance(one.estimate, theta0) <= 1e-15);
    CHECK(one.samples_used == 1);
    const auto many = cq_run(m, s, theta0, 0.3, 2345);
    CHECK(many.samples_used == 2345);
    CHECK(s.counter().draws() == 2346);
    CHECK_THROWS_AS(cq_run(m, s, theta0, 1.0, 10), ModelError);
    CHECK_THROWS_AS(cq_run(m, s, theta0, 0.5, 0), ModelError);
    CHECK_THROWS_AS(cq_run(m, s, QTable(3, 2), 0.5, 10), ModelError);
}

TEST_CASE("cq: deterministic instances obey the initialization bound") {
    std::mt19937_64 gen(3);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = testsupport::deterministic_mdp(10, 2, 0.8, seed);
        const auto star = exact_optimal_q(m, 1e-12);
        const auto theta0 = testsupport::random_table(10, 2, gen);
        for (double lambda : {0.1, 0.5}) {
            for (std::uint64_t n : {100u, 1000u}) {
                RngStream s(seed);
                const auto out = cq_run(m, s, theta0, lambda, n);
                const double bound = 2 * linf_distance(theta0, star) / ((1 - 0.8) * lambda * n);
                CHECK(linf_distance(out.estimate, star) <= bound);
            }
        }
    }
}

TEST_CASE("cq: shift equivariance on deterministic instances") {
    const auto m = testsupport::deterministic_mdp(7, 3, 0.9, 11);
    const auto shifted = testsupport::with_rewards_shifted(m, 2.5);
    const QTable theta0(7, 3);
    RngStream a(1), b(1);
    const auto base = cq_run(m, a, theta0, 0.05, 20000);
    QTable start = theta0;
    start.add_constant(2.5 / (1 - 0.9));
    const auto moved = cq_run(shifted, b, start, 0.05, 20000);
    QTable expect = base.estimate;
    expect.add_constant(2.5 / (1 - 0.9));
    CHECK(linf_distance(moved.estimate, expect) <= 1e-9);
}

TEST_CASE("cq: noisy mean error is below the single-epoch bound") {
    const auto m = hard_two_state(0.9, 0.0);
    const auto star = policy_eval_direct(m);
    const std::uint64_t n = 100000;
    const double lambda = 1.0 / std::sqrt(double(n));
    const double sigma = linf_norm(effective_variance(m, star).values);
    const double log2d = std::log(2.0 * m.num_pairs());
    const double g = m.gamma();
    const double rhs = 2 * linf_norm(star) / ((1 - g) * lambda * n) +
                       2.0 / 3.0 * g / (1 - g) * lambda * lambda * log2d * span_seminorm(star) +
                       2 * lambda / (1 - g) * std::sqrt(2 * log2d) * (sigma + m.sigma_r());
    double mean = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        auto s = spawn_stream(17, t);
        mean += linf_distance(cq_run(m, s, QTable(2, 1), lambda, n).estimate, star) / trials;
    }
    CHECK(mean <= rhs);
}

TEST_CASE("vrcq: empty schedule and accounting") {
    const auto m = garnet(5, 2, 2, 3, 0.9, 0.1);
    std::mt19937_64 gen(4);
    const auto theta0 = testsupport::random_table(5, 2, gen);
    RngStream s(1);
    const auto none = vrcq_run(m, s, theta0, EpochSchedule{});
    CHECK(none.estimate == theta0);
    CHECK(none.samples_used == 0);
    CHECK(vr_q_learning_run(m, s, theta0, EpochSchedule{}).estimate == theta0);

    ScheduleScale k;
    k.epoch_len = 0.01;
    k.recenter = 0.01;
    const auto sched = schedule_expected(0.8, 0.9, m.num_pairs(), 3, k);
    const auto star = exact_optimal_q(m);
    RunOptions opts;
    opts.oracle = &star;
    const auto out = vrcq_run(m, s, theta0, sched, opts);
    CHECK(out.samples_used == sched.total_samples());
    CHECK(out.checkpoints.size() == 4);
    CHECK(out.checkpoints.back().samples == sched.total_samples());
    for (std::size_t i = 1; i < out.checkpoints.size(); ++i) {
        CHECK(out.checkpoints[i].samples > out.checkpoints[i - 1].samples);
    }
    const auto vr = vr_q_learning_run(m, s, theta0, sched, opts);
    CHECK(vr.samples_used == sched.total_samples());
}

TEST_CASE("vrcq: noise-free instances meet the geometric bound") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = testsupport::deterministic_mdp(6, 2, 0.9, 40 + seed);
        const auto star = exact_optimal_q(m, 1e-12);
        const auto sched = schedule_expected(0.7, 0.9, m.num_pairs(), 3);
        RngStream s(seed);
        const auto out = vrcq_run(m, s, QTable(6, 2), sched);
        CHECK(linf_distance(out.estimate, star) <= std::pow(0.7, 3) * linf_norm(star));
    }
}

TEST_CASE("q-learning") {
    const auto m = testsupport::deterministic_mdp(8, 2, 0.85, 5);
    const auto star = exact_optimal_q(m, 1e-12);
    std::mt19937_64 gen(5);
    const auto theta0 = testsupport::random_table(8, 2, gen);
    for (std::uint64_t n : {1u, 5u, 30u}) {
        RngStream s(1);
        const auto out = q_learning_run(m, s, theta0, StepPolicy::constant_step(1.0), n, false);
        QTable vi = theta0;
        for (std::uint64_t i = 0; i < n; ++i) vi = bellman(m, vi);
        CHECK(linf_distance(out.estimate, vi) <= 1e-12);
        CHECK(linf_distance(out.estimate, star) <=
              std::pow(0.85, double(n)) * linf_distance(theta0, star) + 1e-11);
    }

    const auto noisy = garnet(6, 2, 3, 6, 0.9, 0.5);
    RngStream a(3), b(3);
    const auto last = q_learning_run(noisy, a, QTable(6, 2), StepPolicy::polynomial(-0.6), 500, false);
    const auto avg = q_learning_run(noisy, b, QTable(6, 2), StepPolicy::polynomial(-0.6), 500, true);
    CHECK(last.samples_used == 500);
    CHECK(avg.samples_used == 500);
    CHECK_FALSE(last.estimate == avg.estimate);
}

TEST_CASE("vr-q-learning: deterministic one-epoch bound") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = testsupport::deterministic_mdp(6, 3, 0.9, 60 + seed);
        const auto star = exact_optimal_q(m, 1e-12);
        std::mt19937_64 gen(seed);
        const auto theta0 = testsupport::random_table(6, 3, gen);
        for (std::uint64_t n : {10u, 100u, 1000u}) {
            EpochSchedule sched;
            sched.rate = 0.5;
            sched.epochs.push_back({0.5, n, 1});
            RngStream s(seed);
            const auto out = vr_q_learning_run(m, s, theta0, sched);
            CHECK(linf_distance(out.estimate, star) <=
                  linf_distance(theta0, star) / ((1 - 0.9) * n + 1) + 1e-12);
        }
    }
}

TEST_CASE("runs are bit-identical for the same seed") {
    const auto m = garnet(8, 2, 3, 9, 0.9, 0.2);
    const auto sched = schedule_example1(0.9);
    auto a = spawn_stream(5, 3);
    auto b = spawn_stream(5, 3);
    CHECK(vrcq_run(m, a, QTable(8, 2), sched).estimate ==
          vrcq_run(m, b, QTable(8, 2), sched).estimate);
    auto c = spawn_stream(5, 4);
    auto d = spawn_stream(5, 3);
    CHECK_FALSE(vrcq_run(m, c, QTable(8, 2), sched).estimate ==
                vrcq_run(m, d, QTable(8, 2), sched).estimate);
}

TEST_CASE("algorithm names") {
    for (auto k : {AlgorithmKind::CQ, AlgorithmKind::VRCQ, AlgorithmKind::VRQL, AlgorithmKind::QL,
                   AlgorithmKind::QLPR}) {
        CHECK(parse_algorithm_kind(to_string(k)) == k);
    }
    CHECK(is_epoch_based(AlgorithmKind::VRQL));
    CHECK_FALSE(is_epoch_based(AlgorithmKind::QLPR));
    CHECK_THROWS_AS(parse_algorithm_kind("sarsa"), ConfigError);
}

}
