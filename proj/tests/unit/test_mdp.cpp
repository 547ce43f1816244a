#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "vrcq/error.hpp"
#include "vrcq/mdp.hpp"
#include "vrcq/operators.hpp"

using namespace vrcq;

TEST_SUITE("mdp") {

TEST_CASE("make_mdp validates its input") {
    CHECK_THROWS_AS(make_mdp(2, 1, {1, 0, 0}, {0, 0}, 0.9), ModelError);
    CHECK_THROWS_AS(make_mdp(2, 1, {1, 0, 0, 1}, {0}, 0.9), ModelError);
    CHECK_THROWS_WITH_AS(make_mdp(2, 1, {1.2, -0.2, 0, 1}, {0, 0}, 0.9),
                         doctest::Contains("negative probability"), ModelError);
    CHECK_THROWS_WITH_AS(make_mdp(2, 1, {0.6, 0.6, 0, 1}, {0, 0}, 0.9),
                         doctest::Contains("row not stochastic at (x=0,u=0)"), ModelError);
    CHECK_THROWS_AS(make_mdp(1, 1, {1}, {0}, 1.0), ModelError);
    CHECK_THROWS_AS(make_mdp(1, 1, {1}, {0}, 0.0), ModelError);
    CHECK_THROWS_AS(make_mdp(1, 1, {1}, {0}, 0.5, -1.0), ModelError);
    CHECK_THROWS_AS(make_mdp(1, 1, {1}, {NAN}, 0.5), ModelError);
}

TEST_CASE("rows off by at most 1e-9 are renormalized") {
    const auto m = make_mdp(2, 1, {0.5 + 4e-10, 0.5, 0, 1}, {1, 0}, 0.9);
    CHECK(std::abs(m.transition(0, 0, 0) + m.transition(0, 0, 1) - 1.0) <= 1e-12);
    CHECK_THROWS_AS(make_mdp(2, 1, {0.5 + 1e-8, 0.5, 0, 1}, {1, 0}, 0.9), ModelError);
}

TEST_CASE("hard two-state instance") {
    const auto m = hard_two_state(0.96, 0.0);
    CHECK(m.num_states() == 2);
    CHECK(m.num_actions() == 1);
    CHECK(m.sigma_r() == 0.0);
    CHECK(m.transition(0, 0, 0) == doctest::Approx(2.84 / 2.88).epsilon(1e-14));
    CHECK(m.transition(0, 0, 0) == doctest::Approx(0.9861111).epsilon(1e-6));
    CHECK(m.transition(1, 0, 1) == 1.0);
    CHECK(m.reward(0, 0) == 1.0);
    CHECK(m.reward(1, 0) == 0.0);
    CHECK_THROWS_AS(hard_two_state(0.25, 0.0), ModelError);
    CHECK_THROWS_AS(hard_two_state(0.9, -0.1), ModelError);

    const auto q = exact_optimal_q(m, 1e-10);
    CHECK(std::abs(q(0, 0) - 18.75) <= 1e-10);
    CHECK(q(1, 0) == 0.0);

    const auto m2 = hard_two_state(0.96, 0.2);
    const auto d = policy_eval_direct(m2);
    CHECK(d(0, 0) == doctest::Approx(std::pow(0.04, 0.2) * 3.0 / (4.0 * 0.04)).epsilon(1e-12));
    CHECK(d(1, 0) == 0.0);
    CHECK(span_seminorm(d) == doctest::Approx(d(0, 0)).epsilon(1e-15));
}

TEST_CASE("policy_eval_direct on a uniform chain and error on |U| > 1") {
    std::vector<double> p(9, 1.0 / 3.0);
    for (double g : {0.5, 0.9, 0.99}) {
        const auto m = make_mdp(3, 1, p, {1, 1, 1}, g);
        const auto q = policy_eval_direct(m);
        for (std::size_t x = 0; x < 3; ++x) CHECK(q(x, 0) == doctest::Approx(1.0 / (1.0 - g)));
    }
    CHECK_THROWS_WITH_AS(policy_eval_direct(garnet(4, 2, 2, 1)),
                         doctest::Contains("direct solve requires policy-evaluation instance"),
                         ModelError);
}

TEST_CASE("direct solve matches an independent elimination") {
    const auto m = garnet(12, 1, 3, 77, 0.95);
    const std::size_t n = 12;
    std::vector<double> a(n * n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = m.reward(i, 0);
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = (i == j ? 1.0 : 0.0) - m.gamma() * m.transition(i, 0, j);
        }
    }
    const auto x = testsupport::solve_dense(a, b);
    const auto q = policy_eval_direct(m);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(q(i, 0) - x[i]) < 1e-10);
}

TEST_CASE("exact_optimal_q meets its residual target") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto m = garnet(15, 3, 4, seed, 0.97);
        const double tol = 1e-9;
        const auto q = exact_optimal_q(m, tol);
        CHECK(linf_distance(q, bellman(m, q)) <= tol * (1.0 - m.gamma()));
    }
    CHECK_THROWS_AS(exact_optimal_q(hard_two_state(0.9, 0), 0.0), ModelError);
}

TEST_CASE("garnet structure and determinism") {
    const auto a = garnet(20, 2, 2, 123);
    const auto b = garnet(20, 2, 2, 123);
    const auto c = garnet(20, 2, 2, 124);
    CHECK(a == b);
    CHECK(mdp_to_json(a) == mdp_to_json(b));
    CHECK_FALSE(a == c);
    for (std::size_t pair = 0; pair < a.num_pairs(); ++pair) {
        CHECK(a.successors(pair).size() == 2);
        const auto probs = a.successor_probs(pair);
        CHECK(std::abs(std::accumulate(probs.begin(), probs.end(), 0.0) - 1.0) <= 1e-12);
        CHECK(a.successor_cdf(pair).back() == 1.0);
    }
    for (double r : a.rewards()) {
        CHECK(r >= 0.0);
        CHECK(r < 1.0);
    }
    CHECK_THROWS_AS(garnet(5, 1, 6, 1), ModelError);
    CHECK_THROWS_AS(garnet(5, 1, 0, 1), ModelError);
}

TEST_CASE("json round trip is bit exact") {
    const auto m = garnet(7, 3, 3, 9, 0.913, 0.25);
    const auto back = mdp_from_json(mdp_to_json(m));
    CHECK(back == m);
    const auto path = std::filesystem::temp_directory_path() / "vrcq_mdp_roundtrip.json";
    save_mdp(m, path.string());
    CHECK(load_mdp(path.string()) == m);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(mdp_from_json("{\"num_states\": 1}"), ModelError);
    CHECK_THROWS_AS(mdp_from_json("not json"), ModelError);
    CHECK_THROWS_WITH_AS(load_mdp("/nonexistent/instance.json"),
                         doctest::Contains("/nonexistent/instance.json"), std::runtime_error);
}

TEST_CASE("greedy policy") {
    CHECK(greedy_policy(QTable(1, 2, std::vector<double>{1, 2})).action_of ==
          std::vector<std::size_t>{1});
    CHECK(greedy_policy(QTable(1, 2, std::vector<double>{2, 2})).action_of ==
          std::vector<std::size_t>{0});
    std::mt19937_64 gen(3);
    for (int i = 0; i < 20; ++i) {
        QTable q = testsupport::random_table(6, 4, gen);
        const auto pi = greedy_policy(q);
        QTable shifted = q;
        shifted.add_constant(17.5);
        CHECK(greedy_policy(shifted) == pi);
        CHECK(greedy_policy(3.25 * q) == pi);
    }
}

}
