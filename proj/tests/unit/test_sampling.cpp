#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vrcq/mdp.hpp"
#include "vrcq/sampling.hpp"

using namespace vrcq;

TEST_SUITE("sampling") {

TEST_CASE("degenerate rows give the unique successor and exact rewards") {
    const auto m = testsupport::deterministic_mdp(8, 3, 0.9, 5);
    RngStream s(1);
    for (int i = 0; i < 50; ++i) {
        const auto g = draw_sample(m, s);
        for (std::size_t pair = 0; pair < m.num_pairs(); ++pair) {
            CHECK(g.next_state[pair] == m.successors(pair)[0]);
            CHECK(g.reward_obs[pair] == m.rewards()[pair]);
        }
    }
    CHECK(s.counter().draws() == 50);
}

TEST_CASE("stay frequency in the hard instance") {
    const auto m = hard_two_state(0.96, 0.0);
    const double p = m.transition(0, 0, 0);
    RngStream s(2);
    GenerativeSample g;
    const int n = 1000000;
    int stay = 0;
    for (int i = 0; i < n; ++i) {
        draw_sample(m, s, g);
        stay += g.next_state[0] == 0;
        REQUIRE(g.next_state[1] == 1);
    }
    const double freq = static_cast<double>(stay) / n;
    CHECK(std::abs(freq - 0.9861) < 0.001);
    CHECK(std::abs(freq - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("successor frequencies match a garnet kernel") {
    const auto m = garnet(30, 2, 20, 4, 0.9);
    RngStream s(3);
    const int n = 200000;
    std::vector<int> counts(m.num_pairs() * m.num_states(), 0);
    GenerativeSample g;
    for (int i = 0; i < n; ++i) {
        draw_sample(m, s, g);
        for (std::size_t pair = 0; pair < m.num_pairs(); ++pair) {
            ++counts[pair * m.num_states() + g.next_state[pair]];
        }
    }
    double worst = 0.0;
    for (std::size_t pair = 0; pair < m.num_pairs(); ++pair) {
        for (std::size_t y = 0; y < m.num_states(); ++y) {
            const double p = m.transitions()[pair * m.num_states() + y];
            const double f = counts[pair * m.num_states() + y] / static_cast<double>(n);
            if (p == 0.0) {
                REQUIRE(f == 0.0);
            } else {
                worst = std::max(worst, std::abs(f - p) / std::sqrt(p * (1 - p) / n));
            }
        }
    }
    CHECK(worst < 5.0);
}

TEST_CASE("reward noise has the configured scale") {
    const auto m = garnet(4, 1, 2, 8, 0.9, 0.5);
    RngStream s(4);
    GenerativeSample g;
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        draw_sample(m, s, g);
        const double e = g.reward_obs[2] - m.rewards()[2];
        sum += e;
        sum2 += e * e;
    }
    CHECK(std::abs(sum / n) < 5 * 0.5 / std::sqrt(n));
    CHECK(std::sqrt(sum2 / n) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("same seed gives the same stream; draws are addressable") {
    const auto m = garnet(10, 2, 3, 5, 0.9, 0.1);
    RngStream a(77), b(77);
    for (int i = 0; i < 20; ++i) {
        const auto ga = draw_sample(m, a);
        const auto gb = draw_sample(m, b);
        CHECK(ga.next_state == gb.next_state);
        CHECK(ga.reward_obs == gb.reward_obs);
    }
    GenerativeSample at;
    draw_sample_at(m, RngStream(77), 19, at);
    RngStream c(77);
    GenerativeSample last;
    for (int i = 0; i < 20; ++i) draw_sample(m, c, last);
    CHECK(at.next_state == last.next_state);
    CHECK(at.reward_obs == last.reward_obs);
}

}
