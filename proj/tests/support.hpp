#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "vrcq/mdp.hpp"
#include "vrcq/qtable.hpp"

namespace testsupport {

// Point-mass kernel: every (x,u) moves to one successor chosen from `seed`.
inline vrcq::MdpInstance deterministic_mdp(std::size_t states, std::size_t actions, double gamma,
                                           std::uint64_t seed, double reward_offset = 0.0) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::size_t> pick(0, states - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p(states * actions * states, 0.0);
    std::vector<double> r(states * actions);
    for (std::size_t i = 0; i < states * actions; ++i) {
        p[i * states + pick(gen)] = 1.0;
        r[i] = unit(gen) + reward_offset;
    }
    return vrcq::make_mdp(states, actions, std::move(p), std::move(r), gamma);
}

inline vrcq::QTable random_table(std::size_t states, std::size_t actions, std::mt19937_64& gen,
                                 double lo = -10.0, double hi = 10.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    vrcq::QTable q(states, actions);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = d(gen);
    return q;
}

inline vrcq::MdpInstance with_rewards_shifted(const vrcq::MdpInstance& m, double c) {
    std::vector<double> p(m.transitions().begin(), m.transitions().end());
    std::vector<double> r(m.rewards().begin(), m.rewards().end());
    for (double& x : r) x += c;
    return vrcq::make_mdp(m.num_states(), m.num_actions(), std::move(p), std::move(r), m.gamma(),
                          m.sigma_r());
}

// Dense Gaussian elimination with partial pivoting, kept separate from the
// library's Eigen path so the two can be compared.
inline std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        }
        for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

}  // namespace testsupport
