#include "vrcq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "vrcq/error.hpp"
#include "vrcq/rng.hpp"

namespace vrcq {

namespace {

std::string pair_label(std::size_t x, std::size_t u) {
    return "(x=" + std::to_string(x) + ",u=" + std::to_string(u) + ")";
}

}  // namespace

double MdpInstance::reward_max() const {
    double m = 0.0;
    for (double r : rewards_) m = std::max(m, std::abs(r));
    return m;
}

void MdpInstance::build_support() {
    const std::size_t pairs = num_pairs();
    row_begin_.assign(pairs + 1, 0);
    succ_state_.clear();
    succ_prob_.clear();
    succ_cdf_.clear();
    for (std::size_t p = 0; p < pairs; ++p) {
        row_begin_[p] = succ_state_.size();
        const double* row = transitions_.data() + p * states_;
        double acc = 0.0;
        for (std::size_t y = 0; y < states_; ++y) {
            if (row[y] > 0.0) {
                acc += row[y];
                succ_state_.push_back(static_cast<std::uint32_t>(y));
                succ_prob_.push_back(row[y]);
                succ_cdf_.push_back(acc);
            }
        }
        // Unit draws lie in [0,1), so a terminal 1.0 always catches them.
        succ_cdf_.back() = 1.0;
    }
    row_begin_[pairs] = succ_state_.size();
}

MdpInstance make_mdp(std::size_t num_states, std::size_t num_actions,
                     std::vector<double> transitions, std::vector<double> rewards, double gamma,
                     double sigma_r) {
    if (num_states == 0 || num_actions == 0) {
        throw ModelError("make_mdp: num_states and num_actions must be positive");
    }
    const std::size_t pairs = num_states * num_actions;
    if (rewards.size() != pairs) {
        throw ModelError("make_mdp: dimension mismatch: rewards has " +
                         std::to_string(rewards.size()) + " entries, expected " +
                         std::to_string(pairs));
    }
    if (transitions.size() != pairs * num_states) {
        throw ModelError("make_mdp: dimension mismatch: transitions has " +
                         std::to_string(transitions.size()) + " entries, expected " +
                         std::to_string(pairs * num_states));
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ModelError("make_mdp: gamma must lie in (0,1), got " + std::to_string(gamma));
    }
    if (!(sigma_r >= 0.0) || !std::isfinite(sigma_r)) {
        throw ModelError("make_mdp: sigma_r must be a finite nonnegative number");
    }
    for (std::size_t p = 0; p < pairs; ++p) {
        const std::size_t x = p / num_actions;
        const std::size_t u = p % num_actions;
        if (!std::isfinite(rewards[p])) {
            throw ModelError("make_mdp: non-finite reward at " + pair_label(x, u));
        }
        double* row = transitions.data() + p * num_states;
        double sum = 0.0;
        for (std::size_t y = 0; y < num_states; ++y) {
            if (!(row[y] >= 0.0) || !std::isfinite(row[y])) {
                throw ModelError("make_mdp: negative probability at " + pair_label(x, u) +
                                 ", next state " + std::to_string(y));
            }
            sum += row[y];
        }
        const double dev = std::abs(sum - 1.0);
        if (dev > kRowSumIngestTol) {
            throw ModelError("make_mdp: row not stochastic at " + pair_label(x, u) + " (sum " +
                             std::to_string(sum) + ")");
        }
        if (dev > kRowSumExactTol) {
            for (std::size_t y = 0; y < num_states; ++y) row[y] /= sum;
        }
    }

    MdpInstance mdp;
    mdp.states_ = num_states;
    mdp.actions_ = num_actions;
    mdp.transitions_ = std::move(transitions);
    mdp.rewards_ = std::move(rewards);
    mdp.gamma_ = gamma;
    mdp.sigma_r_ = sigma_r;
    mdp.build_support();
    return mdp;
}

MdpInstance garnet(std::size_t num_states, std::size_t num_actions, std::size_t branching,
                   std::uint64_t seed, double gamma, double sigma_r) {
    if (num_states == 0 || num_actions == 0) {
        throw ModelError("garnet: num_states and num_actions must be positive");
    }
    if (branching < 1 || branching > num_states) {
        throw ModelError("garnet: branching must lie in [1, num_states], got " +
                         std::to_string(branching));
    }
    RngStream rng(mix64(seed));
    const std::size_t pairs = num_states * num_actions;
    std::vector<double> transitions(pairs * num_states, 0.0);
    std::vector<double> rewards(pairs);
    std::vector<std::size_t> perm(num_states);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> cuts(branching + 1);

    for (std::size_t p = 0; p < pairs; ++p) {
        // Partial Fisher-Yates: the first `branching` slots are a uniform subset.
        for (std::size_t k = 0; k < branching; ++k) {
            const std::size_t j = k + rng.below(num_states - k);
            std::swap(perm[k], perm[j]);
        }
        bool degenerate = true;
        while (degenerate) {
            cuts.front() = 0.0;
            cuts.back() = 1.0;
            for (std::size_t k = 1; k < branching; ++k) cuts[k] = rng.uniform();
            std::sort(cuts.begin() + 1, cuts.end() - 1);
            degenerate = false;
            for (std::size_t k = 0; k < branching; ++k) {
                if (!(cuts[k + 1] > cuts[k])) degenerate = true;
            }
        }
        double* row = transitions.data() + p * num_states;
        for (std::size_t k = 0; k < branching; ++k) row[perm[k]] = cuts[k + 1] - cuts[k];
        rewards[p] = rng.uniform();
    }
    return make_mdp(num_states, num_actions, std::move(transitions), std::move(rewards), gamma,
                    sigma_r);
}

double hard_two_state_stay_probability(double gamma) {
    return (4.0 * gamma - 1.0) / (3.0 * gamma);
}

MdpInstance hard_two_state(double gamma, double beta) {
    if (!(gamma > 0.25 && gamma < 1.0)) {
        throw ModelError("hard_two_state: gamma must lie in (1/4, 1), got " +
                         std::to_string(gamma));
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw ModelError("hard_two_state: beta must be a finite nonnegative number");
    }
    const double p = hard_two_state_stay_probability(gamma);
    std::vector<double> transitions{p, 1.0 - p, 0.0, 1.0};
    std::vector<double> rewards{std::pow(1.0 - gamma, beta), 0.0};
    return make_mdp(2, 1, std::move(transitions), std::move(rewards), gamma, 0.0);
}

Policy greedy_policy(const QTable& q) {
    Policy pi;
    pi.action_of.resize(q.num_states());
    for (std::size_t x = 0; x < q.num_states(); ++x) {
        std::size_t best = 0;
        for (std::size_t u = 1; u < q.num_actions(); ++u) {
            if (q(x, u) > q(x, best)) best = u;
        }
        pi.action_of[x] = best;
    }
    return pi;
}

std::string mdp_to_json(const MdpInstance& mdp, int indent) {
    nlohmann::json j;
    j["num_states"] = mdp.num_states();
    j["num_actions"] = mdp.num_actions();
    j["gamma"] = mdp.gamma();
    j["sigma_r"] = mdp.sigma_r();
    j["rewards"] = std::vector<double>(mdp.rewards().begin(), mdp.rewards().end());
    j["transitions"] = std::vector<double>(mdp.transitions().begin(), mdp.transitions().end());
    return j.dump(indent);
}

MdpInstance mdp_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        return make_mdp(j.at("num_states").get<std::size_t>(),
                        j.at("num_actions").get<std::size_t>(),
                        j.at("transitions").get<std::vector<double>>(),
                        j.at("rewards").get<std::vector<double>>(), j.at("gamma").get<double>(),
                        j.value("sigma_r", 0.0));
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("instance JSON: ") + e.what());
    }
}

void save_mdp(const MdpInstance& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << mdp_to_json(mdp, 2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

MdpInstance load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open instance file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return mdp_from_json(ss.str());
}

}  // namespace vrcq
