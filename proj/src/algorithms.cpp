#include "vrcq/algorithms.hpp"

#include <cmath>

#include "vrcq/error.hpp"
#include "vrcq/operators.hpp"
#include "vrcq/sampling.hpp"

namespace vrcq {

namespace {

void require_theta0(const MdpInstance& mdp, const QTable& theta0) {
    if (theta0.num_states() != mdp.num_states() || theta0.num_actions() != mdp.num_actions()) {
        throw ModelError("initial Q-table shape does not match the instance");
    }
}

class Tracker {
  public:
    Tracker(const RngStream& stream, const RunOptions& options, AlgoOutput& out)
        : stream_(stream), options_(options), out_(out), start_(stream.counter().draws()) {}

    std::uint64_t used() const { return stream_.counter().draws() - start_; }

    void record(const QTable& estimate) {
        if (options_.oracle == nullptr) return;
        out_.checkpoints.push_back({used(), linf_distance(estimate, *options_.oracle)});
    }

    void finish(QTable estimate) {
        out_.samples_used = used();
        out_.estimate = std::move(estimate);
    }

  private:
    const RngStream& stream_;
    const RunOptions& options_;
    AlgoOutput& out_;
    std::uint64_t start_;
};

// Running mean avg_n = avg_{n-1} + (x - avg_{n-1}) / n.
inline void polyak_update(QTable& avg, const QTable& x, std::uint64_t n) {
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += (x[i] - avg[i]) * w;
}

inline void blend(QTable& a, const QTable& b, double lambda) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = (1.0 - lambda) * a[i] + lambda * b[i];
}

bool due(std::uint64_t n, std::uint64_t every) { return every != 0 && n % every == 0; }

// One cascade epoch on the recentered operator; returns the inner average.
QTable cascade_epoch(const MdpInstance& mdp, RngStream& stream, const QTable& anchor,
                     const QTable& anchor_image, const EpochParams& epoch, Tracker& tracker,
                     const RunOptions& options) {
    const double lambda = epoch.step;
    const double gamma = mdp.gamma();
    const auto anchor_max = anchor.state_max();
    QTable y = anchor;
    QTable z = anchor;
    QTable avg(anchor.num_states(), anchor.num_actions());
    QTable target;
    std::vector<double> y_max;
    GenerativeSample sample;
    for (std::uint64_t n = 1; n <= epoch.epoch_len; ++n) {
        blend(y, z, lambda);
        y.state_max(y_max);
        draw_sample(mdp, stream, sample);
        recentered_bellman(sample, y_max, anchor_max, anchor_image, gamma, target);
        blend(z, target, lambda);
        polyak_update(avg, y, n);
        if (due(n, options.inner_checkpoint_every) && n != epoch.epoch_len) tracker.record(avg);
    }
    return avg;
}

}  // namespace

double step_size(const StepPolicy& policy, std::uint64_t n, double gamma) {
    if (n == 0) throw ModelError("step_size: iteration index starts at 1");
    switch (policy.kind) {
        case StepPolicy::Kind::Constant:
            if (!(policy.constant > 0.0 && policy.constant <= 1.0)) {
                throw ModelError("step_size: constant step must lie in (0,1]");
            }
            return policy.constant;
        case StepPolicy::Kind::RescaledLinear:
            return 1.0 / (1.0 + (1.0 - gamma) * static_cast<double>(n));
        case StepPolicy::Kind::Polynomial: {
            if (!(policy.eta < 0.0)) throw ModelError("step_size: polynomial exponent must be < 0");
            const double l = std::pow(static_cast<double>(n), policy.eta);
            return l > 1.0 ? 1.0 : l;
        }
    }
    throw ModelError("step_size: unknown policy");
}

AlgoOutput cq_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0, double step,
                  std::uint64_t n_iters, const RunOptions& options) {
    require_theta0(mdp, theta0);
    if (!(step > 0.0 && step < 1.0)) throw ModelError("cq_run: step must lie in (0,1)");
    if (n_iters < 1) throw ModelError("cq_run: need at least one iteration");
    AlgoOutput out;
    Tracker tracker(stream, options, out);
    QTable y = theta0;
    QTable z = theta0;
    QTable avg(theta0.num_states(), theta0.num_actions());
    QTable target;
    std::vector<double> scratch;
    GenerativeSample sample;
    for (std::uint64_t n = 1; n <= n_iters; ++n) {
        blend(y, z, step);
        draw_sample(mdp, stream, sample);
        empirical_bellman(sample, y, mdp, target, scratch);
        blend(z, target, step);
        polyak_update(avg, y, n);
        if (due(n, options.checkpoint_every) || n == n_iters) tracker.record(avg);
    }
    tracker.finish(std::move(avg));
    return out;
}

AlgoOutput vrcq_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0,
                    const EpochSchedule& schedule, const RunOptions& options) {
    require_theta0(mdp, theta0);
    AlgoOutput out;
    Tracker tracker(stream, options, out);
    QTable theta = theta0;
    tracker.record(theta);
    for (const auto& epoch : schedule.epochs) {
        const QTable image = monte_carlo_bellman(mdp, theta, epoch.recenter, stream);
        theta = cascade_epoch(mdp, stream, theta, image, epoch, tracker, options);
        tracker.record(theta);
    }
    tracker.finish(std::move(theta));
    return out;
}

AlgoOutput q_learning_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0,
                          const StepPolicy& step, std::uint64_t n_iters, bool pr_average,
                          const RunOptions& options) {
    require_theta0(mdp, theta0);
    if (n_iters < 1) throw ModelError("q_learning_run: need at least one iteration");
    AlgoOutput out;
    Tracker tracker(stream, options, out);
    QTable theta = theta0;
    QTable avg(theta0.num_states(), theta0.num_actions());
    QTable target;
    std::vector<double> scratch;
    GenerativeSample sample;
    for (std::uint64_t n = 1; n <= n_iters; ++n) {
        const double lambda = step_size(step, n, mdp.gamma());
        draw_sample(mdp, stream, sample);
        empirical_bellman(sample, theta, mdp, target, scratch);
        blend(theta, target, lambda);
        if (pr_average) polyak_update(avg, theta, n);
        if (due(n, options.checkpoint_every) || n == n_iters) {
            tracker.record(pr_average ? avg : theta);
        }
    }
    tracker.finish(pr_average ? std::move(avg) : std::move(theta));
    return out;
}

AlgoOutput vr_q_learning_run(const MdpInstance& mdp, RngStream& stream, const QTable& theta0,
                             const EpochSchedule& schedule, const RunOptions& options) {
    require_theta0(mdp, theta0);
    AlgoOutput out;
    Tracker tracker(stream, options, out);
    const double gamma = mdp.gamma();
    const auto inner_step = StepPolicy::rescaled_linear();
    QTable theta = theta0;
    QTable target;
    std::vector<double> theta_max;
    GenerativeSample sample;
    tracker.record(theta);
    for (const auto& epoch : schedule.epochs) {
        const QTable image = monte_carlo_bellman(mdp, theta, epoch.recenter, stream);
        const auto anchor_max = theta.state_max();
        for (std::uint64_t n = 1; n <= epoch.epoch_len; ++n) {
            theta.state_max(theta_max);
            draw_sample(mdp, stream, sample);
            recentered_bellman(sample, theta_max, anchor_max, image, gamma, target);
            blend(theta, target, step_size(inner_step, n, gamma));
            if (due(n, options.inner_checkpoint_every) && n != epoch.epoch_len) {
                tracker.record(theta);
            }
        }
        tracker.record(theta);
    }
    tracker.finish(std::move(theta));
    return out;
}

AlgorithmKind parse_algorithm_kind(const std::string& name) {
    if (name == "cq") return AlgorithmKind::CQ;
    if (name == "vrcq") return AlgorithmKind::VRCQ;
    if (name == "vrql") return AlgorithmKind::VRQL;
    if (name == "ql") return AlgorithmKind::QL;
    if (name == "ql_pr") return AlgorithmKind::QLPR;
    throw ConfigError("unknown algorithm '" + name + "' (expected cq | vrcq | vrql | ql | ql_pr)");
}

std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::CQ: return "cq";
        case AlgorithmKind::VRCQ: return "vrcq";
        case AlgorithmKind::VRQL: return "vrql";
        case AlgorithmKind::QL: return "ql";
        case AlgorithmKind::QLPR: return "ql_pr";
    }
    return "?";
}

bool is_epoch_based(AlgorithmKind kind) {
    return kind == AlgorithmKind::VRCQ || kind == AlgorithmKind::VRQL;
}

}  // namespace vrcq
