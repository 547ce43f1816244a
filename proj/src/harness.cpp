#include "vrcq/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vrcq/error.hpp"

namespace vrcq {

namespace {

std::atomic<bool> g_stop{false};

double budget_for(const ExperimentConfig& c, double gamma) {
    return c.budget_scale / ((1.0 - gamma) * (1.0 - gamma));
}

EpochSchedule schedule_for(const ExperimentConfig& c, const MdpInstance& mdp, double budget) {
    const double gamma = mdp.gamma();
    const std::size_t d = mdp.num_pairs();
    switch (c.schedule) {
        case ScheduleKind::Expected:
            return schedule_expected(c.phi, gamma, d, c.epochs, c.scale);
        case ScheduleKind::HighProb:
            return schedule_high_prob(c.phi, gamma, d, c.epochs, c.delta, c.scale);
        case ScheduleKind::Minimax: {
            const auto mm = schedule_minimax(c.phi, gamma, d, c.delta, c.epsilon,
                                             std::max(mdp.reward_max(), 1e-300));
            EpochSchedule s = mm.init;
            s.epochs.insert(s.epochs.end(), mm.late.epochs.begin(), mm.late.epochs.end());
            return s;
        }
        case ScheduleKind::Budgeted:
            return schedule_budgeted(budget, c.phi, gamma, d, c.min_budget_constant);
        case ScheduleKind::Example1:
            return schedule_example1(gamma, c.example1);
    }
    throw ConfigError("unknown schedule");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json schedule_json(const EpochSchedule& s) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : s.epochs) {
        epochs.push_back({{"step", e.step}, {"epoch_len", e.epoch_len}, {"recenter", e.recenter}});
    }
    return {{"rate", s.rate}, {"epochs", epochs}, {"total_samples", s.total_samples()}};
}

}  // namespace

void request_stop() { g_stop.store(true); }
void clear_stop() { g_stop.store(false); }
bool stop_requested() { return g_stop.load(); }

MdpInstance build_instance(const ExperimentConfig& c, double gamma, double beta) {
    switch (c.instance) {
        case InstanceKind::Garnet:
            return garnet(c.states, c.actions, c.branch, c.instance_seed, gamma, c.sigma_r);
        case InstanceKind::HardTwoState:
            return hard_two_state(gamma, beta);
        case InstanceKind::File: {
            const MdpInstance base = load_mdp(c.instance_file);
            const auto t = base.transitions();
            const auto r = base.rewards();
            return make_mdp(base.num_states(), base.num_actions(),
                            std::vector<double>(t.begin(), t.end()),
                            std::vector<double>(r.begin(), r.end()), gamma, base.sigma_r());
        }
    }
    throw ConfigError("unknown instance kind");
}

GridPoint make_grid_point(const ExperimentConfig& c, AlgorithmKind algorithm, double gamma,
                          double beta) {
    GridPoint p;
    p.algorithm = algorithm;
    p.gamma = gamma;
    p.beta = beta;
    p.mdp = build_instance(c, gamma, beta);
    p.oracle = exact_optimal_q(p.mdp, c.oracle_tol);
    p.budget = budget_for(c, gamma);
    if (is_epoch_based(algorithm)) {
        p.schedule = schedule_for(c, p.mdp, p.budget);
    } else {
        p.iterations = c.iterations > 0 ? c.iterations
                                        : static_cast<std::uint64_t>(std::floor(p.budget));
        if (p.iterations == 0) throw ConfigError("config: budget rule gives zero iterations");
        p.cq_step = c.cq_step > 0.0 ? c.cq_step
                                    : 1.0 / std::sqrt(static_cast<double>(p.iterations));
    }
    return p;
}

TrialTrace run_trial(const ExperimentConfig& c, const GridPoint& point, std::uint64_t trial_id) {
    RngStream stream = spawn_stream(c.root_seed, trial_id);
    const QTable theta0(point.mdp.num_states(), point.mdp.num_actions(), c.theta0);
    RunOptions options;
    options.oracle = &point.oracle;
    options.checkpoint_every = c.checkpoint_every;
    options.inner_checkpoint_every = c.inner_checkpoint_every;

    AlgoOutput out;
    switch (point.algorithm) {
        case AlgorithmKind::CQ:
            out = cq_run(point.mdp, stream, theta0, point.cq_step, point.iterations, options);
            break;
        case AlgorithmKind::VRCQ:
            out = vrcq_run(point.mdp, stream, theta0, point.schedule, options);
            break;
        case AlgorithmKind::VRQL:
            out = vr_q_learning_run(point.mdp, stream, theta0, point.schedule, options);
            break;
        case AlgorithmKind::QL:
            out = q_learning_run(point.mdp, stream, theta0, c.step, point.iterations, false,
                                 options);
            break;
        case AlgorithmKind::QLPR:
            out = q_learning_run(point.mdp, stream, theta0, c.step, point.iterations, true,
                                 options);
            break;
    }
    TrialTrace t;
    t.trial_id = trial_id;
    t.seed = stream.key();
    t.samples_used = out.samples_used;
    t.final_error = linf_distance(out.estimate, point.oracle);
    t.checkpoints = std::move(out.checkpoints);
    return t;
}

TrialTrace run_trial(const ExperimentConfig& c, std::uint64_t trial_id) {
    return run_trial(c, make_grid_point(c, c.algorithms.front(), c.gammas.front(),
                                        c.betas.front()), trial_id);
}

void RunningStats::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

SweepResult run_sweep(const ExperimentConfig& c) {
    validate_config(c);
    std::vector<GridPoint> points;
    for (const auto algo : c.algorithms) {
        const bool uses_beta = c.instance == InstanceKind::HardTwoState;
        const std::vector<double> betas = uses_beta ? c.betas : std::vector<double>{c.betas[0]};
        for (double beta : betas) {
            for (double gamma : c.gammas) points.push_back(make_grid_point(c, algo, gamma, beta));
        }
    }

    const std::size_t jobs = points.size() * c.trials;
    std::vector<std::vector<TrialTrace>> traces(points.size(), std::vector<TrialTrace>(c.trials));
    std::vector<std::vector<char>> done(points.size(), std::vector<char>(c.trials, 0));
    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            if (stop_requested()) return;
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t pi = job / c.trials;
            const std::size_t trial = job % c.trials;
            try {
                traces[pi][trial] = run_trial(c, points[pi], trial);
                done[pi][trial] = 1;
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                request_stop();
                return;
            }
        }
    };
    std::size_t nthreads = c.threads > 0 ? c.threads : std::thread::hardware_concurrency();
    nthreads = std::max<std::size_t>(1, std::min(nthreads, jobs));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    }
    if (first_error) {
        clear_stop();
        std::rethrow_exception(first_error);
    }

    SweepResult result;
    nlohmann::json meta;
    meta["trials"] = c.trials;
    meta["root_seed"] = c.root_seed;
    meta["schedule"] = to_string(c.schedule);
    meta["budget_scale"] = c.budget_scale;
    meta["points"] = nlohmann::json::array();

    for (std::size_t pi = 0; pi < points.size(); ++pi) {
        const bool complete =
            std::all_of(done[pi].begin(), done[pi].end(), [](char d) { return d != 0; });
        if (!complete) {
            result.interrupted = true;
            continue;
        }
        const GridPoint& gp = points[pi];
        PointAggregate agg;
        agg.gamma = gp.gamma;
        agg.beta = gp.beta;
        agg.algorithm = to_string(gp.algorithm);
        agg.trials = c.trials;
        agg.total_samples = traces[pi].front().samples_used;
        RunningStats stats;
        std::vector<RunningStats> path;
        for (const auto& t : traces[pi]) {
            stats.add(t.final_error);
            if (path.size() < t.checkpoints.size()) path.resize(t.checkpoints.size());
            for (std::size_t k = 0; k < t.checkpoints.size(); ++k) {
                path[k].add(t.checkpoints[k].error);
            }
        }
        agg.mean_linf_error = stats.mean();
        agg.std_linf_error = stats.stddev();
        const auto& first_cps = traces[pi].front().checkpoints;
        for (std::size_t k = 0; k < path.size() && k < first_cps.size(); ++k) {
            agg.mean_path.push_back({first_cps[k].samples, path[k].mean()});
        }
        if (gp.mdp.num_actions() == 1) {
            agg.lower_bound = lower_bound_error(complexity_measures(gp.mdp), gp.gamma,
                                                static_cast<double>(agg.total_samples));
        }
        if (c.mode == "raw") agg.traces = std::move(traces[pi]);

        nlohmann::json pm = {{"gamma", gp.gamma}, {"beta", gp.beta},
                             {"algorithm", agg.algorithm}};
        if (is_epoch_based(gp.algorithm)) {
            pm["schedule"] = schedule_json(gp.schedule);
        } else {
            pm["iterations"] = gp.iterations;
            if (gp.algorithm == AlgorithmKind::CQ) pm["cq_step"] = gp.cq_step;
        }
        meta["points"].push_back(pm);
        result.points.push_back(std::move(agg));
    }

    // Lower-bound constant is unknown: pin it so each curve meets the first
    // point of its (algorithm, beta) group.
    std::map<std::pair<std::string, double>, double> scale;
    for (auto& p : result.points) {
        if (!p.lower_bound) continue;
        const auto key = std::make_pair(p.algorithm, p.beta);
        if (!scale.contains(key)) {
            scale[key] = *p.lower_bound > 0.0 ? p.mean_linf_error / *p.lower_bound : 1.0;
        }
        p.lower_bound = *p.lower_bound * scale[key];
    }

    if (c.fit_slope) {
        std::map<std::pair<std::string, double>, std::vector<std::pair<double, double>>> groups;
        for (const auto& p : result.points) {
            if (p.mean_linf_error > 0.0) {
                groups[{p.algorithm, p.beta}].emplace_back(1.0 / (1.0 - p.gamma),
                                                           p.mean_linf_error);
            }
        }
        for (const auto& [key, pts] : groups) {
            std::set<double> xs;
            for (const auto& pt : pts) xs.insert(pt.first);
            if (xs.size() < 2) continue;
            const auto [slope, intercept] = fit_loglog_slope(pts);
            result.fits.push_back({key.first, key.second, slope, intercept});
        }
    }
    meta["interrupted"] = result.interrupted;
    result.metadata_json = meta.dump();
    return result;
}

std::pair<double, double> fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
    std::set<double> xs;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw ModelError("fit_loglog_slope: coordinates must be positive");
        }
        xs.insert(x);
    }
    if (xs.size() < 2) throw ModelError("fit_loglog_slope: need at least two distinct x values");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

std::string results_to_csv(const SweepResult& r, const std::string& mode) {
    std::ostringstream os;
    if (mode == "raw") {
        os << kRawCsvHeader << '\n';
        for (const auto& p : r.points) {
            for (const auto& t : p.traces) {
                os << fmt(p.gamma) << ',' << fmt(p.beta) << ',' << p.algorithm << ','
                   << t.trial_id << ',' << t.seed << ',' << t.samples_used << ','
                   << fmt(t.final_error) << '\n';
            }
        }
        return os.str();
    }
    os << kAggregateCsvHeader << '\n';
    for (const auto& p : r.points) {
        os << fmt(p.gamma) << ',' << fmt(p.beta) << ',' << p.algorithm << ',' << p.trials << ','
           << p.total_samples << ',' << fmt(p.mean_linf_error) << ',' << fmt(p.std_linf_error)
           << ',' << (p.lower_bound ? fmt(*p.lower_bound) : std::string()) << '\n';
    }
    return os.str();
}

std::string results_to_json(const SweepResult& r) {
    nlohmann::json j;
    j["metadata"] = nlohmann::json::parse(r.metadata_json);
    j["interrupted"] = r.interrupted;
    j["points"] = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json pj = {{"gamma", p.gamma},
                             {"beta", p.beta},
                             {"algorithm", p.algorithm},
                             {"trials", p.trials},
                             {"total_samples", p.total_samples},
                             {"mean_linf_error", p.mean_linf_error},
                             {"std_linf_error", p.std_linf_error}};
        pj["lower_bound"] = p.lower_bound ? nlohmann::json(*p.lower_bound) : nlohmann::json();
        nlohmann::json path = nlohmann::json::array();
        for (const auto& cp : p.mean_path) path.push_back({cp.samples, cp.error});
        pj["mean_path"] = path;
        if (!p.traces.empty()) {
            nlohmann::json tj = nlohmann::json::array();
            for (const auto& t : p.traces) {
                tj.push_back({{"trial_id", t.trial_id},
                              {"seed", t.seed},
                              {"samples_used", t.samples_used},
                              {"final_linf_error", t.final_error}});
            }
            pj["traces"] = tj;
        }
        j["points"].push_back(pj);
    }
    j["fits"] = nlohmann::json::array();
    for (const auto& f : r.fits) {
        j["fits"].push_back({{"algorithm", f.algorithm},
                             {"beta", f.beta},
                             {"slope", f.slope},
                             {"intercept", f.intercept}});
    }
    return j.dump(2);
}

namespace {

void write_atomically(const std::string& path, const std::string& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("emit_results: cannot open " + tmp + " for writing");
        out << body;
        out.flush();
        if (!out) throw std::runtime_error("emit_results: write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("emit_results: cannot move " + tmp + " to " + path + ": " +
                                     ec.message());
}

}  // namespace

void emit_results(const SweepResult& r, const std::string& path, const std::string& format,
                  const std::string& mode) {
    if (format == "csv") {
        write_atomically(path, results_to_csv(r, mode));
        // CSV has no room for the schedule metadata; it goes beside the table.
        write_atomically(path + ".meta.json", r.metadata_json + "\n");
    } else if (format == "json") {
        write_atomically(path, results_to_json(r));
    } else {
        throw ConfigError("emit_results: unknown format '" + format + "'");
    }
}

std::vector<PointAggregate> parse_results_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kAggregateCsvHeader) {
        throw ConfigError("results CSV: missing or unexpected header");
    }
    std::vector<PointAggregate> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 8) throw ConfigError("results CSV: expected 8 columns in '" + line + "'");
        PointAggregate p;
        p.gamma = std::stod(f[0]);
        p.beta = std::stod(f[1]);
        p.algorithm = f[2];
        p.trials = std::stoull(f[3]);
        p.total_samples = std::stoull(f[4]);
        p.mean_linf_error = std::stod(f[5]);
        p.std_linf_error = std::stod(f[6]);
        if (!f[7].empty()) p.lower_bound = std::stod(f[7]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace vrcq
