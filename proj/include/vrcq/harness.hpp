#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vrcq/algorithms.hpp"
#include "vrcq/mdp.hpp"
#include "vrcq/operators.hpp"
#include "vrcq/schedules.hpp"

namespace vrcq {

enum class InstanceKind { Garnet, HardTwoState, File };

/// Everything needed to reproduce an experiment: instance family, algorithm,
/// schedule, trial count and seeds, grid, budget rule and output.
///
/// Grid points are the product algorithms x betas x gammas. `betas` only
/// matter for the two-state instance.
struct ExperimentConfig {
    InstanceKind instance = InstanceKind::HardTwoState;
    std::size_t states = 20;
    std::size_t actions = 2;
    std::size_t branch = 2;
    std::uint64_t instance_seed = 1;
    double sigma_r = 0.0;
    std::string instance_file;

    std::vector<AlgorithmKind> algorithms{AlgorithmKind::VRCQ};
    ScheduleKind schedule = ScheduleKind::Example1;
    double phi = 0.9;
    std::size_t epochs = 3;
    double delta = 0.1;
    double epsilon = 0.1;
    ScheduleScale scale;
    double min_budget_constant = 16.0;
    FixedConstantPreset example1;

    /// N = budget_scale / (1-gamma)^2; also the iteration count of the
    /// non-epoch algorithms unless `iterations` is set.
    double budget_scale = 100.0;
    std::uint64_t iterations = 0;
    StepPolicy step = StepPolicy::polynomial(-0.5);
    double cq_step = 0.0;  ///< 0: 1/sqrt(iterations)
    double theta0 = 0.0;   ///< constant initial table

    std::size_t trials = 100;
    std::uint64_t root_seed = 0;
    std::vector<double> gammas{0.96, 0.97, 0.98, 0.99};
    std::vector<double> betas{0.0};
    double oracle_tol = 1e-10;

    std::uint64_t checkpoint_every = 1000;
    std::uint64_t inner_checkpoint_every = 0;
    std::size_t threads = 0;  ///< 0: hardware concurrency
    bool fit_slope = true;

    std::string output;
    std::string format = "csv";     ///< csv | json
    std::string mode = "aggregate";  ///< aggregate | raw
};

/// Parse the `key = value` config format ('#' starts a comment, lists are
/// comma separated). Throws ConfigError naming the offending line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Apply one `key=value` assignment on top of an existing config.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);
/// Check the cross-field invariants (trials >= 1, grid inside (0,1), ...).
void validate_config(const ExperimentConfig& config);

/// One (algorithm, beta, gamma) point of a sweep, with everything that is
/// shared across its trials precomputed.
struct GridPoint {
    AlgorithmKind algorithm = AlgorithmKind::VRCQ;
    double gamma = 0.0;
    double beta = 0.0;
    MdpInstance mdp;
    QTable oracle;
    EpochSchedule schedule;  ///< empty for non-epoch algorithms
    std::uint64_t iterations = 0;  ///< non-epoch algorithms
    double cq_step = 0.0;
    double budget = 0.0;  ///< N for this point
};

GridPoint make_grid_point(const ExperimentConfig& config, AlgorithmKind algorithm, double gamma,
                          double beta);
/// Instance a config describes at the given grid coordinates.
MdpInstance build_instance(const ExperimentConfig& config, double gamma, double beta);

struct TrialTrace {
    std::uint64_t trial_id = 0;
    std::uint64_t seed = 0;  ///< key of the trial's stream
    std::uint64_t samples_used = 0;
    double final_error = 0.0;
    std::vector<Checkpoint> checkpoints;

    friend bool operator==(const TrialTrace&, const TrialTrace&) = default;
};

TrialTrace run_trial(const ExperimentConfig& config, const GridPoint& point,
                     std::uint64_t trial_id);
/// Convenience form on the first grid point of `config`.
TrialTrace run_trial(const ExperimentConfig& config, std::uint64_t trial_id);

/// Welford accumulator.
class RunningStats {
  public:
    void add(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two values.
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double stddev() const;

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct PointAggregate {
    double gamma = 0.0;
    double beta = 0.0;
    std::string algorithm;
    std::size_t trials = 0;
    std::uint64_t total_samples = 0;
    double mean_linf_error = 0.0;
    double std_linf_error = 0.0;
    std::optional<double> lower_bound;
    /// Mean error at each checkpoint index, over trials.
    std::vector<Checkpoint> mean_path;
    std::vector<TrialTrace> traces;
};

struct SlopeFit {
    std::string algorithm;
    double beta = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

struct SweepResult {
    std::vector<PointAggregate> points;
    std::vector<SlopeFit> fits;
    bool interrupted = false;
    std::string metadata_json = "{}";
};

/// Run trials x grid on a bounded worker pool and fold the traces in
/// trial-id order. Points are listed algorithm-major, then beta, then gamma.
/// On `request_stop()` unfinished points are dropped and `interrupted` is set.
SweepResult run_sweep(const ExperimentConfig& config);

void request_stop();
void clear_stop();
bool stop_requested();

/// Ordinary least squares of log y on log x. Throws ModelError when fewer
/// than two distinct x are given or a coordinate is not positive.
std::pair<double, double> fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Write `result` atomically (temp file + rename). `format` is csv or json;
/// `mode` is aggregate (one row per grid point) or raw (one per trial).
/// CSV output also writes the run metadata to `<path>.meta.json`.
void emit_results(const SweepResult& result, const std::string& path,
                  const std::string& format = "csv", const std::string& mode = "aggregate");
std::string results_to_csv(const SweepResult& result, const std::string& mode = "aggregate");
std::string results_to_json(const SweepResult& result);
/// Parse an aggregate-mode CSV back into point aggregates.
std::vector<PointAggregate> parse_results_csv(const std::string& text);

inline constexpr const char* kAggregateCsvHeader =
    "gamma,beta,algorithm,trials,total_samples,mean_linf_error,std_linf_error,lower_bound";
inline constexpr const char* kRawCsvHeader =
    "gamma,beta,algorithm,trial_id,seed,samples_used,final_linf_error";

}  // namespace vrcq
