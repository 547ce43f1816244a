#include "vrcq/schedules.hpp"

#include <cmath>
#include <string>

#include "vrcq/error.hpp"

namespace vrcq {

namespace {

void check_rates(const char* who, double phi, double gamma, std::size_t num_pairs) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw ModelError(std::string(who) + ": phi must lie in (0,1)");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ModelError(std::string(who) + ": gamma must lie in (0,1)");
    }
    if (num_pairs < 1) throw ModelError(std::string(who) + ": D must be >= 1");
}

void check_scale(const char* who, const ScheduleScale& s) {
    if (!(s.epoch_len > 0.0) || !(s.recenter > 0.0) || !(s.step > 0.0)) {
        throw ModelError(std::string(who) + ": schedule scale factors must be positive");
    }
}

std::uint64_t ceil_count(double x) {
    if (!std::isfinite(x) || x > 9.0e18) throw NumericError("schedule: sample count overflows");
    const double c = std::ceil(x);
    return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

double step_for(std::uint64_t epoch_len, double step_scale) {
    const double lambda = step_scale / std::sqrt(static_cast<double>(epoch_len));
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw ModelError("schedule: step size " + std::to_string(lambda) +
                         " falls outside (0,1); lower the step scale");
    }
    return lambda;
}

// Construction-time self check: ceilings must dominate the real formulas.
void verify_at_least(std::uint64_t got, double bound, const char* what, std::size_t m) {
    if (static_cast<double>(got) < bound) {
        throw NumericError(std::string("schedule self-check failed: ") + what + "(" +
                           std::to_string(m) + ")");
    }
}

double one_minus_sq(double gamma) { return (1.0 - gamma) * (1.0 - gamma); }

EpochSchedule high_prob_epochs(double phi, double gamma, std::size_t num_pairs,
                               std::size_t num_epochs, double delta, const ScheduleScale& scale) {
    EpochSchedule s;
    s.rate = phi;
    if (num_epochs == 0) return s;
    const double d = static_cast<double>(num_pairs);
    const double m_total = static_cast<double>(num_epochs);
    const double g2 = one_minus_sq(gamma);
    const double beta = 10.0 * m_total * d / delta;
    for (std::size_t m = 0; m < num_epochs; ++m) {
        const double pm = std::pow(phi, static_cast<double>(m));
        const double k = phi * phi * (2.0 - pm) * (2.0 - pm) * g2;
        const double nt_real =
            scale.recenter * 32.0 * std::log(beta) / (std::pow(phi, 2.0 * m + 2.0) * g2);
        const double alpha = scale.epoch_len * 169.0 / k;
        const double ne_real = log_inequality_sufficient(alpha, beta);
        EpochParams e;
        e.recenter = ceil_count(nt_real);
        e.epoch_len = ceil_count(ne_real);
        e.step = step_for(e.epoch_len, scale.step);
        verify_at_least(e.recenter, nt_real, "N_T", m);
        const double ne = static_cast<double>(e.epoch_len);
        verify_at_least(e.epoch_len, alpha * std::log(beta * ne), "N_e", m);
        s.epochs.push_back(e);
    }
    return s;
}

}  // namespace

std::uint64_t EpochSchedule::total_samples() const {
    std::uint64_t total = 0;
    for (const auto& e : epochs) total += e.epoch_len + e.recenter;
    return total;
}

EpochSchedule schedule_expected(double phi, double gamma, std::size_t num_pairs,
                                std::size_t num_epochs, const ScheduleScale& scale) {
    check_rates("schedule_expected", phi, gamma, num_pairs);
    check_scale("schedule_expected", scale);
    if (num_epochs < 1) throw ModelError("schedule_expected: M must be >= 1");
    const double log2d = std::log(2.0 * static_cast<double>(num_pairs));
    const double g2 = one_minus_sq(gamma);
    EpochSchedule s;
    s.rate = phi;
    for (std::size_t m = 0; m < num_epochs; ++m) {
        const double pm = std::pow(phi, static_cast<double>(m));
        const double nt_real =
            scale.recenter * 32.0 * log2d / (std::pow(phi, 2.0 * m + 2.0) * g2);
        const double ne_real =
            scale.epoch_len * 169.0 * log2d / (phi * phi * (2.0 - pm) * (2.0 - pm) * g2);
        EpochParams e;
        e.recenter = ceil_count(nt_real);
        e.epoch_len = ceil_count(ne_real);
        e.step = step_for(e.epoch_len, scale.step);
        verify_at_least(e.recenter, nt_real, "N_T", m);
        verify_at_least(e.epoch_len, ne_real, "N_e", m);
        s.epochs.push_back(e);
    }
    return s;
}

double log_inequality_sufficient(double alpha, double beta) {
    return std::max(alpha, 2.0 * alpha * std::log(alpha * beta));
}

EpochSchedule schedule_high_prob(double phi, double gamma, std::size_t num_pairs,
                                 std::size_t num_epochs, double delta,
                                 const ScheduleScale& scale) {
    check_rates("schedule_high_prob", phi, gamma, num_pairs);
    check_scale("schedule_high_prob", scale);
    if (num_epochs < 1) throw ModelError("schedule_high_prob: M must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ModelError("schedule_high_prob: delta must lie in (0,1)");
    }
    return high_prob_epochs(phi, gamma, num_pairs, num_epochs, delta, scale);
}

MinimaxSchedule schedule_minimax(double phi, double gamma, std::size_t num_pairs, double delta,
                                 double epsilon, double r_max) {
    check_rates("schedule_minimax", phi, gamma, num_pairs);
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ModelError("schedule_minimax: delta must lie in (0,1)");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ModelError("schedule_minimax: epsilon must be positive");
    }
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
        throw ModelError("schedule_minimax: r_max must be positive");
    }
    const double log_inv_phi = std::log(1.0 / phi);
    const double root = std::sqrt(1.0 - gamma);
    MinimaxSchedule out;
    out.c_bar = 4.0 * std::sqrt(2.0) * std::log(2.0) / r_max + 1.0;
    out.init_epochs_real = std::log(1.0 / root) / log_inv_phi;
    out.late_epochs_real = std::log(out.c_bar * r_max / (root * epsilon)) / log_inv_phi;
    const auto m_init = static_cast<std::size_t>(std::ceil(out.init_epochs_real));
    // Guard against a boundary epsilon landing a hair above an integer.
    const double late = std::ceil(out.late_epochs_real - 1e-9);
    const auto m_late = late > 0.0 ? static_cast<std::size_t>(late) : std::size_t{0};
    out.init = high_prob_epochs(phi, gamma, num_pairs, m_init, delta, {});
    out.late = high_prob_epochs(phi, gamma, num_pairs, m_late, delta, {});
    return out;
}

double budgeted_epochs_real(double total_samples, double phi, double gamma,
                            std::size_t num_pairs) {
    const double log2d = std::log(2.0 * static_cast<double>(num_pairs));
    const double arg = std::sqrt(1.0 - phi * phi) * (1.0 - gamma) * std::sqrt(total_samples) /
                       (8.0 * std::sqrt(gamma * log2d));
    return std::log(arg) / std::log(1.0 / phi);
}

EpochSchedule schedule_budgeted(double total_samples, double phi, double gamma,
                                std::size_t num_pairs, double min_budget_constant) {
    check_rates("schedule_budgeted", phi, gamma, num_pairs);
    const double d = static_cast<double>(num_pairs);
    const double g2 = one_minus_sq(gamma);
    const double min_budget = min_budget_constant * gamma * std::log(d) / g2;
    if (!(total_samples >= min_budget) || !(total_samples > 0.0)) {
        throw ModelError("schedule_budgeted: budget " + std::to_string(total_samples) +
                         " is below the minimum sample size " + std::to_string(min_budget));
    }
    const double m_real = budgeted_epochs_real(total_samples, phi, gamma, num_pairs);
    const auto num_epochs =
        m_real < 1.0 ? std::size_t{1} : static_cast<std::size_t>(std::floor(m_real));
    const double log2d = std::log(2.0 * d);
    const double ne_real = 169.0 * log2d / (phi * phi * g2);
    EpochSchedule s;
    s.rate = phi;
    for (std::size_t m = 0; m < num_epochs; ++m) {
        EpochParams e;
        e.recenter = ceil_count(32.0 * gamma * log2d / (std::pow(phi, 2.0 * m + 2.0) * g2));
        e.epoch_len = ceil_count(ne_real);
        e.step = step_for(e.epoch_len, 1.0);
        s.epochs.push_back(e);
    }
    if (static_cast<double>(s.total_samples()) > total_samples) {
        throw ModelError("schedule_budgeted: budget " + std::to_string(total_samples) +
                         " is below the minimum sample size: schedule needs " +
                         std::to_string(s.total_samples()));
    }
    return s;
}

EpochSchedule schedule_example1(double gamma, const FixedConstantPreset& preset) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ModelError("schedule_example1: gamma in (0,1)");
    if (!(preset.phi > 0.0 && preset.phi < 1.0) || preset.num_epochs < 1) {
        throw ModelError("schedule_example1: need phi in (0,1) and M >= 1");
    }
    const double g2 = one_minus_sq(gamma);
    EpochSchedule s;
    s.rate = preset.phi;
    for (std::size_t m = 0; m < preset.num_epochs; ++m) {
        EpochParams e;
        e.recenter = ceil_count(preset.recenter_constant /
                                (std::pow(preset.phi, 2.0 * static_cast<double>(m)) * g2));
        e.epoch_len = ceil_count(preset.epoch_len_constant / g2);
        e.step = step_for(e.epoch_len, 1.0);
        s.epochs.push_back(e);
    }
    return s;
}

ScheduleKind parse_schedule_kind(const std::string& name) {
    if (name == "expected") return ScheduleKind::Expected;
    if (name == "high_prob") return ScheduleKind::HighProb;
    if (name == "minimax") return ScheduleKind::Minimax;
    if (name == "budgeted") return ScheduleKind::Budgeted;
    if (name == "example1") return ScheduleKind::Example1;
    throw ConfigError("unknown schedule '" + name +
                      "' (expected | high_prob | minimax | budgeted | example1)");
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::Expected: return "expected";
        case ScheduleKind::HighProb: return "high_prob";
        case ScheduleKind::Minimax: return "minimax";
        case ScheduleKind::Budgeted: return "budgeted";
        case ScheduleKind::Example1: return "example1";
    }
    return "?";
}

}  // namespace vrcq
