#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "vrcq/error.hpp"
#include "vrcq/harness.hpp"

namespace vrcq {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: '" + key + "' expects a nonnegative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
    if (out.empty()) throw ConfigError("config: '" + key + "' needs at least one value");
    return out;
}

}  // namespace

void apply_config_entry(ExperimentConfig& c, const std::string& raw_key,
                        const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(raw_value);
    if (key == "instance") {
        if (v == "garnet") {
            c.instance = InstanceKind::Garnet;
        } else if (v == "hard_two_state") {
            c.instance = InstanceKind::HardTwoState;
        } else if (v == "file") {
            c.instance = InstanceKind::File;
        } else {
            throw ConfigError("config: instance must be garnet | hard_two_state | file");
        }
    } else if (key == "instance_file") {
        c.instance_file = v;
        c.instance = InstanceKind::File;
    } else if (key == "states") {
        c.states = to_u64(key, v);
    } else if (key == "actions") {
        c.actions = to_u64(key, v);
    } else if (key == "branch") {
        c.branch = to_u64(key, v);
    } else if (key == "instance_seed") {
        c.instance_seed = to_u64(key, v);
    } else if (key == "sigma_r") {
        c.sigma_r = to_double(key, v);
    } else if (key == "algorithm" || key == "algorithms") {
        c.algorithms.clear();
        for (const auto& name : split_list(v)) c.algorithms.push_back(parse_algorithm_kind(name));
        if (c.algorithms.empty()) throw ConfigError("config: algorithm list is empty");
    } else if (key == "schedule") {
        c.schedule = parse_schedule_kind(v);
    } else if (key == "phi") {
        c.phi = to_double(key, v);
    } else if (key == "epochs") {
        c.epochs = to_u64(key, v);
    } else if (key == "delta") {
        c.delta = to_double(key, v);
    } else if (key == "epsilon") {
        c.epsilon = to_double(key, v);
    } else if (key == "scale_epoch_len") {
        c.scale.epoch_len = to_double(key, v);
    } else if (key == "scale_recenter") {
        c.scale.recenter = to_double(key, v);
    } else if (key == "scale_step") {
        c.scale.step = to_double(key, v);
    } else if (key == "min_budget_constant") {
        c.min_budget_constant = to_double(key, v);
    } else if (key == "example1_epochs") {
        c.example1.num_epochs = to_u64(key, v);
    } else if (key == "example1_phi") {
        c.example1.phi = to_double(key, v);
    } else if (key == "example1_recenter") {
        c.example1.recenter_constant = to_double(key, v);
    } else if (key == "example1_epoch_len") {
        c.example1.epoch_len_constant = to_double(key, v);
    } else if (key == "budget_scale") {
        c.budget_scale = to_double(key, v);
    } else if (key == "iterations") {
        c.iterations = to_u64(key, v);
    } else if (key == "step") {
        if (v == "rescaled_linear") {
            c.step.kind = StepPolicy::Kind::RescaledLinear;
        } else if (v == "polynomial") {
            c.step.kind = StepPolicy::Kind::Polynomial;
        } else if (v == "constant") {
            c.step.kind = StepPolicy::Kind::Constant;
        } else {
            throw ConfigError("config: step must be rescaled_linear | polynomial | constant");
        }
    } else if (key == "eta") {
        c.step.eta = to_double(key, v);
    } else if (key == "step_constant") {
        c.step.constant = to_double(key, v);
    } else if (key == "cq_step") {
        c.cq_step = to_double(key, v);
    } else if (key == "theta0") {
        c.theta0 = to_double(key, v);
    } else if (key == "trials") {
        c.trials = to_u64(key, v);
    } else if (key == "seed") {
        c.root_seed = to_u64(key, v);
    } else if (key == "gamma" || key == "gammas") {
        c.gammas = to_doubles(key, v);
    } else if (key == "beta" || key == "betas") {
        c.betas = to_doubles(key, v);
    } else if (key == "oracle_tol") {
        c.oracle_tol = to_double(key, v);
    } else if (key == "checkpoint_every") {
        c.checkpoint_every = to_u64(key, v);
    } else if (key == "inner_checkpoint_every") {
        c.inner_checkpoint_every = to_u64(key, v);
    } else if (key == "threads") {
        c.threads = to_u64(key, v);
    } else if (key == "fit_slope") {
        c.fit_slope = to_bool(key, v);
    } else if (key == "output") {
        c.output = v;
    } else if (key == "format") {
        if (v != "csv" && v != "json") throw ConfigError("config: format must be csv | json");
        c.format = v;
    } else if (key == "mode") {
        if (v != "aggregate" && v != "raw") {
            throw ConfigError("config: mode must be aggregate | raw");
        }
        c.mode = v;
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        try {
            apply_config_entry(c, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        } catch (const ModelError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& c) {
    if (c.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (c.gammas.empty()) throw ConfigError("config: gamma grid is empty");
    for (double g : c.gammas) {
        if (!(g > 0.0 && g < 1.0)) throw ConfigError("config: gamma grid must lie in (0,1)");
    }
    for (double b : c.betas) {
        if (!(b >= 0.0)) throw ConfigError("config: beta must be nonnegative");
    }
    if (!(c.budget_scale > 0.0) && c.iterations == 0) {
        throw ConfigError("config: budget rule must be positive");
    }
    if (c.algorithms.empty()) throw ConfigError("config: no algorithm selected");
    if (c.instance == InstanceKind::File && c.instance_file.empty()) {
        throw ConfigError("config: instance = file needs instance_file");
    }
    if (!(c.oracle_tol > 0.0)) throw ConfigError("config: oracle_tol must be positive");
}

}  // namespace vrcq
