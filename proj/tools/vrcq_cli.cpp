#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vrcq/error.hpp"
#include "vrcq/harness.hpp"
#include "vrcq/mdp.hpp"
#include "vrcq/operators.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

extern "C" void on_sigint(int) { vrcq::request_stop(); }

nlohmann::json table_json(const vrcq::QTable& q) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t x = 0; x < q.num_states(); ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t u = 0; u < q.num_actions(); ++u) row.push_back(q(x, u));
        rows.push_back(row);
    }
    return rows;
}

struct RunArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string output;
    bool full_scale = false;
};

vrcq::ExperimentConfig resolve_config(const RunArgs& a) {
    vrcq::ExperimentConfig c = vrcq::load_config(a.config_path);
    if (a.full_scale) {
        c.gammas = {0.96, 0.97, 0.98, 0.99, 0.995, 0.997};
        c.trials = 500;
    }
    for (const auto& kv : a.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw vrcq::ConfigError("--set expects key=value, got " + kv);
        vrcq::apply_config_entry(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (const char* env = std::getenv("VRCQ_SEED"); env != nullptr && *env != '\0') {
        vrcq::apply_config_entry(c, "seed", env);
    }
    if (a.seed) c.root_seed = *a.seed;
    if (!a.output.empty()) c.output = a.output;
    vrcq::validate_config(c);
    return c;
}

void write_or_print(const vrcq::SweepResult& r, const vrcq::ExperimentConfig& c) {
    if (!c.output.empty()) {
        vrcq::emit_results(r, c.output, c.format, c.mode);
    } else if (c.format == "json") {
        std::cout << vrcq::results_to_json(r) << '\n';
    } else {
        std::cout << vrcq::results_to_csv(r, c.mode);
    }
    for (const auto& f : r.fits) {
        std::fprintf(stderr, "slope %s beta=%g: %.4f (intercept %.4f)\n", f.algorithm.c_str(),
                     f.beta, f.slope, f.intercept);
    }
    if (r.interrupted) std::fprintf(stderr, "interrupted: partial results written\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cascade Q-learning simulations under a generative model"};
    app.require_subcommand(1);

    std::string instance_path;
    auto* solve = app.add_subcommand("solve", "Print the optimal Q-table of an instance");
    solve->add_option("instance", instance_path, "Instance JSON")->required();
    double solve_tol = 1e-10;
    solve->add_option("--tol", solve_tol, "Bellman residual target");

    auto* measures = app.add_subcommand("measures", "Print v, rho and span(Q*) as JSON");
    measures->add_option("instance", instance_path, "Instance JSON")->required();

    RunArgs args;
    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("config", args.config_path, "Config file")->required();
        sub->add_option("--set", args.overrides, "Override a config entry (key=value)");
        sub->add_option("--seed", args.seed, "Root seed (overrides VRCQ_SEED and the config)");
        sub->add_option("-o,--output", args.output, "Output path");
        sub->add_flag("--full-scale", args.full_scale,
                      "Use the gamma grid up to 0.997 and 500 trials");
    };
    auto* run = app.add_subcommand("run", "Run one algorithm at the first grid point");
    add_run_options(run);
    auto* sweep = app.add_subcommand("sweep", "Run the full grid");
    add_run_options(sweep);

    std::size_t g_states = 0, g_actions = 0, g_branch = 0;
    std::uint64_t g_seed = 0;
    double g_gamma = 0.9, g_sigma = 0.0;
    std::string g_out;
    auto* gen = app.add_subcommand("garnet", "Write a Garnet instance as JSON");
    gen->add_option("--states", g_states)->required();
    gen->add_option("--actions", g_actions)->required();
    gen->add_option("--branch", g_branch)->required();
    gen->add_option("--seed", g_seed)->required();
    gen->add_option("--gamma", g_gamma);
    gen->add_option("--sigma-r", g_sigma);
    gen->add_option("-o,--output", g_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*solve) {
            const auto mdp = vrcq::load_mdp(instance_path);
            const auto q = vrcq::exact_optimal_q(mdp, solve_tol);
            std::cout << nlohmann::json{{"q", table_json(q)},
                                        {"policy", vrcq::greedy_policy(q).action_of}}.dump(2)
                      << '\n';
        } else if (*measures) {
            const auto m = vrcq::complexity_measures(vrcq::load_mdp(instance_path));
            std::cout << nlohmann::json{{"v", m.v}, {"rho", m.rho}, {"span", m.span_theta}}.dump(2)
                      << '\n';
        } else if (*gen) {
            vrcq::save_mdp(vrcq::garnet(g_states, g_actions, g_branch, g_seed, g_gamma, g_sigma),
                           g_out);
        } else {
            auto c = resolve_config(args);
            if (*run) {
                c.algorithms.resize(1);
                c.gammas.resize(1);
                c.betas.resize(1);
            }
            std::signal(SIGINT, on_sigint);
            write_or_print(vrcq::run_sweep(c), c);
        }
    } catch (const vrcq::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const vrcq::ModelError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitConfig;
    } catch (const vrcq::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
