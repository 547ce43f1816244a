#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vrcq/algorithms.hpp"
#include "vrcq/error.hpp"
#include "vrcq/harness.hpp"
#include "vrcq/mdp.hpp"
#include "vrcq/operators.hpp"
#include "vrcq/schedules.hpp"

namespace py = pybind11;
using namespace vrcq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const QTable& q) {
    Array out({q.num_states(), q.num_actions()});
    auto v = q.values();
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

QTable from_numpy(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-d array of shape (states, actions)");
    const auto x = static_cast<std::size_t>(a.shape(0));
    const auto u = static_cast<std::size_t>(a.shape(1));
    return QTable(x, u, std::vector<double>(a.data(), a.data() + a.size()));
}

QTable table_or_zero(const MdpInstance& mdp, const std::optional<Array>& a) {
    return a ? from_numpy(*a) : QTable(mdp.num_states(), mdp.num_actions());
}

py::dict run_output(const AlgoOutput& out) {
    py::list cps;
    for (const auto& c : out.checkpoints) cps.append(py::make_tuple(c.samples, c.error));
    py::dict d;
    d["estimate"] = to_numpy(out.estimate);
    d["samples_used"] = out.samples_used;
    d["checkpoints"] = cps;
    return d;
}

RunOptions options_for(const std::optional<Array>& oracle, QTable& holder) {
    RunOptions o;
    if (oracle) {
        holder = from_numpy(*oracle);
        o.oracle = &holder;
    }
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cascade Q-learning and variance-reduced cascade Q-learning on tabular MDPs.";

    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<MdpInstance>(m, "Mdp")
        .def(py::init([](Array transitions, Array rewards, double gamma, double sigma_r) {
                 if (transitions.ndim() != 3 || rewards.ndim() != 2) {
                     throw py::value_error("transitions must be (X,U,X) and rewards (X,U)");
                 }
                 const auto x = static_cast<std::size_t>(transitions.shape(0));
                 const auto u = static_cast<std::size_t>(transitions.shape(1));
                 return make_mdp(
                     x, u,
                     std::vector<double>(transitions.data(), transitions.data() + transitions.size()),
                     std::vector<double>(rewards.data(), rewards.data() + rewards.size()), gamma,
                     sigma_r);
             }),
             py::arg("transitions"), py::arg("rewards"), py::arg("gamma"), py::arg("sigma_r") = 0.0)
        .def_property_readonly("num_states", &MdpInstance::num_states)
        .def_property_readonly("num_actions", &MdpInstance::num_actions)
        .def_property_readonly("gamma", &MdpInstance::gamma)
        .def_property_readonly("sigma_r", &MdpInstance::sigma_r)
        .def_property_readonly("rewards", [](const MdpInstance& s) { return to_numpy(s.reward_table()); })
        .def_property_readonly("transitions",
                               [](const MdpInstance& s) {
                                   Array out({s.num_states(), s.num_actions(), s.num_states()});
                                   auto t = s.transitions();
                                   std::copy(t.begin(), t.end(), out.mutable_data());
                                   return out;
                               })
        .def("to_json", [](const MdpInstance& s) { return mdp_to_json(s); })
        .def_static("from_json", &mdp_from_json)
        .def("__eq__", [](const MdpInstance& a, const MdpInstance& b) { return a == b; });

    m.def("garnet", &garnet, py::arg("states"), py::arg("actions"), py::arg("branch"),
          py::arg("seed"), py::arg("gamma") = 0.9, py::arg("sigma_r") = 0.0);
    m.def("hard_two_state", &hard_two_state, py::arg("gamma"), py::arg("beta") = 0.0);

    m.def("exact_optimal_q",
          [](const MdpInstance& mdp, double tol) { return to_numpy(exact_optimal_q(mdp, tol)); },
          py::arg("mdp"), py::arg("tol") = 1e-10);
    m.def("policy_eval_direct", [](const MdpInstance& mdp) { return to_numpy(policy_eval_direct(mdp)); });
    m.def("bellman", [](const MdpInstance& mdp, Array q) { return to_numpy(bellman(mdp, from_numpy(q))); });
    m.def("greedy_policy", [](Array q) { return greedy_policy(from_numpy(q)).action_of; });
    m.def("complexity_measures", [](const MdpInstance& mdp) {
        const auto c = complexity_measures(mdp);
        py::dict d;
        d["v"] = c.v;
        d["rho"] = c.rho;
        d["span"] = c.span_theta;
        return d;
    });

    py::class_<EpochParams>(m, "EpochParams")
        .def_readonly("step", &EpochParams::step)
        .def_readonly("epoch_len", &EpochParams::epoch_len)
        .def_readonly("recenter", &EpochParams::recenter)
        .def("__repr__", [](const EpochParams& e) {
            return "EpochParams(step=" + std::to_string(e.step) +
                   ", epoch_len=" + std::to_string(e.epoch_len) +
                   ", recenter=" + std::to_string(e.recenter) + ")";
        });
    py::class_<EpochSchedule>(m, "EpochSchedule")
        .def(py::init([](double rate, const std::vector<std::tuple<double, std::uint64_t, std::uint64_t>>& epochs) {
                 EpochSchedule s;
                 s.rate = rate;
                 for (const auto& [step, len, rec] : epochs) s.epochs.push_back({step, len, rec});
                 return s;
             }),
             py::arg("rate"), py::arg("epochs"))
        .def_readonly("rate", &EpochSchedule::rate)
        .def_readonly("epochs", &EpochSchedule::epochs)
        .def_property_readonly("total_samples", &EpochSchedule::total_samples)
        .def("__len__", &EpochSchedule::num_epochs);

    m.def("schedule_expected",
          [](double phi, double gamma, std::size_t d, std::size_t epochs) {
              return schedule_expected(phi, gamma, d, epochs);
          },
          py::arg("phi"), py::arg("gamma"), py::arg("num_pairs"), py::arg("epochs"));
    m.def("schedule_high_prob",
          [](double phi, double gamma, std::size_t d, std::size_t epochs, double delta) {
              return schedule_high_prob(phi, gamma, d, epochs, delta);
          },
          py::arg("phi"), py::arg("gamma"), py::arg("num_pairs"), py::arg("epochs"),
          py::arg("delta"));
    m.def("schedule_example1", [](double gamma) { return schedule_example1(gamma); },
          py::arg("gamma"));

    m.def("cq_run",
          [](const MdpInstance& mdp, std::uint64_t seed, double step, std::uint64_t n_iters,
             std::optional<Array> theta0, std::optional<Array> oracle) {
              QTable holder;
              auto stream = RngStream(mix64(seed));
              return run_output(cq_run(mdp, stream, table_or_zero(mdp, theta0), step, n_iters,
                                       options_for(oracle, holder)));
          },
          py::arg("mdp"), py::arg("seed"), py::arg("step"), py::arg("n_iters"),
          py::arg("theta0") = py::none(), py::arg("oracle") = py::none());
    m.def("vrcq_run",
          [](const MdpInstance& mdp, std::uint64_t seed, const EpochSchedule& schedule,
             std::optional<Array> theta0, std::optional<Array> oracle) {
              QTable holder;
              auto stream = RngStream(mix64(seed));
              return run_output(vrcq_run(mdp, stream, table_or_zero(mdp, theta0), schedule,
                                         options_for(oracle, holder)));
          },
          py::arg("mdp"), py::arg("seed"), py::arg("schedule"), py::arg("theta0") = py::none(),
          py::arg("oracle") = py::none());
    m.def("vr_q_learning_run",
          [](const MdpInstance& mdp, std::uint64_t seed, const EpochSchedule& schedule,
             std::optional<Array> theta0, std::optional<Array> oracle) {
              QTable holder;
              auto stream = RngStream(mix64(seed));
              return run_output(vr_q_learning_run(mdp, stream, table_or_zero(mdp, theta0), schedule,
                                                  options_for(oracle, holder)));
          },
          py::arg("mdp"), py::arg("seed"), py::arg("schedule"), py::arg("theta0") = py::none(),
          py::arg("oracle") = py::none());
    m.def("q_learning_run",
          [](const MdpInstance& mdp, std::uint64_t seed, std::uint64_t n_iters, double eta,
             bool pr_average, std::optional<Array> theta0) {
              auto stream = RngStream(mix64(seed));
              const auto step = eta == 0.0 ? StepPolicy::rescaled_linear() : StepPolicy::polynomial(eta);
              return run_output(q_learning_run(mdp, stream, table_or_zero(mdp, theta0), step,
                                               n_iters, pr_average));
          },
          py::arg("mdp"), py::arg("seed"), py::arg("n_iters"), py::arg("eta") = 0.0,
          py::arg("pr_average") = false, py::arg("theta0") = py::none(),
          "eta = 0 selects the rescaled linear step 1/(1+(1-gamma)n); eta < 0 selects n^eta.");

    m.def("run_sweep",
          [](const std::string& config_text) {
              const auto r = run_sweep(parse_config(config_text));
              return results_to_csv(r);
          },
          py::arg("config_text"), py::call_guard<py::gil_scoped_release>(),
          "Run a sweep from config text and return the aggregate CSV.");
    m.def("fit_loglog_slope", &fit_loglog_slope, py::arg("points"));
}
