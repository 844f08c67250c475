#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <map>
#include <sstream>

#include "gchr/env/goal_env.hpp"
#include "gchr/env/tabular_mdp.hpp"
#include "gchr/errors.hpp"
#include "gchr/harness/config.hpp"
#include "gchr/harness/training.hpp"
#include "gchr/nn/checkpoint.hpp"
#include "gchr/tabular/occupancy.hpp"
#include "gchr/tabular/verify.hpp"

namespace py = pybind11;
using namespace gchr;

namespace {

// Stateful wrapper: owns the rng and the current episode state.
class PyEnv {
 public:
  PyEnv(const std::string& name, int horizon, double success_tolerance, double action_noise_std,
        std::uint64_t seed)
      : rng_(seed) {
    env::EnvOverrides o;
    o.horizon = horizon;
    o.success_tolerance = success_tolerance;
    o.action_noise_std = action_noise_std;
    env_ = env::make_env(name, o);
  }

  py::dict reset() {
    state_ = env_->reset(rng_);
    started_ = true;
    return observation();
  }

  py::tuple step(const nn::Vector& action) {
    if (!started_) throw ContractViolation("step() before reset()");
    const auto res = env_->step(state_, action, rng_);
    state_ = res.next;
    return py::make_tuple(observation(), res.reward, res.done, res.success);
  }

  py::dict observation() const {
    py::dict d;
    d["state"] = state_.state;
    d["achieved_goal"] = state_.achieved_goal;
    d["desired_goal"] = state_.desired_goal;
    d["step"] = state_.step_index;
    return d;
  }

  const env::GoalEnv& env() const { return *env_; }

 private:
  std::unique_ptr<env::GoalEnv> env_;
  env::Rng rng_;
  env::GoalEnvState state_;
  bool started_ = false;
};

harness::ExperimentConfig make_config(const std::optional<std::filesystem::path>& path,
                                      const std::map<std::string, std::string>& overrides) {
  auto cfg = path ? harness::load_config(*path) : harness::ExperimentConfig{};
  for (const auto& [k, v] : overrides) harness::set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

py::dict row_dict(const harness::EpochRow& r) {
  py::dict d;
  d["epoch"] = r.epoch;
  d["seed"] = r.seed;
  d["success_rate"] = r.success_rate;
  d["mean_return"] = r.mean_return;
  d["critic_loss"] = r.critic_loss;
  d["actor_loss"] = r.actor_loss;
  d["hsr_loss"] = r.hsr_loss;
  d["hgr_loss"] = r.hgr_loss;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gchr, m) {
  m.doc() = "Goal-conditioned actor-critic with hindsight regularizers";

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<PyEnv>(m, "Env")
      .def(py::init<const std::string&, int, double, double, std::uint64_t>(), py::arg("name"),
           py::arg("horizon") = 0, py::arg("success_tolerance") = 0.0,
           py::arg("action_noise_std") = 0.0, py::arg("seed") = 0)
      .def("reset", &PyEnv::reset)
      .def("step", &PyEnv::step, py::arg("action"),
           "Returns (observation, reward, done, success).")
      .def_property_readonly("name", [](const PyEnv& e) { return e.env().name(); })
      .def_property_readonly("state_dim", [](const PyEnv& e) { return e.env().spec().state_dim; })
      .def_property_readonly("action_dim", [](const PyEnv& e) { return e.env().spec().action_dim; })
      .def_property_readonly("goal_dim", [](const PyEnv& e) { return e.env().spec().goal_dim; })
      .def_property_readonly("horizon", [](const PyEnv& e) { return e.env().spec().horizon; })
      .def("phi", [](const PyEnv& e, const nn::Vector& s) { return e.env().phi(s); });

  m.def("config_keys", &harness::config_keys);
  m.def(
      "config_text",
      [](const std::optional<std::filesystem::path>& path,
         const std::map<std::string, std::string>& overrides) {
        std::ostringstream out;
        harness::write_config(out, make_config(path, overrides));
        return out.str();
      },
      py::arg("config") = py::none(), py::arg("overrides") = std::map<std::string, std::string>{},
      "Resolved configuration in the INI format.");

  m.def(
      "train",
      [](const std::optional<std::filesystem::path>& path,
         const std::map<std::string, std::string>& overrides) {
        const auto cfg = make_config(path, overrides);
        harness::RunResult run;
        {
          py::gil_scoped_release release;
          run = harness::run_training(cfg);
        }
        py::list seeds;
        for (const auto& s : run.seeds) {
          py::dict d;
          d["seed"] = s.seed;
          d["failed"] = s.failed;
          d["error"] = s.error;
          d["dir"] = s.dir;
          py::list rows;
          for (const auto& r : s.rows) rows.append(row_dict(r));
          d["rows"] = rows;
          seeds.append(d);
        }
        py::dict out;
        out["dir"] = run.dir;
        out["seeds"] = seeds;
        return out;
      },
      py::arg("config") = py::none(), py::arg("overrides") = std::map<std::string, std::string>{},
      "Trains every seed of the configuration and returns the per-epoch metrics.");

  m.def(
      "evaluate",
      [](const std::filesystem::path& checkpoint, const std::string& env_name, int n,
         std::uint64_t seed) {
        const auto actor = nn::load_mlp(checkpoint);
        const auto env = env::make_env(env_name);
        const auto res = harness::run_eval(actor, *env, n, seed);
        return py::make_tuple(res.success_rate, res.mean_return);
      },
      py::arg("checkpoint"), py::arg("env"), py::arg("n") = 100, py::arg("seed") = 0,
      "Mean-action rollouts of a saved actor; returns (success_rate, mean_return).");

  py::class_<env::TabularGCMDP>(m, "TabularGCMDP")
      .def_property_readonly("n_states", &env::TabularGCMDP::n_states)
      .def_property_readonly("n_actions", &env::TabularGCMDP::n_actions)
      .def_property_readonly("n_goals", &env::TabularGCMDP::n_goals)
      .def_property_readonly("gamma", &env::TabularGCMDP::gamma)
      .def_property_readonly("phi", &env::TabularGCMDP::phi_table)
      .def("__str__", [](const env::TabularGCMDP& mdp) {
        std::ostringstream out;
        env::write_tabular_gcmdp(out, mdp);
        return out.str();
      });

  m.def("load_gcmdp", &env::load_tabular_gcmdp, py::arg("path"));
  m.def(
      "parse_gcmdp",
      [](const std::string& text) {
        std::istringstream in(text);
        return env::parse_tabular_gcmdp(in);
      },
      py::arg("text"));

  m.def(
      "occupancy",
      [](const env::TabularGCMDP& mdp, int goal) {
        const auto t = tabular::compute_occupancy(mdp, tabular::TabularPolicy::uniform(mdp), goal);
        py::dict d;
        d["d_marginal"] = t.d_marginal;
        d["d_action"] = t.d_action;
        d["p_goal"] = t.p_goal;
        d["q"] = Eigen::VectorXd(t.p_goal_action / (1.0 - t.gamma));
        d["v"] = tabular::values_from_occupancy(t);
        d["first_hit"] = t.first_hit;
        d["hit_mass"] = t.hit_mass;
        return d;
      },
      py::arg("mdp"), py::arg("goal"),
      "Occupancy tables of the uniform policy pursuing `goal`.");

  m.def(
      "verify",
      [](const env::TabularGCMDP& mdp, int policy_iterations, std::uint64_t seed) {
        tabular::VerifyOptions opt;
        opt.policy_iterations = policy_iterations;
        opt.seed = seed;
        const auto rep = tabular::verify_tabular_mdp(mdp, opt);
        py::list margins;
        for (const auto& c : rep.margins) {
          py::dict d;
          d["check"] = c.check;
          d["goal"] = c.goal;
          d["value"] = c.value;
          d["threshold"] = c.threshold;
          d["margin"] = c.margin;
          d["pass"] = c.pass;
          margins.append(d);
        }
        return py::make_tuple(rep.all_pass(), margins);
      },
      py::arg("mdp"), py::arg("policy_iterations") = 5, py::arg("seed") = 0,
      "Runs the tabular checks; returns (all_pass, margins).");
}
