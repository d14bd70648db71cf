// Copyright 2026 The conegrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the allocation, estimation and scenario layers.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conegrasp/checks.hpp"
#include "conegrasp/cone_program.hpp"
#include "conegrasp/contact_geometry.hpp"
#include "conegrasp/estimators.hpp"
#include "conegrasp/harness.hpp"
#include "conegrasp/hand_model.hpp"
#include "conegrasp/scenario.hpp"
#include "conegrasp/socp_solver.hpp"

namespace py = pybind11;
using namespace conegrasp;

namespace {

py::dict metrics_dict(const RunMetrics& m) {
  py::dict d;
  d["success"] = m.success;
  d["f_max_over_g"] = m.f_max_over_g;
  d["g_ratio"] = m.g_ratio;
  d["mu_ratio"] = m.mu_ratio;
  d["max_slip"] = m.max_slip;
  d["max_rotation"] = m.max_rotation;
  return d;
}

py::dict run_dict(const RunResult& r) {
  py::dict d;
  d["completed"] = r.completed;
  d["failure_reason"] = r.failure_reason;
  d["metrics"] = metrics_dict(r.metrics);
  d["contact_fingers"] = r.contact_fingers;
  d["grasp_time"] = r.grasp_time;
  d["total_commanded_normal"] = r.total_commanded_normal;
  d["trace_csv"] = trace_to_csv(r.trace);
  return d;
}

RunOptions make_options(std::optional<std::uint64_t> seed, std::optional<std::string> mode,
                        std::optional<double> eta) {
  RunOptions o;
  o.seed = seed;
  if (mode) o.mode = parse_mode(*mode);
  o.eta = eta;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Friction-cone contact force allocation for multi-fingered grasps";
  m.attr("GRAVITY") = kGravity;

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);

  py::class_<ContactFrame>(m, "ContactFrame")
      .def_readonly("position", &ContactFrame::position)
      .def_readonly("n", &ContactFrame::n)
      .def_readonly("d", &ContactFrame::d)
      .def_readonly("c", &ContactFrame::c)
      .def("__repr__", [](const ContactFrame& f) {
        return "ContactFrame(n=[" + std::to_string(f.n.x()) + ", " + std::to_string(f.n.y()) +
               ", " + std::to_string(f.n.z()) + "])";
      });
  m.def("build_contact_frame", &build_contact_frame, py::arg("point"), py::arg("normal"));
  m.def("local_to_world", &local_to_world, py::arg("frame"), py::arg("force"));
  m.def("world_to_local", &world_to_local, py::arg("frame"), py::arg("force"));

  py::class_<RotationAxis>(m, "RotationAxis")
      .def_static("through", &RotationAxis::through, py::arg("point"), py::arg("direction"))
      .def_readonly("point", &RotationAxis::point)
      .def_readonly("direction", &RotationAxis::direction);
  m.def("slip_displacement", &slip_displacement, py::arg("contact"), py::arg("axis"),
        py::arg("theta"));
  m.def(
      "rotational_slip_bound",
      [](const std::vector<Vec3>& contacts, const RotationAxis& axis, double theta) {
        return rotational_slip_bound(contacts, axis, theta);
      },
      py::arg("contacts"), py::arg("axis"), py::arg("theta"));

  py::class_<ConeBounds>(m, "ConeBounds")
      .def(py::init([](double mu_tilde, double gamma_low, double gamma_up) {
             ConeBounds b;
             b.mu_tilde = mu_tilde;
             b.gamma_low = gamma_low;
             b.gamma_up = gamma_up;
             return b;
           }),
           py::arg("mu_tilde") = 0.4, py::arg("gamma_low") = 0.0,
           py::arg("gamma_up") = kDefaultGammaUp)
      .def_readwrite("mu_tilde", &ConeBounds::mu_tilde)
      .def_readwrite("gamma_low", &ConeBounds::gamma_low)
      .def_readwrite("gamma_up", &ConeBounds::gamma_up)
      .def_readonly("saturated", &ConeBounds::saturated);
  m.def(
      "adaptive_lower_bounds",
      [](const std::vector<Vec3>& measured, double mu_tilde, double gamma_up) {
        return adaptive_lower_bounds(measured, mu_tilde, gamma_up);
      },
      py::arg("measured"), py::arg("mu_tilde"), py::arg("gamma_up") = kDefaultGammaUp);

  py::class_<ConeProblem>(m, "ConeProblem")
      .def_readonly("frames", &ConeProblem::frames)
      .def_readonly("bounds", &ConeProblem::bounds)
      .def_readonly("g_tilde", &ConeProblem::g_tilde)
      .def_readonly("f_prev", &ConeProblem::f_prev)
      .def_readonly("beta1", &ConeProblem::beta1)
      .def_readonly("beta2", &ConeProblem::beta2)
      .def_property_readonly("num_contacts", &ConeProblem::num_contacts);
  m.def("assemble", &assemble, py::arg("frames"), py::arg("bounds"), py::arg("g_tilde"),
        py::arg("f_prev") = VecX(), py::arg("beta1") = kDefaultBeta1,
        py::arg("beta2") = kDefaultBeta2);
  m.def("objective", &objective, py::arg("problem"), py::arg("f"));
  m.def(
      "max_residual",
      [](const ConeProblem& p, const VecX& f) { return max_residual(feasibility_residuals(p, f)); },
      py::arg("problem"), py::arg("f"));

  py::class_<Solution>(m, "Solution")
      .def_readonly("f", &Solution::f)
      .def_property_readonly("status",
                             [](const Solution& s) { return std::string(to_string(s.status)); })
      .def_readonly("iterations", &Solution::iterations)
      .def_readonly("objective_value", &Solution::objective_value)
      .def_readonly("max_cone_residual", &Solution::max_cone_residual)
      .def_readonly("duality_gap", &Solution::duality_gap);
  m.def(
      "solve",
      [](const ConeProblem& p, double feas_tol, double opt_tol, int max_iters, bool warm_start) {
        SolverSettings s;
        s.feas_tol = feas_tol;
        s.opt_tol = opt_tol;
        s.max_iters = max_iters;
        s.warm_start = warm_start;
        return solve(p, s);
      },
      py::arg("problem"), py::arg("feas_tol") = 1e-8, py::arg("opt_tol") = 1e-8,
      py::arg("max_iters") = 200, py::arg("warm_start") = true);
  m.def("oracle_solve", &oracle_solve, py::arg("problem"), py::arg("grid") = 40);

  m.def(
      "instantaneous_friction",
      [](const std::vector<Vec3>& measured, double min_normal) {
        return instantaneous_friction(measured, min_normal);
      },
      py::arg("measured"), py::arg("min_normal") = kDefaultMinNormal);
  m.def(
      "instantaneous_gravity",
      [](const std::vector<Vec3>& measured, const std::vector<ContactFrame>& frames,
         double a_vertical) { return instantaneous_gravity(measured, frames, a_vertical); },
      py::arg("measured"), py::arg("frames"), py::arg("a_vertical") = 0.0);

  m.def(
      "forward_kinematics",
      [](const VecX& q) { return forward_kinematics(default_hand(), q); }, py::arg("q"),
      "Fingertip positions of the default four-finger hand.");
  m.def(
      "contact_jacobian",
      [](const VecX& q, const std::vector<int>& fingers) {
        return contact_jacobian(default_hand(), q, fingers);
      },
      py::arg("q"), py::arg("fingers"));

  m.def(
      "run_scenario",
      [](const std::string& path, std::optional<std::uint64_t> seed,
         std::optional<std::string> mode, std::optional<double> eta) {
        const Scenario sc = load_scenario(path);
        const RunOptions o = make_options(seed, mode, eta);
        py::gil_scoped_release release;
        RunResult r = run(sc, o);
        py::gil_scoped_acquire acquire;
        return run_dict(r);
      },
      py::arg("path"), py::arg("seed") = py::none(), py::arg("mode") = py::none(),
      py::arg("eta") = py::none(), "Load a scenario file, run it and return metrics and trace.");
  m.def(
      "run_scenario_json",
      [](const std::string& text, std::optional<std::uint64_t> seed,
         std::optional<std::string> mode, std::optional<double> eta) {
        const Scenario sc = parse_scenario(text);
        const RunOptions o = make_options(seed, mode, eta);
        py::gil_scoped_release release;
        RunResult r = run(sc, o);
        py::gil_scoped_acquire acquire;
        return run_dict(r);
      },
      py::arg("text"), py::arg("seed") = py::none(), py::arg("mode") = py::none(),
      py::arg("eta") = py::none());
  m.def(
      "validate_scenario_json",
      [](const std::string& text) { parse_scenario(text); }, py::arg("text"),
      "Raises ScenarioError listing every violation.");
  m.def(
      "metrics_from_csv",
      [](const std::string& csv, double mass, double mu_true, double contact_threshold) {
        return metrics_dict(compute_metrics(trace_from_csv(csv), mass, mu_true, contact_threshold));
      },
      py::arg("csv"), py::arg("mass"), py::arg("mu_true"),
      py::arg("contact_threshold") = kDefaultMinNormal);

  m.def(
      "property_suite",
      [](std::uint64_t seed) {
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_property_suite(seed);
        }
        py::list out;
        for (const CheckResult& r : results) {
          py::dict d;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["samples"] = r.samples;
          d["worst"] = r.worst;
          d["seconds"] = r.seconds;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 20240601);
}
