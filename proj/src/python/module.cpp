#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nbscatter/acceptance.hpp"
#include "nbscatter/blowup.hpp"
#include "nbscatter/chazy.hpp"
#include "nbscatter/integrator.hpp"
#include "nbscatter/kepler.hpp"
#include "nbscatter/nbody.hpp"
#include "nbscatter/scattering.hpp"

namespace py = pybind11;
using namespace nbs;

PYBIND11_MODULE(_core, m) {
  m.doc() = "hyperbolic n-body scattering in blown-up coordinates";

  py::register_exception<CollisionError>(m, "CollisionError");
  py::register_exception<DimensionError>(m, "DimensionError");
  py::register_exception<InvalidState>(m, "InvalidStateError");

  py::class_<ToleranceSet>(m, "ToleranceSet")
      .def(py::init<>())
      .def_readwrite("rel", &ToleranceSet::rel)
      .def_readwrite("abs", &ToleranceSet::abs)
      .def_readwrite("energy", &ToleranceSet::energy)
      .def_readwrite("rho_eq", &ToleranceSet::rho_eq)
      .def_readwrite("w_eq", &ToleranceSet::w_eq)
      .def_readwrite("v_eq", &ToleranceSet::v_eq)
      .def_readwrite("collision", &ToleranceSet::collision)
      .def_readwrite("seed_scale", &ToleranceSet::seed_scale)
      .def("scaled", &ToleranceSet::scaled);

  py::class_<MassSystem>(m, "MassSystem")
      .def(py::init<std::vector<double>, int>(), py::arg("masses"),
           py::arg("d"))
      .def_property_readonly("n", &MassSystem::n)
      .def_property_readonly("d", &MassSystem::d)
      .def_property_readonly("nd", &MassSystem::nd)
      .def_property_readonly("masses", &MassSystem::masses)
      .def("inner", &MassSystem::inner)
      .def("norm", &MassSystem::norm)
      .def("project_zero_momentum", &MassSystem::project_zero_momentum);

  m.def("potential", &potential, py::arg("q"), py::arg("sys"),
        py::arg("collision_tol") = 1e-8);
  m.def("grad_potential", &grad_potential, py::arg("q"), py::arg("sys"),
        py::arg("collision_tol") = 1e-8);
  m.def("tangential_grad", &tangential_grad, py::arg("s"), py::arg("sys"),
        py::arg("collision_tol") = 1e-8);
  m.def("energy", &energy);
  m.def("hessian_blocks", &hessian_blocks, py::arg("q"), py::arg("sys"),
        py::arg("collision_tol") = 1e-8);
  m.def("min_pair_distance", &min_pair_distance);

  py::class_<BlowupState>(m, "BlowupState")
      .def(py::init<>())
      .def_readwrite("rho", &BlowupState::rho)
      .def_readwrite("s", &BlowupState::s)
      .def_readwrite("v", &BlowupState::v)
      .def_readwrite("w", &BlowupState::w);

  py::class_<EquilibriumPoint>(m, "EquilibriumPoint")
      .def(py::init<>())
      .def(py::init([](const Vec& s0, double v0) {
             return EquilibriumPoint{s0, v0};
           }),
           py::arg("s0"), py::arg("v0"))
      .def_readwrite("s0", &EquilibriumPoint::s0)
      .def_readwrite("v0", &EquilibriumPoint::v0);

  py::class_<ManifoldParams>(m, "ManifoldParams")
      .def(py::init<>())
      .def(py::init([](const EquilibriumPoint& eq, const Vec& s1, double r1) {
             return ManifoldParams{eq, s1, r1};
           }),
           py::arg("eq"), py::arg("s1"), py::arg("rho1"))
      .def_readwrite("eq", &ManifoldParams::eq)
      .def_readwrite("s1", &ManifoldParams::s1)
      .def_readwrite("rho1", &ManifoldParams::rho1);

  m.def("to_blowup", &to_blowup);
  m.def("from_blowup", &from_blowup);
  m.def("blowup_energy", &blowup_energy);
  m.def("vector_field", &vector_field);
  m.def("infinity_flow", &infinity_flow);
  m.def("linearization_matrix", &linearization_matrix);
  m.def("linearized_flow_exact", &linearized_flow_exact);
  m.def("seed_state", &seed_state);

  py::enum_<Termination>(m, "Termination")
      .value("SpanEnd", Termination::SpanEnd)
      .value("Converged", Termination::Converged)
      .value("Collision", Termination::Collision)
      .value("StepUnderflow", Termination::StepUnderflow);

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("tau", &TrajectorySample::tau)
      .def_readonly("state", &TrajectorySample::state)
      .def_readonly("t", &TrajectorySample::t);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("samples", &Trajectory::samples)
      .def_readonly("termination", &Trajectory::termination)
      .def_readonly("h", &Trajectory::h)
      .def_readonly("energy_drift", &Trajectory::energy_drift)
      .def_readonly("max_rho", &Trajectory::max_rho)
      .def_readonly("max_shape_potential", &Trajectory::max_shape_potential)
      .def_readonly("min_pair_distance", &Trajectory::min_pair_distance)
      .def_readonly("track_time", &Trajectory::track_time);

  py::class_<IntegrateOptions>(m, "IntegrateOptions")
      .def(py::init<>())
      .def_readwrite("tol", &IntegrateOptions::tol)
      .def_readwrite("max_step", &IntegrateOptions::max_step)
      .def_readwrite("detect_convergence", &IntegrateOptions::detect_convergence)
      .def_readwrite("convergence_sign", &IntegrateOptions::convergence_sign);

  m.def("integrate", &integrate, py::arg("x0"), py::arg("tau0"),
        py::arg("tau1"), py::arg("sys"), py::arg("opts") = IntegrateOptions{});
  m.def("detect_equilibrium", &detect_equilibrium);

  py::enum_<Direction>(m, "Direction")
      .value("Past", Direction::Past)
      .value("Future", Direction::Future);

  py::class_<ChazyParameters>(m, "ChazyParameters")
      .def_readonly("A", &ChazyParameters::A)
      .def_readonly("B", &ChazyParameters::B)
      .def_readonly("C", &ChazyParameters::C)
      .def_readonly("direction", &ChazyParameters::direction);

  m.def("chazy_from_manifold", &chazy_from_manifold);
  m.def("extract_manifold_params", &extract_manifold_params);
  m.def("series_predict",
        [](const ManifoldParams& mp, double tau, int order,
           const MassSystem& sys) {
          SeriesPrediction p = series_predict(mp, tau, order, sys);
          return py::make_tuple(p.rho, p.s, p.v, p.r);
        });
  m.def("t_from_tau", &t_from_tau);
  m.def("tau_from_t", &tau_from_t);
  m.def("time_reverse_params", &time_reverse_params);

  py::class_<KeplerOrbit>(m, "KeplerOrbit")
      .def_static("from_energy", &KeplerOrbit::from_energy, py::arg("m1"),
                  py::arg("m2"), py::arg("h"), py::arg("e"))
      .def_readonly("a", &KeplerOrbit::a)
      .def_readonly("mu", &KeplerOrbit::mu)
      .def_readonly("omega", &KeplerOrbit::omega)
      .def_readonly("e", &KeplerOrbit::e)
      .def_readonly("h", &KeplerOrbit::h);

  m.def("kepler_system", &kepler_system);
  m.def("kepler_state", &kepler_state);
  m.def("kepler_embed", &kepler_embed);
  m.def("kepler_time", &kepler_time);

  py::class_<KeplerScattering>(m, "KeplerScattering")
      .def_readonly("s0", &KeplerScattering::s0)
      .def_readonly("s0p", &KeplerScattering::s0p)
      .def_readonly("A", &KeplerScattering::A)
      .def_readonly("Ap", &KeplerScattering::Ap)
      .def_readonly("C", &KeplerScattering::C)
      .def_readonly("Cp", &KeplerScattering::Cp)
      .def_readonly("s1", &KeplerScattering::s1)
      .def_readonly("s1p", &KeplerScattering::s1p)
      .def_readonly("rho1", &KeplerScattering::rho1);

  m.def("kepler_scattering", &kepler_scattering);

  py::enum_<ScatterStatus>(m, "ScatterStatus")
      .value("Ok", ScatterStatus::Ok)
      .value("Singular", ScatterStatus::Singular)
      .value("NoConvergence", ScatterStatus::NoConvergence)
      .value("SeedScale", ScatterStatus::SeedScale);

  py::class_<ScatteringDiagnostics>(m, "ScatteringDiagnostics")
      .def_readonly("min_pair_distance", &ScatteringDiagnostics::min_pair_distance)
      .def_readonly("max_rho", &ScatteringDiagnostics::max_rho)
      .def_readonly("max_shape_potential",
                    &ScatteringDiagnostics::max_shape_potential)
      .def_readonly("energy_drift", &ScatteringDiagnostics::energy_drift)
      .def_readonly("tau_end", &ScatteringDiagnostics::tau_end);

  py::class_<OrbitParameter>(m, "OrbitParameter")
      .def_readonly("rho1", &OrbitParameter::rho1)
      .def_readonly("shifted_s1", &OrbitParameter::shifted_s1);

  py::class_<ScatteringResult>(m, "ScatteringResult")
      .def_readonly("status", &ScatteringResult::status)
      .def_readonly("past", &ScatteringResult::past)
      .def_readonly("future", &ScatteringResult::future)
      .def_readonly("past_gamma", &ScatteringResult::past_gamma)
      .def_readonly("future_gamma", &ScatteringResult::future_gamma)
      .def_readonly("past_chazy", &ScatteringResult::past_chazy)
      .def_readonly("future_chazy", &ScatteringResult::future_chazy)
      .def_readonly("diagnostics", &ScatteringResult::diagnostics)
      .def_readonly("message", &ScatteringResult::message);

  py::class_<ScatterOptions>(m, "ScatterOptions")
      .def(py::init<>())
      .def_readwrite("tol", &ScatterOptions::tol)
      .def_readwrite("tau_budget", &ScatterOptions::tau_budget);

  m.def("orbit_parameter", &orbit_parameter);
  m.def("manifold_from_parameter", &manifold_from_parameter);
  m.def("ray_distance", &ray_distance);
  m.def("scattering_map", &scattering_map, py::arg("past"), py::arg("sys"),
        py::arg("opts") = ScatterOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def("infinity_scattering", &infinity_scattering);
  m.def("delta_A", &delta_A, py::arg("xi"), py::arg("h"), py::arg("eta"),
        py::arg("drho0"), py::arg("sys"), py::arg("quad_tol") = 1e-10);
  m.def("delta_A_planar", &delta_A_planar);
  m.def("build_dbar", &build_dbar, py::arg("xi"), py::arg("eta"),
        py::arg("sys"), py::arg("quad_tol") = 1e-10);
  m.def("build_dbar_planar", &build_dbar_planar);
  m.def("eta_nonplanar", &eta_nonplanar);
  m.def("perp", &perp);

  py::class_<KernelReport>(m, "KernelReport")
      .def_readonly("dimension", &KernelReport::dimension)
      .def_readonly("basis", &KernelReport::basis)
      .def_readonly("singular_values", &KernelReport::singular_values)
      .def_readonly("collinear", &KernelReport::collinear)
      .def_readonly("restricted_rank", &KernelReport::restricted_rank)
      .def_readonly("expected_rank", &KernelReport::expected_rank);

  m.def("dbar_kernel", &dbar_kernel, py::arg("xi"), py::arg("sys"),
        py::arg("svd_threshold") = 1e-8);

  m.def("run_acceptance_suite", [](double tolerance_scale) {
    std::vector<py::dict> out;
    for (const auto& r : run_acceptance_suite(tolerance_scale)) {
      py::dict d;
      d["id"] = r.id;
      d["name"] = r.name;
      d["pass"] = r.pass;
      d["detail"] = r.detail;
      out.push_back(std::move(d));
    }
    return out;
  }, py::arg("tolerance_scale") = 1.0);
}
