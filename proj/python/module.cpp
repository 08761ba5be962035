#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dickedim/classical.hpp"
#include "dickedim/coherent.hpp"
#include "dickedim/effdim.hpp"
#include "dickedim/ensembles.hpp"
#include "dickedim/husimi.hpp"
#include "dickedim/model.hpp"
#include "dickedim/participation.hpp"

namespace py = pybind11;
using namespace dickedim;

PYBIND11_MODULE(_dickedim, m) {
  m.doc() = "Dicke model eigenstate and random-state dimensionality";

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("error", &Estimate::error)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(" + std::to_string(e.value) + " +- " + std::to_string(e.error) + ")";
      });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double omega, double omega0, double gamma, double j) {
             ModelParams p{omega, omega0, gamma, j};
             p.validate();
             return p;
           }),
           py::arg("omega") = 1.0, py::arg("omega0") = 1.0, py::arg("gamma") = 1.0, py::arg("j") = 100.0)
      .def_readwrite("omega", &ModelParams::omega)
      .def_readwrite("omega0", &ModelParams::omega0)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("j", &ModelParams::j)
      .def_property_readonly("gamma_c", &ModelParams::gamma_c);

  py::class_<PhasePoint>(m, "PhasePoint")
      .def(py::init<double, double, double, double>(), py::arg("q"), py::arg("p"), py::arg("Q"), py::arg("P"))
      .def_readwrite("q", &PhasePoint::q)
      .def_readwrite("p", &PhasePoint::p)
      .def_readwrite("Q", &PhasePoint::Q)
      .def_readwrite("P", &PhasePoint::P);

  m.def("h_cl", &h_cl, py::arg("x"), py::arg("params"));
  m.def("classical_ground_energy", &classical_ground_energy, py::arg("params"));
  m.def("sigma_x_analytic", &sigma_x_analytic, py::arg("x"), py::arg("params"));

  py::class_<ShellSample>(m, "ShellSample")
      .def_readonly("epsilon", &ShellSample::epsilon)
      .def_readonly("nu", &ShellSample::nu)
      .def_readonly("volume", &ShellSample::volume)
      .def_readonly("warnings", &ShellSample::warnings)
      .def_property_readonly("points",
                             [](const ShellSample& s) {
                               Eigen::MatrixX4d out(s.points.size(), 4);
                               for (std::size_t i = 0; i < s.points.size(); ++i) {
                                 const auto& x = s.points[i].x;
                                 out.row(i) << x.q, x.p, x.Q, x.P;
                               }
                               return out;
                             })
      .def_property_readonly("weights", [](const ShellSample& s) {
        Eigen::VectorXd w(s.points.size());
        for (std::size_t i = 0; i < s.points.size(); ++i) w(i) = s.points[i].weight;
        return w;
      });

  m.def("sample_shell", [](double eps, double draws, std::uint64_t seed, const ModelParams& p) {
    return sample_shell(eps, static_cast<std::uint64_t>(draws), seed, p);
  }, py::arg("epsilon"), py::arg("draws"), py::arg("seed"), py::arg("params"));

  py::class_<EffectiveDimension>(m, "EffectiveDimension")
      .def_readonly("epsilon", &EffectiveDimension::epsilon)
      .def_readonly("nu", &EffectiveDimension::nu)
      .def_readonly("sigma_bar", &EffectiveDimension::sigma_bar)
      .def_readonly("sigma_mean", &EffectiveDimension::sigma_mean)
      .def_readonly("value", &EffectiveDimension::value);
  m.def("effective_dimension", [](double eps, const ModelParams& p, double draws, std::uint64_t seed) {
    return effective_dimension(eps, p, static_cast<std::uint64_t>(draws), seed);
  }, py::arg("epsilon"), py::arg("params"), py::arg("draws") = 1e6, py::arg("seed") = 1);
  m.def("harmonic_mean_sigma", &harmonic_mean_sigma);
  m.def("arithmetic_mean_sigma", &arithmetic_mean_sigma);
  m.def("dimensionality_rect_closed", &dimensionality_rect_closed, py::arg("sigma"), py::arg("shell"));
  m.def("dimensionality_gauss_closed", &dimensionality_gauss_closed, py::arg("sigma"), py::arg("shell"));

  py::class_<EigenDecomposition>(m, "EigenDecomposition")
      .def_readonly("energies", &EigenDecomposition::energies)
      .def_readonly("vectors", &EigenDecomposition::vectors)
      .def_readonly("parities", &EigenDecomposition::parities)
      .def_readonly("converged_count", &EigenDecomposition::converged_count)
      .def("converged_eps_max", &EigenDecomposition::converged_eps_max);
  m.def("diagonalize_converged",
        [](const ModelParams& p, int n_max, int n_max_check, double eps_max, double tol) {
          DiagonalizeOptions o;
          o.eps_max = eps_max;
          py::gil_scoped_release release;
          return diagonalize_converged(p, n_max, n_max_check, Parity::all, tol, o);
        },
        py::arg("params"), py::arg("n_max"), py::arg("n_max_check"), py::arg("eps_max") = 0.3,
        py::arg("tol") = 1e-6);
  m.def("eigenstate_dimensionality", &eigenstate_dimensionality, py::arg("dec"), py::arg("level"),
        py::arg("shell"));

  m.def("participation_ratio", [](const Eigen::VectorXcd& c) { return participation_ratio(c); });
  m.def("haar_overlap_average", &haar_overlap_average, py::arg("n"), py::arg("samples"), py::arg("seed"));
}
