// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "btmor/bundle.hpp"
#include "btmor/dense_bt.hpp"
#include "btmor/descriptor.hpp"
#include "btmor/eksm.hpp"
#include "btmor/errors.hpp"
#include "btmor/freq.hpp"
#include "btmor/generate.hpp"
#include "btmor/linalg.hpp"
#include "btmor/netlist.hpp"

namespace py = pybind11;
using namespace btmor;

namespace {

OrderRequest make_request(std::optional<Eigen::Index> order, std::optional<double> target_error) {
  if (order && target_error) {
    throw ValidationError("give either order or target_error, not both");
  }
  if (order) {
    return OrderRequest::fixed(*order);
  }
  return OrderRequest::target(target_error.value_or(1e-2));
}

EksmConfig make_config(double tol, double target_error, double f_min, double f_max, int points,
                       int maxiter, Eigen::Index basis_cap, bool log_spacing) {
  EksmConfig cfg;
  cfg.tol = tol;
  cfg.target_error = target_error;
  cfg.f_min = f_min;
  cfg.f_max = f_max;
  cfg.points = points;
  cfg.maxiter = maxiter;
  cfg.basis_cap = basis_cap;
  cfg.spacing = log_spacing ? GridSpacing::logarithmic : GridSpacing::linear;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "balanced-truncation model order reduction for multi-port RLCk circuits";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::enum_<GridSpacing>(m, "GridSpacing")
      .value("linear", GridSpacing::linear)
      .value("logarithmic", GridSpacing::logarithmic);
  py::enum_<SweepKind>(m, "SweepKind")
      .value("impedance", SweepKind::impedance)
      .value("scattering", SweepKind::scattering);
  py::enum_<SweepFormat>(m, "SweepFormat")
      .value("csv", SweepFormat::csv)
      .value("touchstone", SweepFormat::touchstone)
      .value("plot_csv", SweepFormat::plot_csv);
  py::enum_<RomProvenance>(m, "RomProvenance")
      .value("dense", RomProvenance::dense)
      .value("eksm", RomProvenance::eksm);
  py::enum_<StopReason>(m, "StopReason")
      .value("three_below_tol", StopReason::three_below_tol)
      .value("maxiter", StopReason::maxiter)
      .value("basis_cap", StopReason::basis_cap);

  py::class_<Netlist>(m, "Netlist")
      .def_property_readonly("node_count", &Netlist::node_count)
      .def_property_readonly("branch_count", &Netlist::branch_count)
      .def_readonly("node_names", &Netlist::node_names)
      .def("__repr__", [](const Netlist& nl) {
        return "<Netlist nodes=" + std::to_string(nl.node_count()) +
               " branches=" + std::to_string(nl.branch_count()) + ">";
      });

  py::class_<DescriptorSystem>(m, "DescriptorSystem")
      .def_property_readonly("G", [](const DescriptorSystem& s) { return Eigen::MatrixXd(s.G); })
      .def_property_readonly("C", [](const DescriptorSystem& s) { return Eigen::MatrixXd(s.C); })
      .def_readonly("B", &DescriptorSystem::B)
      .def_readonly("L", &DescriptorSystem::L)
      .def_readonly("n", &DescriptorSystem::n)
      .def_readonly("m", &DescriptorSystem::m)
      .def_readonly("in_ports", &DescriptorSystem::in_ports)
      .def_readonly("out_ports", &DescriptorSystem::out_ports)
      .def_readonly("warnings", &DescriptorSystem::warnings)
      .def_property_readonly("order", &DescriptorSystem::order)
      .def("__repr__", [](const DescriptorSystem& s) {
        return "<DescriptorSystem N=" + std::to_string(s.order()) +
               " p=" + std::to_string(s.num_inputs()) + " q=" + std::to_string(s.num_outputs()) +
               ">";
      });

  py::class_<Rom>(m, "Rom")
      .def_readonly("G", &Rom::G)
      .def_readonly("C", &Rom::C)
      .def_readonly("B", &Rom::B)
      .def_readonly("L", &Rom::L)
      .def_readonly("retained_hsvs", &Rom::retained_hsvs)
      .def_readonly("apriori_bound", &Rom::apriori_bound)
      .def_readonly("provenance", &Rom::provenance)
      .def_readonly("iterations", &Rom::iterations)
      .def_property_readonly("order", &Rom::order)
      .def("__repr__", [](const Rom& r) {
        return "<Rom r=" + std::to_string(r.order()) + ">";
      });

  py::class_<FrequencyGrid>(m, "FrequencyGrid")
      .def_static("linear", &FrequencyGrid::linear, py::arg("f_min"), py::arg("f_max"),
                  py::arg("points"))
      .def_static("logarithmic", &FrequencyGrid::logarithmic, py::arg("f_min"),
                  py::arg("f_max"), py::arg("points"))
      .def("frequencies", &FrequencyGrid::frequencies)
      .def_readonly("f_min", &FrequencyGrid::f_min)
      .def_readonly("f_max", &FrequencyGrid::f_max)
      .def_readonly("points", &FrequencyGrid::points);

  py::class_<FrequencySweep>(m, "FrequencySweep")
      .def_readonly("samples", &FrequencySweep::samples)
      .def_readonly("kind", &FrequencySweep::kind)
      .def_readonly("z0", &FrequencySweep::z0)
      .def_readonly("grid", &FrequencySweep::grid)
      .def("frequencies", [](const FrequencySweep& s) { return s.grid.frequencies(); });

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("iteration", &TraceRecord::iteration)
      .def_readonly("basis_p", &TraceRecord::basis_p)
      .def_readonly("basis_q", &TraceRecord::basis_q)
      .def_readonly("criterion", &TraceRecord::criterion)
      .def_readonly("probe_order", &TraceRecord::probe_order);

  py::class_<ConvergenceTrace>(m, "ConvergenceTrace")
      .def_readonly("records", &ConvergenceTrace::records)
      .def_readonly("stop_reason", &ConvergenceTrace::stop_reason)
      .def("to_csv", &ConvergenceTrace::to_csv);

  py::class_<EksmResult>(m, "EksmResult")
      .def_readonly("rom", &EksmResult::rom)
      .def_readonly("trace", &EksmResult::trace)
      .def_readonly("zp", &EksmResult::zp)
      .def_readonly("zq", &EksmResult::zq);

  m.def("parse_netlist", py::overload_cast<const std::string&>(&parse_netlist),
        py::arg("text"), "parse an RLCk netlist from text");
  m.def("assemble_mna", &assemble_mna, py::arg("netlist"),
        "stamp the MNA descriptor system from a parsed netlist");
  m.def("regularize", &regularize, py::arg("system"), py::arg("c_min") = 1e-18,
        "add c_min to empty capacitance rows so C factors");
  m.def(
      "make_descriptor",
      [](const Eigen::MatrixXd& g, const Eigen::MatrixXd& c, const Eigen::MatrixXd& b,
         const Eigen::MatrixXd& l, Eigen::Index n, Eigen::Index mm,
         std::vector<std::string> in_ports, std::vector<std::string> out_ports) {
        return make_descriptor(g.sparseView(), c.sparseView(), b, l, n, mm,
                               std::move(in_ports), std::move(out_ports));
      },
      py::arg("G"), py::arg("C"), py::arg("B"), py::arg("L"), py::arg("n"), py::arg("m"),
      py::arg("in_ports"), py::arg("out_ports"),
      "build a descriptor system directly from matrices");

  m.def(
      "reduce_dense",
      [](const DescriptorSystem& sys, std::optional<Eigen::Index> order,
         std::optional<double> target_error) {
        return reduce_dense(sys, make_request(order, target_error));
      },
      py::arg("system"), py::arg("order") = std::nullopt,
      py::arg("target_error") = std::nullopt,
      "dense balanced truncation (reference path)");
  m.def(
      "reduce_eksm",
      [](const DescriptorSystem& sys, double tol, double target_error, double f_min,
         double f_max, int points, int maxiter, Eigen::Index basis_cap, bool log_spacing) {
        return reduce_eksm(sys, make_config(tol, target_error, f_min, f_max, points, maxiter,
                                            basis_cap, log_spacing));
      },
      py::arg("system"), py::arg("tol") = 1e-2, py::arg("target_error") = 1e-2,
      py::arg("f_min") = 1e8, py::arg("f_max") = 1e10, py::arg("points") = 20,
      py::arg("maxiter") = 50, py::arg("basis_cap") = 0, py::arg("log_spacing") = false,
      "extended Krylov low-rank balanced truncation");

  m.def("solve_gramians_dense",
        [](const DescriptorSystem& sys) {
          GramianPair g = solve_gramians_dense(sys);
          return py::make_tuple(g.P, g.Q);
        },
        py::arg("system"), "controllability and observability Gramians (dense path)");
  m.def("hankel_singular_values",
        [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
          return hankel_singular_values(GramianPair{p, q}).sigmas;
        },
        py::arg("P"), py::arg("Q"), "HSVs via the square-root method");
  m.def("solve_lyapunov_dense", &solve_lyapunov_dense, py::arg("A"), py::arg("W"),
        "solve A X + X A^T = -W by Bartels-Stewart");
  m.def("orth", &orth, py::arg("M"), "orthonormalize columns with deflation");

  m.def("evaluate_tf",
        py::overload_cast<const DescriptorSystem&, const FrequencyGrid&>(&evaluate_tf),
        py::arg("system"), py::arg("grid"));
  m.def("evaluate_tf", py::overload_cast<const Rom&, const FrequencyGrid&>(&evaluate_tf),
        py::arg("rom"), py::arg("grid"));
  m.def("max_relative_error", &max_relative_error, py::arg("reference"), py::arg("other"),
        "sampled-H-infinity error ratio between two sweeps");
  m.def("h_to_s", &h_to_s, py::arg("sweep"), py::arg("z0") = 50.0,
        "impedance to scattering parameters");
  m.def("export_sweep", &export_sweep, py::arg("sweep"), py::arg("format"));
  m.def("parse_touchstone", &parse_touchstone, py::arg("text"), py::arg("nports"));
  m.def("parse_sweep_csv", &parse_sweep_csv, py::arg("text"));

  m.def("generate_ladder",
        [](int sections, int ports, std::uint64_t seed) {
          return generate_ladder({sections, ports, seed});
        },
        py::arg("sections"), py::arg("ports") = 1, py::arg("seed") = 1);
  m.def("generate_mesh",
        [](int rows, int cols, int ports, std::uint64_t seed) {
          return generate_mesh({rows, cols, ports, seed});
        },
        py::arg("rows"), py::arg("cols"), py::arg("ports") = 2, py::arg("seed") = 1);
  m.def("generate_coupled_lines",
        [](int lines, int sections, double coupling_density, std::uint64_t seed) {
          return generate_coupled_lines({lines, sections, coupling_density, seed});
        },
        py::arg("lines"), py::arg("sections"), py::arg("coupling_density") = 0.3,
        py::arg("seed") = 1);

  m.def("load_model", &load_model, py::arg("path"),
        "load a netlist file or bundle manifest as a descriptor system");
  m.def("save_system_bundle", &save_system_bundle, py::arg("dir"), py::arg("system"));
  m.def("save_rom_bundle", &save_rom_bundle, py::arg("dir"), py::arg("rom"));

  m.attr("__version__") = "0.1.0";
}
