#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "bsfscale/cost_model.hpp"
#include "bsfscale/io.hpp"
#include "bsfscale/jacobi.hpp"
#include "bsfscale/runtime.hpp"

namespace py = pybind11;

namespace {

bsf::SolveResult solve_system(const bsf::LinearSystem& sys, const std::string& variant,
                              double eps, std::size_t max_iters, std::size_t workers,
                              const std::string& backend) {
    bsf::SolveConfig cfg;
    cfg.variant = bsf::io::parse_solve_variant(variant);
    cfg.eps = eps;
    cfg.max_iters = max_iters;
    cfg.workers = workers;
    bsf::FarmConfig farm;
    farm.backend = bsf::io::parse_backend(backend);
    return bsf::solve(sys, cfg, farm);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scalability prediction and measurement for iterative master-worker algorithms";

    py::class_<bsf::MachineConstants>(m, "MachineConstants")
        .def(py::init<>())
        .def(py::init([](double latency, double op_time, double transfer_time) {
                 bsf::MachineConstants mc{latency, op_time, transfer_time};
                 mc.validate();
                 return mc;
             }),
             py::arg("latency"), py::arg("op_time"), py::arg("transfer_time"))
        .def_readwrite("latency", &bsf::MachineConstants::latency)
        .def_readwrite("op_time", &bsf::MachineConstants::op_time)
        .def_readwrite("transfer_time", &bsf::MachineConstants::transfer_time)
        .def("__repr__", [](const bsf::MachineConstants& mc) {
            return "MachineConstants(latency=" + bsf::io::format_double(mc.latency) +
                   ", op_time=" + bsf::io::format_double(mc.op_time) +
                   ", transfer_time=" + bsf::io::format_double(mc.transfer_time) + ")";
        });

    m.def("tornado_preset", &bsf::tornado_preset,
          "Machine constants measured on the reference cluster");

    py::class_<bsf::CurvePoint>(m, "CurvePoint")
        .def_readonly("workers", &bsf::CurvePoint::workers)
        .def_readonly("speedup", &bsf::CurvePoint::speedup)
        .def_readonly("efficiency", &bsf::CurvePoint::efficiency)
        .def("__repr__", [](const bsf::CurvePoint& p) {
            return "CurvePoint(workers=" + std::to_string(p.workers) +
                   ", speedup=" + bsf::io::format_double(p.speedup) +
                   ", efficiency=" + bsf::io::format_double(p.efficiency) + ")";
        });

    py::class_<bsf::PredictionCurve>(m, "PredictionCurve")
        .def_property_readonly("variant",
                               [](const bsf::PredictionCurve& c) {
                                   return std::string(bsf::io::cost_variant_token(c.variant));
                               })
        .def_readonly("n", &bsf::PredictionCurve::n)
        .def_readonly("points", &bsf::PredictionCurve::points)
        .def_readonly("scalability_bound", &bsf::PredictionCurve::scalability_bound);

    m.def(
        "predict_curve",
        [](const std::string& variant, std::size_t n, int max_workers,
           const bsf::MachineConstants& constants) {
            return bsf::predict_curve(bsf::io::parse_cost_variant(variant), n, max_workers,
                                      constants);
        },
        py::arg("variant"), py::arg("n"), py::arg("max_workers"), py::arg("constants"),
        "Predicted speedup and efficiency for worker counts 1..max_workers");

    m.def("optimal_workers", &bsf::optimal_workers, py::arg("curve"),
          "Worker count with the highest predicted speedup");

    m.def(
        "scalability_bound",
        [](const std::string& variant, std::size_t n, const bsf::MachineConstants& constants) {
            if (bsf::io::parse_cost_variant(variant) == bsf::Variant::BsfM) {
                return bsf::scalability_bound(bsf::jacobi_m_costs(n, 1, constants));
            }
            return bsf::jacobi_mr_scalability_bound(n, constants);
        },
        py::arg("variant"), py::arg("n"), py::arg("constants"),
        "Worker count beyond which predicted speedup degrades");

    py::class_<bsf::LinearSystem>(m, "LinearSystem")
        .def(py::init([](std::size_t n, std::vector<double> a, std::vector<double> b) {
                 if (n == 0) throw std::invalid_argument("system dimension must be positive");
                 if (a.size() != n * n) throw std::invalid_argument("matrix must hold n*n entries");
                 if (b.size() != n) throw std::invalid_argument("right-hand side must hold n entries");
                 return bsf::LinearSystem{n, std::move(a), std::move(b)};
             }),
             py::arg("n"), py::arg("a"), py::arg("b"))
        .def_readonly("n", &bsf::LinearSystem::n)
        .def_readonly("a", &bsf::LinearSystem::a)
        .def_readonly("b", &bsf::LinearSystem::b)
        .def("__repr__", [](const bsf::LinearSystem& s) {
            return "LinearSystem(n=" + std::to_string(s.n) + ")";
        });

    m.def("make_benchmark_system", &bsf::make_benchmark_system, py::arg("n"),
          "Scalability benchmark system with unit off-diagonal entries");

    m.def(
        "make_random_dominant_system",
        [](std::size_t n, std::uint64_t seed) {
            bsf::GeneratedSystem g = bsf::make_random_dominant_system(n, seed);
            return py::make_tuple(std::move(g.system), std::move(g.solution));
        },
        py::arg("n"), py::arg("seed") = 1,
        "Diagonally dominant system with a known solution; returns (system, solution)");

    m.def(
        "diag_dominance_check",
        [](const bsf::LinearSystem& sys) {
            bsf::DominanceReport r = bsf::diag_dominance_check(sys);
            py::dict out;
            out["dominant"] = r.dominant;
            out["all_hold"] = r.all_hold;
            out["any_strict"] = r.any_strict;
            return out;
        },
        py::arg("system"));

    m.def(
        "step_reference",
        [](const bsf::LinearSystem& sys, const std::vector<double>& x) {
            return bsf::step_reference(bsf::build_operator(sys), x);
        },
        py::arg("system"), py::arg("x"), "One Jacobi step of the equivalent fixed-point form");

    m.def(
        "residual_norm",
        [](const bsf::LinearSystem& sys, const std::vector<double>& x) {
            return bsf::residual_norm(sys, x);
        },
        py::arg("system"), py::arg("x"));

    m.def(
        "solve",
        [](const bsf::LinearSystem& sys, const std::string& variant, double eps,
           std::size_t max_iters, std::size_t workers, const std::string& backend) {
            bsf::SolveResult res;
            {
                py::gil_scoped_release release;
                res = solve_system(sys, variant, eps, max_iters, workers, backend);
            }
            py::dict out;
            out["x"] = res.x;
            out["iterations"] = res.iterations;
            out["converged"] = res.converged;
            out["residual"] = res.residual;
            return out;
        },
        py::arg("system"), py::arg("variant") = "sequential", py::arg("eps") = 1e-6,
        py::arg("max_iters") = 10000, py::arg("workers") = 1, py::arg("backend") = "sequential",
        "Solve a diagonally dominant system by Jacobi iteration");
}
