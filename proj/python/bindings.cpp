#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pia/cli.hpp"
#include "pia/error.hpp"
#include "pia/problem.hpp"
#include "pia/scalar_pia.hpp"
#include "pia/vector_pia.hpp"

namespace py = pybind11;
using namespace pia;

namespace {

std::vector<cplx> values0(const std::vector<TaylorJet>& v) {
    std::vector<cplx> out;
    for (const auto& j : v) out.push_back(j[0]);
    return out;
}


py::dict correction_dict(const CorrectionSet& c) {
    py::dict d;
    d["x"] = c.x0;
    d["Q2"] = c.Qsq[0];
    d["Q"] = c.Q[0];
    d["eps0"] = c.eps0[0];
    d["Y"] = values0(c.Y);
    d["c_perp"] = c.c_perp;
    d["c"] = c.c_par;
    std::vector<std::vector<cplx>> s;
    for (const auto& v : c.s) s.push_back(values0(v));
    d["s"] = s;
    d["warnings"] = c.warnings;
    return d;
}

py::dict wave_dict(const std::vector<WaveSample>& w) {
    std::vector<double> x;
    std::vector<std::vector<cplx>> u, du, ddu;
    std::vector<cplx> phase;
    for (const auto& s : w) {
        x.push_back(s.x);
        u.push_back(s.u);
        du.push_back(s.u_prime);
        ddu.push_back(s.u_second);
        phase.push_back(s.phase);
    }
    py::dict d;
    d["x"] = x;
    d["u"] = u;
    d["du"] = du;
    d["ddu"] = ddu;
    d["phase"] = phase;
    return d;
}

ProblemSpec with_params(ProblemSpec spec, const std::map<std::string, cplx>& params) {
    for (const auto& [k, v] : params) spec.params[k] = v;
    return spec;
}

}  // namespace

PYBIND11_MODULE(_pypia, m) {
    m.doc() = "Phase-integral approximations for coupled second-order systems";
    static py::exception<Error> pia_error(m, "PiaError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = pia_error;
            PyErr_SetObject(err.ptr(), py::make_tuple(e.what(), kind_name(e.kind())).ptr());
        }
    });

    m.def("example_names", &example_names);
    m.def("example_json", [](const std::string& name) { return problem_to_json(builtin_example(name)).dump(); },
          py::arg("name"));

    py::class_<ReducedProblem>(m, "Problem")
        .def_static(
            "from_example",
            [](const std::string& name, const std::map<std::string, cplx>& params) {
                return make_reduced(with_params(builtin_example(name), params));
            },
            py::arg("name"), py::arg("params") = std::map<std::string, cplx>{})
        .def_static(
            "from_json",
            [](const std::string& text, const std::map<std::string, cplx>& params) {
                return make_reduced(with_params(problem_from_json(nlohmann::json::parse(text)), params));
            },
            py::arg("text"), py::arg("params") = std::map<std::string, cplx>{})
        .def_property_readonly("n", &ReducedProblem::n)
        .def_readonly("lam", &ReducedProblem::lambda)
        .def_readonly("domain_lo", &ReducedProblem::x_lo)
        .def_readonly("domain_hi", &ReducedProblem::x_hi)
        .def("G", [](const ReducedProblem& p, double x) { return eval_matrix(p.G, x, p.params); }, py::arg("x"))
        .def("R", [](const ReducedProblem& p, double x) { return eval_R(p, x); }, py::arg("x"));

    py::class_<VectorEngine>(m, "Engine")
        .def(py::init([](const ReducedProblem& p, const std::string& theory, const std::string& branch, int order,
                         double anchor, const std::string& gauge, const std::string& g, int q_sign) {
                 EngineConfig cfg;
                 cfg.variant = parse_variant(theory);
                 cfg.branch = BranchSelector::parse(branch);
                 cfg.m_max = order;
                 cfg.anchor = anchor;
                 cfg.q_sign = q_sign;
                 if (gauge == "kato") cfg.gauge = Gauge::kato();
                 else if (gauge == "normalized") cfg.gauge = Gauge::normalized();
                 else if (gauge == "raw") cfg.gauge = Gauge::raw(g.empty() ? Expression::number(1.0) : parse_expr(g));
                 else if (!gauge.empty()) throw Error(ErrorKind::InvalidArgument, "unknown gauge '" + gauge + "'");
                 return VectorEngine(p, cfg);
             }),
             py::arg("problem"), py::arg("theory") = "fulling", py::arg("branch") = "0", py::arg("order") = 2,
             py::arg("anchor"), py::arg("gauge") = "", py::arg("g") = "", py::arg("q_sign") = 1)
        .def("at", [](const VectorEngine& e, double x) { return correction_dict(e.at(x)); }, py::arg("x"))
        .def(
            "wave",
            [](const VectorEngine& e, int sign, const std::vector<double>& grid, double lam) {
                return wave_dict(e.wave(sign, grid, lam));
            },
            py::arg("sign"), py::arg("grid"), py::arg("lam"))
        .def("eigenvalues", [](const VectorEngine& e, double x) { return e.evaluator().eigenvalues(x); }, py::arg("x"));

    m.def(
        "scalar_corrections",
        [](const std::string& qsq, double x, int n, const std::map<std::string, cplx>& params) {
            const int order = 2 * n + 4;
            const TaylorJet q2 = eval_expr_jet(parse_expr(qsq), x, order, params);
            return values0(scalar_corrections(epsilon0(q2, TaylorJet(x, order)), q2, n).Y);
        },
        py::arg("qsq"), py::arg("x"), py::arg("n"), py::arg("params") = std::map<std::string, cplx>{},
        "Y_0, Y_2, ..., Y_2n at x for the scalar problem with a = 0");

    m.def("differentiate", [](const std::string& e) { return to_string(diff_expr(parse_expr(e))); }, py::arg("expr"));
    m.def(
        "evaluate",
        [](const std::string& e, double x, const std::map<std::string, cplx>& params) {
            return eval_expr(parse_expr(e), x, params);
        },
        py::arg("expr"), py::arg("x"), py::arg("params") = std::map<std::string, cplx>{});

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "run a CLI command in-process; returns (exit_code, stdout, stderr)");
}
