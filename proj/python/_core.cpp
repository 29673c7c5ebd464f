#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "hocbp/bench.hpp"
#include "hocbp/limiters.hpp"

namespace py = pybind11;
using namespace hocbp;

namespace {

py::array_t<double> to_array(const Field& f) {
    const GridSpec& g = f.grid;
    std::vector<py::ssize_t> shape;
    if (g.dim == 1) shape = {py::ssize_t(g.nodes(0))};
    else shape = {py::ssize_t(g.nodes(1)), py::ssize_t(g.nodes(0))};
    py::array_t<double> a(shape);
    std::copy(f.values.begin(), f.values.end(), a.mutable_data());
    return a;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return std::vector<double>(a.data(), a.data() + a.size());
}

RunConfig make_config(const std::string& problem, std::optional<std::size_t> N, std::optional<double> tau,
                      std::optional<double> cfl, std::optional<double> nu, std::optional<double> T,
                      const std::string& limiter, bool tau_h2, bool strict, std::optional<std::size_t> reference_N) {
    RunConfig c;
    c.problem = problem;
    c.N = N;
    c.tau = tau;
    c.cfl = cfl;
    c.nu = nu;
    c.T = T;
    c.limiter = parse_limiter_mode(limiter);
    c.tau_h2 = tau_h2;
    c.strict = strict;
    c.reference_N = reference_N;
    return c;
}

py::dict summary_dict(const RunSummary& s) {
    py::dict d;
    d["problem"] = s.problem;
    d["N"] = s.N;
    d["tau"] = s.tau;
    d["steps"] = s.nt;
    d["nu"] = s.nu;
    d["T"] = s.T;
    d["limiter"] = to_string(s.limiter);
    d["m"] = s.m;
    d["M"] = s.M;
    d["min"] = s.bounds.min_val;
    d["max"] = s.bounds.max_val;
    d["m_err"] = s.bounds.m_err;
    d["M_err"] = s.bounds.M_err;
    d["mass_err"] = s.mass_err;
    d["max_abs_mass_err"] = s.max_abs_mass_err;
    d["cfl"] = s.conditions.cfl;
    d["conditions_ok"] = s.conditions.all_ok();
    d["warnings"] = s.warnings;
    if (s.errors) {
        d["linf_error"] = s.errors->linf;
        d["l2_error"] = s.errors->l2;
    } else {
        d["linf_error"] = py::none();
        d["l2_error"] = py::none();
    }
    py::list fields;
    for (const auto& f : s.result.fields) fields.append(to_array(f));
    d["fields"] = fields;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "compact convection-diffusion solver with bound-preserving limiting";

    py::register_exception<UnknownProblemError>(m, "UnknownProblemError", PyExc_KeyError);
    py::register_exception<ConditionAbort>(m, "ConditionAbort", PyExc_RuntimeError);

    m.def("problem_names", &problem_names);

    m.def(
        "run",
        [](const std::string& problem, std::optional<std::size_t> N, std::optional<double> tau,
           std::optional<double> cfl, std::optional<double> nu, std::optional<double> T, const std::string& limiter,
           bool tau_h2, bool strict, std::optional<std::size_t> reference_N) {
            RunSummary s;
            {
                py::gil_scoped_release nogil;
                s = run_single(make_config(problem, N, tau, cfl, nu, T, limiter, tau_h2, strict, reference_N));
            }
            return summary_dict(s);
        },
        py::arg("problem"), py::kw_only(), py::arg("N") = py::none(), py::arg("tau") = py::none(),
        py::arg("cfl") = py::none(), py::arg("nu") = py::none(), py::arg("T") = py::none(),
        py::arg("limiter") = "none", py::arg("tau_h2") = false, py::arg("strict") = false,
        py::arg("reference_N") = py::none());

    m.def(
        "convergence",
        [](const std::string& problem, const std::vector<std::size_t>& N_list, const std::string& limiter,
           bool tau_h2, std::optional<double> T) {
            std::vector<ConvergenceRow> rows;
            {
                py::gil_scoped_release nogil;
                rows = run_convergence(
                    make_config(problem, std::nullopt, std::nullopt, std::nullopt, std::nullopt, T, limiter, tau_h2,
                                false, std::nullopt),
                    N_list);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["N"] = r.N;
                d["linf_error"] = r.linf_error;
                d["linf_order"] = r.linf_order ? py::cast(*r.linf_order) : py::none();
                d["l2_error"] = r.l2_error;
                d["l2_order"] = r.l2_order ? py::cast(*r.l2_order) : py::none();
                d["m_err"] = r.m_err;
                d["M_err"] = r.M_err;
                d["mass_err"] = r.mass_err;
                out.append(d);
            }
            return out;
        },
        py::arg("problem"), py::arg("N_list"), py::kw_only(), py::arg("limiter") = "none",
        py::arg("tau_h2") = true, py::arg("T") = py::none());

    m.def(
        "bp_limit",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u, double lo, double hi, double c,
           bool cyclic, bool check_precondition) {
            auto v = to_vector(u);
            auto out = bp_limit({v, lo, hi, c, cyclic ? Topology::Cyclic : Topology::Plain}, check_precondition);
            return py::array_t<double>(py::ssize_t(out.size()), out.data());
        },
        py::arg("u"), py::arg("m"), py::arg("M"), py::arg("c") = 4.0, py::kw_only(), py::arg("cyclic") = true,
        py::arg("check_precondition") = true);

    m.def(
        "tvb_limit",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u, double M_tvb, double h,
           bool cyclic) {
            auto v = to_vector(u);
            auto out = tvb_limit(v, M_tvb, h, cyclic ? Topology::Cyclic : Topology::Plain);
            return py::array_t<double>(py::ssize_t(out.size()), out.data());
        },
        py::arg("u"), py::arg("M_tvb"), py::arg("h"), py::kw_only(), py::arg("cyclic") = true);
}
