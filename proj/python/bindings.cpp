#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fhn/analysis.hpp"
#include "fhn/config.hpp"
#include "fhn/errors.hpp"
#include "fhn/io.hpp"
#include "fhn/kernel.hpp"
#include "fhn/solver_fd.hpp"
#include "fhn/solver_ie.hpp"

namespace py = pybind11;
using namespace fhn;

namespace {

py::array_t<double> matrix(const Field& f) {
    py::array_t<double> a({f.grid.nx, f.grid.nt});
    std::copy(f.values.begin(), f.values.end(), a.mutable_data());
    return a;
}

py::dict to_dict(const Solution& sol) {
    py::dict d;
    d["x"] = py::array_t<double>(sol.u.grid.x_nodes.size(), sol.u.grid.x_nodes.data());
    d["t"] = py::array_t<double>(sol.u.grid.t_nodes.size(), sol.u.grid.t_nodes.data());
    d["u"] = matrix(sol.u);
    d["v"] = matrix(sol.v);
    d["report"] = py::module_::import("json").attr("loads")(run_report(sol).dump());
    return d;
}

std::vector<Override> split_sets(const std::vector<std::string>& sets) {
    std::vector<Override> out;
    for (const auto& s : sets) out.push_back(parse_override(s));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FitzHugh-Nagumo strip kernels, solvers and bound checks";

    static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<DomainError>(m, "DomainError", base);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, double, double, double, double>(), py::arg("epsilon"), py::arg("a"), py::arg("b"),
             py::arg("beta"), py::arg("L"))
        .def_readonly("epsilon", &ModelParams::epsilon)
        .def_readonly("a", &ModelParams::a)
        .def_readonly("b", &ModelParams::b)
        .def_readonly("beta", &ModelParams::beta)
        .def_readonly("L", &ModelParams::L);

    py::class_<KernelContext>(m, "KernelContext")
        .def(py::init([](const ModelParams& p) { return KernelContext(p); }))
        .def_property_readonly("omega", [](const KernelContext& c) { return c.consts().omega; })
        .def_property_readonly("beta0", [](const KernelContext& c) { return c.consts().beta0; })
        .def_property_readonly("sigma0", [](const KernelContext& c) { return c.consts().sigma0; })
        .def_property_readonly("C0", [](const KernelContext& c) { return c.consts().C0; });

    m.def("eval_K", [](py::array_t<double> x, py::array_t<double> t, const KernelContext& c) {
              return py::vectorize([&c](double x, double t) { return eval_K(x, t, c); })(x, t);
          },
          py::arg("x"), py::arg("t"), py::arg("ctx"));
    m.def("eval_theta",
          [](py::array_t<double> x, py::array_t<double> t, const KernelContext& c) {
              return py::vectorize([&c](double x, double t) { return eval_theta(x, t, c); })(x, t);
          },
          py::arg("x"), py::arg("t"), py::arg("ctx"));
    m.def("eval_G", &eval_G, py::arg("x"), py::arg("xi"), py::arg("t"), py::arg("ctx"));
    m.def("laplace_K_closed", &laplace_K_closed, py::arg("x"), py::arg("s"), py::arg("ctx"));
    m.def("laplace_theta_closed", &laplace_theta_closed, py::arg("y"), py::arg("s"), py::arg("ctx"));
    m.def("steady_profile", &steady_profile, py::arg("x"), py::arg("ctx"));

    m.def(
        "solve_ie",
        [](const std::string& yaml, const std::vector<std::string>& sets) {
            const RunSettings s = load_settings_from_string(yaml, split_sets(sets));
            const KernelContext ctx(s.spec.params, s.kernel);
            py::gil_scoped_release nogil;
            Solution sol = solve_ie(s.spec, make_grid(s.spec.params.L, s.spec.T, s.nx, s.nt), ctx, s.ie);
            py::gil_scoped_acquire gil;
            return to_dict(sol);
        },
        py::arg("config"), py::arg("sets") = std::vector<std::string>{},
        "Integral-equation solve of a YAML problem; returns x, t, u, v and the run report.");
    m.def(
        "solve_fd",
        [](const std::string& yaml, const std::vector<std::string>& sets) {
            const RunSettings s = load_settings_from_string(yaml, split_sets(sets));
            py::gil_scoped_release nogil;
            Solution sol = solve_fd(s.spec, s.fd);
            py::gil_scoped_acquire gil;
            return to_dict(sol);
        },
        py::arg("config"), py::arg("sets") = std::vector<std::string>{});
    m.def(
        "verify",
        [](const std::vector<std::string>& checks, const std::string& yaml, const std::vector<std::string>& sets) {
            const RunSettings s = load_settings_from_string(yaml, split_sets(sets), Purpose::verify);
            std::string text;
            {
                py::gil_scoped_release nogil;
                text = to_json(run_checks(s.verify, checks)).dump();
            }
            return py::module_::import("json").attr("loads")(text);
        },
        py::arg("checks") = std::vector<std::string>{}, py::arg("config") = "",
        py::arg("sets") = std::vector<std::string>{}, "Runs the named checks; returns a list of report dicts.");
    m.def("check_names", &check_names);
}
