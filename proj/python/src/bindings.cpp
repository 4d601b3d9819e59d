// Python bindings for the fanneal core.

#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fanneal/analysis.hpp"
#include "fanneal/commands.hpp"
#include "fanneal/energy.hpp"
#include "fanneal/error.hpp"
#include "fanneal/fbm.hpp"
#include "fanneal/random.hpp"
#include "fanneal/scenario.hpp"
#include "fanneal/steady.hpp"

namespace py = pybind11;
using namespace fanneal;

namespace {

XiChoice xi_choice(const std::string& name) {
    if (name == "paper") return XiChoice::paper;
    if (name == "sqrt") return XiChoice::sqrt;
    throw InvalidArgument("xi must be 'paper' or 'sqrt', got '" + name + "'");
}

py::dict rate_dict(const RateReport& r) {
    py::dict d;
    d["eps"] = r.eps_values;
    d["errors"] = r.errors;
    d["slope"] = r.slope;
    d["prefactor"] = r.prefactor();
    d["r_squared"] = r.r_squared;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Liouville fBm, fractional annealing SDE and linearization toolkit";
    m.attr("__version__") = FANNEAL_VERSION;

    // Module attributes keep the exception types alive; the handles are borrowed.
    static py::handle base = py::exception<Error>(m, "Error", PyExc_RuntimeError);
    static py::handle config = py::exception<ConfigError>(m, "ConfigError", base.ptr());
    static py::handle divergence = py::exception<DivergenceError>(m, "DivergenceError", base.ptr());
    static py::handle convergence = py::exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    static py::handle coupling = py::exception<CouplingError>(m, "CouplingError", base.ptr());
    static py::handle io = py::exception<IoError>(m, "IoError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InvalidArgument& e) {
            py::set_error(PyExc_ValueError, e.what());
        } catch (const ConfigError& e) {
            py::object err = config(e.what());
            err.attr("field") = e.field();
            py::set_error(config, err);
        } catch (const DivergenceError& e) {
            py::set_error(divergence, e.what());
        } catch (const ConvergenceError& e) {
            py::set_error(convergence, e.what());
        } catch (const CouplingError& e) {
            py::set_error(coupling, e.what());
        } catch (const IoError& e) {
            py::set_error(io, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("stream"));

    m.def(
        "sample_wiener",
        [](double t_end, std::size_t n_steps, std::size_t dims, std::uint64_t seed) {
            return sample_wiener(TimeGrid(t_end, n_steps), dims, seed).increments;
        },
        py::arg("t_end"), py::arg("n_steps"), py::arg("dims"), py::arg("seed"),
        "Brownian increments, shape (n_steps, dims).");

    m.def(
        "fbm_path",
        [](double hurst, double epsilon, double t_end, std::size_t n_steps, std::uint64_t seed, std::size_t dims,
           std::size_t dim_index) {
            const auto w = sample_wiener(TimeGrid(t_end, n_steps), dims, seed);
            return fbm_from_wiener(w, HurstParam(hurst), epsilon, dim_index).values;
        },
        py::arg("hurst"), py::arg("epsilon"), py::arg("t_end"), py::arg("n_steps"), py::arg("seed"),
        py::arg("dims") = 1, py::arg("dim_index") = 0,
        "B^{H,eps} at the n_steps + 1 grid nodes, driven by sample_wiener(t_end, n_steps, dims, seed).");

    m.def(
        "liouville_covariance",
        [](double t, double s, double hurst, double epsilon) {
            return liouville_covariance(t, s, HurstParam(hurst), epsilon);
        },
        py::arg("t"), py::arg("s"), py::arg("hurst"), py::arg("epsilon") = 0.0);
    m.def(
        "liouville_covariance_discrete",
        [](double t_end, std::size_t n_steps, std::size_t n, std::size_t k, double hurst, double epsilon) {
            return liouville_covariance_discrete(TimeGrid(t_end, n_steps), n, k, HurstParam(hurst), epsilon);
        },
        py::arg("t_end"), py::arg("n_steps"), py::arg("n"), py::arg("m"), py::arg("hurst"), py::arg("epsilon") = 0.0);
    m.def(
        "mandelbrot_covariance",
        [](double t, double s, double hurst) { return mandelbrot_covariance(t, s, HurstParam(hurst)); },
        py::arg("t"), py::arg("s"), py::arg("hurst"));
    m.def(
        "eps_diff_variance",
        [](double t, double hurst, double epsilon) { return eps_diff_variance(t, HurstParam(hurst), epsilon); },
        py::arg("t"), py::arg("hurst"), py::arg("epsilon"));
    m.def(
        "quadrature_rate",
        [](double hurst, double t, const std::vector<double>& ladder) {
            const auto r = quadrature_rate(HurstParam(hurst), t, ladder);
            py::dict d;
            d["variance"] = rate_dict(r.variance);
            d["rms"] = rate_dict(r.rms);
            return d;
        },
        py::arg("hurst"), py::arg("t"), py::arg("epsilon_ladder"));
    m.def(
        "hurst_estimate", [](const std::vector<double>& values) { return hurst_estimate(values); },
        py::arg("values"));

    py::class_<EnergyFunction>(m, "Energy")
        .def(py::init([](const std::string& name, const std::vector<double>& params) {
                 return builtin_energy(name, params);
             }),
             py::arg("name"), py::arg("params"))
        .def_readonly("name", &EnergyFunction::name)
        .def_readonly("dim", &EnergyFunction::dim)
        .def("value", [](const EnergyFunction& g, const Eigen::VectorXd& x) { return g.value(x); })
        .def("gradient", [](const EnergyFunction& g, const Eigen::VectorXd& x) { return g.gradient(x); })
        .def("hessian", [](const EnergyFunction& g, const Eigen::VectorXd& x) { return g.hessian(x); });

    m.def(
        "find_steady_state",
        [](const EnergyFunction& g, const Eigen::VectorXd& x0) {
            const auto s = find_steady_state(g, x0);
            py::dict d;
            d["point"] = s.point;
            d["gradient_norm"] = s.gradient_norm;
            d["iterations"] = s.iterations;
            return d;
        },
        py::arg("energy"), py::arg("x_init"));

    m.def("expm_general", &expm_general, py::arg("A"), py::arg("tau"));
    m.def(
        "expm_paper",
        [](const Eigen::MatrixXd& a, double tau, const std::string& xi) {
            const auto r = expm_paper(linear_model_from_matrix(a, 0.0), tau, xi_choice(xi));
            return py::make_tuple(r.value, r.deviation);
        },
        py::arg("A"), py::arg("tau"), py::arg("xi") = "paper",
        "Closed-form exponential of a 2x2 drift matrix and its deviation from expm_general.");

    m.def(
        "normalize_scenario", [](const std::string& text) { return scenario_to_json(parse_scenario(text)); },
        py::arg("json_text"), "Validate a scenario and return its canonical JSON with defaults filled in.");
    m.def(
        "run_command",
        [](const std::string& command, const std::string& scenario_json, const std::filesystem::path& out_dir,
           std::optional<std::uint64_t> seed, unsigned threads, bool zero_noise) {
            RunOptions opts;
            opts.out_dir = out_dir;
            opts.seed = seed;
            opts.threads = threads;
            opts.zero_noise = zero_noise;
            py::gil_scoped_release release;
            return run_command(command, parse_scenario(scenario_json), opts).files;
        },
        py::arg("command"), py::arg("scenario_json"), py::arg("out_dir"), py::arg("seed") = py::none(),
        py::arg("threads") = 1, py::arg("zero_noise") = false,
        "Run a CLI command in-process; returns the written file paths.");
    m.attr("commands") = command_names();
}
