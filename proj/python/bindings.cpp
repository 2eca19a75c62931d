#include "onebit/benchmark.hpp"
#include "onebit/config.hpp"
#include "onebit/oracles.hpp"
#include "onebit/validation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace onebit;

PYBIND11_MODULE(_onebitcs, m) {
    m.doc() = "GAMP reconstruction from one-bit measurements with side information";

    py::class_<SignalPrior>(m, "SignalPrior")
        .def(py::init<double, double>(), py::arg("lam"), py::arg("v_x"))
        .def_property_readonly("lam", &SignalPrior::lambda)
        .def_property_readonly("v_x", &SignalPrior::v_x);

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<double, double>(), py::arg("noise_var"), py::arg("gamma"))
        .def_static("noiseless", &ChannelParams::noiseless)
        .def_property_readonly("noise_var", &ChannelParams::noise_var)
        .def_property_readonly("gamma", &ChannelParams::gamma);

    py::class_<NoSideInfo>(m, "NoSideInfo").def(py::init<>());
    py::class_<AmplitudeLaplacian>(m, "AmplitudeLaplacian")
        .def(py::init<Vec, double>(), py::arg("x_tilde"), py::arg("v_s") = 1.0)
        .def_readwrite("x_tilde", &AmplitudeLaplacian::x_tilde)
        .def_readwrite("v_s", &AmplitudeLaplacian::v_s);
    py::class_<AmplitudeGaussian>(m, "AmplitudeGaussian")
        .def(py::init<Vec, double>(), py::arg("x_tilde"), py::arg("v_s") = 1.0)
        .def_readwrite("x_tilde", &AmplitudeGaussian::x_tilde)
        .def_readwrite("v_s", &AmplitudeGaussian::v_s);
    py::class_<SupportSideInfo>(m, "SupportSideInfo")
        .def(py::init<SignVec, double>(), py::arg("x_tilde"), py::arg("beta") = 0.9)
        .def_readwrite("x_tilde", &SupportSideInfo::x_tilde)
        .def_readwrite("beta", &SupportSideInfo::beta);

    py::class_<GampConfig>(m, "GampConfig")
        .def(py::init<>())
        .def_readwrite("max_inner_iters", &GampConfig::max_inner_iters)
        .def_readwrite("max_outer_iters", &GampConfig::max_outer_iters)
        .def_readwrite("damping", &GampConfig::damping)
        .def_readwrite("tau_floor", &GampConfig::tau_floor)
        .def_readwrite("tau_s_floor", &GampConfig::tau_s_floor)
        .def_readwrite("convergence_tol", &GampConfig::convergence_tol)
        .def_readwrite("em_enabled", &GampConfig::em_enabled)
        .def_readwrite("warm_start", &GampConfig::warm_start);

    py::class_<GampResult>(m, "GampResult")
        .def_readonly("x_hat", &GampResult::x_hat)
        .def_readonly("tau_x", &GampResult::tau_x)
        .def_readonly("active_prob", &GampResult::active_prob)
        .def_readonly("estimated_param", &GampResult::estimated_param)
        .def_readonly("inner_iterations_used", &GampResult::inner_iterations_used)
        .def_readonly("outer_iterations_used", &GampResult::outer_iterations_used)
        .def_readonly("trajectory", &GampResult::trajectory)
        .def_readonly("warnings", &GampResult::warnings);

    m.def("run_noisy1bg", &run_noisy1bg, py::arg("a"), py::arg("y"), py::arg("prior"), py::arg("channel"),
          py::arg("config") = GampConfig{}, py::arg("truth") = std::nullopt);
    m.def("run_with_si", &run_with_si, py::arg("a"), py::arg("y"), py::arg("prior"), py::arg("channel"),
          py::arg("side_info"), py::arg("config") = GampConfig{}, py::arg("truth") = std::nullopt);

    m.def("nmse", [](const Vec& x, const Vec& x_hat) { return nmse(x, x_hat).value; }, py::arg("x_true"),
          py::arg("x_hat"));

    m.def(
        "generate",
        [](int n, int m_, const SignalPrior& prior, const ChannelParams& ch, std::uint64_t seed,
           std::uint64_t stream) {
            Rng rng = make_stream(seed, stream);
            const Mat a = gen_matrix(m_, n, rng);
            const Vec x = gen_signal(prior, n, rng);
            const SignVec y = gen_measurements(x, a, ch, rng);
            return py::make_tuple(a, x, y);
        },
        py::arg("n"), py::arg("m"), py::arg("prior"), py::arg("channel"), py::arg("seed") = 1,
        py::arg("stream") = 0, "Returns (A, x, y).");

    m.def(
        "run_config",
        [](const std::string& json_text) {
            const ExperimentConfig cfg = parse_config(json_text);
            py::gil_scoped_release release;
            return to_csv(run(cfg));
        },
        py::arg("json_text"), "Runs an experiment described by a JSON config; returns the CSV text.");

    m.def(
        "oracle_suite",
        [](std::uint64_t seed, int draws, double tol) {
            return validation::format_checks(validation::run_oracle_suite(seed, draws, tol));
        },
        py::arg("seed") = 1, py::arg("draws") = 500, py::arg("tolerance") = 1e-6);

    m.def("posterior_mean_2d", &validation::oracle_posterior_mean_2d, py::arg("a"), py::arg("y"), py::arg("prior"),
          py::arg("channel"), py::arg("fine") = 201);

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
