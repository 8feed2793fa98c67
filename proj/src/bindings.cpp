#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sselab/config.hpp"
#include "sselab/criteria.hpp"
#include "sselab/girsanov.hpp"
#include "sselab/lindblad.hpp"
#include "sselab/nsse.hpp"
#include "sselab/sse_linear.hpp"
#include "sselab/stationary.hpp"

namespace py = pybind11;
using namespace sselab;

namespace {

FockOperator from_dense(const DenseMatrix& d) {
    std::vector<Triplet> t;
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
            if (d(i, j) != Complex(0.0, 0.0)) t.emplace_back(i, j, d(i, j));
    return FockOperator(static_cast<int>(d.rows()), t);
}

Eigen::MatrixXcd states_matrix(const Trajectory& tr) {
    const auto n = static_cast<Eigen::Index>(tr.states.size());
    const auto dim = tr.states.empty() ? 0 : tr.states.front().size();
    Eigen::MatrixXcd out(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) out.row(i) = tr.states[static_cast<std::size_t>(i)];
    return out;
}

OscillatorParams make_osc(double beta1, double beta2, double beta3,
                          std::vector<Complex> alpha) {
    OscillatorParams p;
    p.beta1 = beta1;
    p.beta2 = beta2;
    p.beta3 = beta3;
    for (std::size_t k = 0; k < alpha.size() && k < 6; ++k) p.alpha[k] = alpha[k];
    return p;
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "stochastic Schrodinger equation laboratory on truncated Fock spaces";

    py::register_exception<DimensionMismatch>(mod, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<BlowUpError>(mod, "BlowUpError", PyExc_RuntimeError);
    py::register_exception<DegenerateStateError>(mod, "DegenerateStateError", PyExc_RuntimeError);
    py::register_exception<NonUniqueSteadyState>(mod, "NonUniqueSteadyState", PyExc_RuntimeError);
    py::register_exception<UnboundedFormError>(mod, "UnboundedFormError", PyExc_RuntimeError);

    py::class_<OscillatorParams>(mod, "OscillatorParams")
        .def(py::init(&make_osc), py::arg("beta1") = 0.0, py::arg("beta2") = 0.0,
             py::arg("beta3") = 0.0, py::arg("alpha") = std::vector<Complex>{})
        .def_readwrite("beta1", &OscillatorParams::beta1)
        .def_readwrite("beta2", &OscillatorParams::beta2)
        .def_readwrite("beta3", &OscillatorParams::beta3)
        .def_property(
            "alpha",
            [](const OscillatorParams& p) {
                return std::vector<Complex>(p.alpha.begin(), p.alpha.end());
            },
            [](OscillatorParams& p, const std::vector<Complex>& a) {
                for (std::size_t k = 0; k < a.size() && k < 6; ++k) p.alpha[k] = a[k];
            });

    py::class_<MeasurementParams>(mod, "MeasurementParams")
        .def(py::init([](double kappa, double sigma, double h_alpha, double h_beta) {
                 return MeasurementParams{kappa, sigma, h_alpha, h_beta};
             }),
             py::arg("kappa") = 1.0, py::arg("sigma") = 1.0, py::arg("h_alpha") = 0.0,
             py::arg("h_beta") = 0.0);

    py::class_<ModelSpec>(mod, "ModelSpec")
        .def_property_readonly("dim", &ModelSpec::dim)
        .def_property_readonly("channel_count", &ModelSpec::channel_count)
        .def_property_readonly("label", &ModelSpec::label)
        .def_property_readonly("max_ladder_degree", &ModelSpec::max_ladder_degree)
        .def("hamiltonian", [](const ModelSpec& m) { return m.hamiltonian().dense(); })
        .def("effective_drift", [](const ModelSpec& m) { return m.effective_drift().dense(); })
        .def("channel", [](const ModelSpec& m, int k) { return m.channel(k).dense(); });

    mod.def(
        "annihilation", [](int dim) { return ladder_ops(dim).a.dense(); }, py::arg("dim"));
    mod.def(
        "creation", [](int dim) { return ladder_ops(dim).a_dagger.dense(); }, py::arg("dim"));
    mod.def(
        "number", [](int dim) { return ladder_ops(dim).number.dense(); }, py::arg("dim"));
    mod.def(
        "position", [](int dim) { return quadratures(dim).q.dense(); }, py::arg("dim"));
    mod.def(
        "momentum", [](int dim) { return quadratures(dim).p.dense(); }, py::arg("dim"));
    mod.def("basis_state", &basis_state, py::arg("dim"), py::arg("level"));

    mod.def(
        "build_model",
        [](int dim, const DenseMatrix& h, const std::vector<DenseMatrix>& channels,
           const std::string& label) {
            std::vector<FockOperator> ls;
            ls.reserve(channels.size());
            for (const auto& c : channels) ls.push_back(from_dense(c));
            return build_model(dim, from_dense(h), ls, label);
        },
        py::arg("dim"), py::arg("hamiltonian"), py::arg("channels"),
        py::arg("label") = "custom");
    mod.def("preset_oscillator", &preset_oscillator, py::arg("params"), py::arg("dim"),
            py::arg("label") = "oscillator");
    mod.def("preset_damped", &preset_damped, py::arg("omega"), py::arg("A"), py::arg("nu"),
            py::arg("dim"));
    mod.def("preset_two_photon", &preset_two_photon, py::arg("beta3"), py::arg("alpha4"),
            py::arg("alpha5"), py::arg("dim"));
    mod.def("preset_measurement", &preset_measurement, py::arg("params"), py::arg("dim"));
    mod.def("conservativity_residual", &conservativity_residual, py::arg("model"),
            py::arg("state"));

    mod.def("drift_nonlinear", &drift_nonlinear, py::arg("y"), py::arg("model"));
    mod.def("diffusion_nonlinear", &diffusion_nonlinear, py::arg("y"), py::arg("model"),
            py::arg("channel"));

    py::enum_<Scheme>(mod, "Scheme")
        .value("euler_maruyama", Scheme::EulerMaruyama)
        .value("semi_implicit", Scheme::SemiImplicit);

    py::class_<SolverConfig>(mod, "SolverConfig")
        .def(py::init([](double dt, double t_final, Scheme scheme, std::uint64_t seed,
                         int n_traj, int record_stride, bool record_noise, bool renormalize,
                         int threads) {
                 SolverConfig c;
                 c.dt = dt;
                 c.t_final = t_final;
                 c.scheme = scheme;
                 c.seed = seed;
                 c.n_traj = n_traj;
                 c.record_stride = record_stride;
                 c.record_noise = record_noise;
                 c.renormalize = renormalize;
                 c.threads = threads;
                 c.validate();
                 return c;
             }),
             py::arg("dt") = 1e-3, py::arg("t_final") = 1.0,
             py::arg("scheme") = Scheme::EulerMaruyama, py::arg("seed") = 0,
             py::arg("n_traj") = 1, py::arg("record_stride") = 1,
             py::arg("record_noise") = false, py::arg("renormalize") = true,
             py::arg("threads") = 1)
        .def_readwrite("dt", &SolverConfig::dt)
        .def_readwrite("t_final", &SolverConfig::t_final)
        .def_readwrite("seed", &SolverConfig::seed)
        .def_readwrite("n_traj", &SolverConfig::n_traj)
        .def_readwrite("record_stride", &SolverConfig::record_stride)
        .def_readwrite("record_noise", &SolverConfig::record_noise)
        .def_readwrite("renormalize", &SolverConfig::renormalize)
        .def_readwrite("threads", &SolverConfig::threads);

    py::class_<Trajectory>(mod, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("sq_norm", &Trajectory::sq_norm)
        .def_readonly("weight", &Trajectory::weight)
        .def_readonly("dt", &Trajectory::dt)
        .def_readonly("n_steps", &Trajectory::n_steps)
        .def_property_readonly("states", &states_matrix)
        .def_property_readonly("noise", [](const Trajectory& tr) { return tr.noise; });

    mod.def(
        "simulate_linear",
        [](const ModelSpec& m, const State& xi, const SolverConfig& cfg, long traj_index) {
            GaussianStream stream(cfg.seed, kStreamLinear,
                                  static_cast<std::uint64_t>(traj_index));
            return simulate_linear(m, xi, cfg, stream, traj_index);
        },
        py::arg("model"), py::arg("xi"), py::arg("config"), py::arg("traj_index") = 0);
    mod.def(
        "simulate_nsse",
        [](const ModelSpec& m, const State& x0, const SolverConfig& cfg, long traj_index) {
            GaussianStream stream(cfg.seed, kStreamNonlinear,
                                  static_cast<std::uint64_t>(traj_index));
            return simulate_nsse(m, x0, cfg, stream, traj_index);
        },
        py::arg("model"), py::arg("x0"), py::arg("config"), py::arg("traj_index") = 0);
    mod.def("run_ensemble_linear", &run_ensemble_linear, py::arg("model"), py::arg("xi"),
            py::arg("config"), py::arg("purpose_tag") = kStreamLinear);
    mod.def("run_ensemble_nsse", &run_ensemble_nsse, py::arg("model"), py::arg("x0"),
            py::arg("config"), py::arg("purpose_tag") = kStreamNonlinear);

    mod.def("normalize_and_weight", &normalize_and_weight, py::arg("trajectory"));
    mod.def("shifted_noise", &shifted_noise, py::arg("trajectory"), py::arg("model"));
    mod.def(
        "weighted_expectation",
        [](const std::vector<Trajectory>& ens, const std::string& observable, double t,
           int dim) {
            const auto est = weighted_expectation(ens, make_observable(observable, dim), t);
            return py::make_tuple(est.value, est.stderr_, est.ess);
        },
        py::arg("ensemble"), py::arg("observable"), py::arg("t"), py::arg("dim"));

    mod.def("lindblad_rhs", &lindblad_rhs, py::arg("rho"), py::arg("model"));
    mod.def("evolve_density", &evolve_density, py::arg("rho0"), py::arg("model"),
            py::arg("t_final"), py::arg("dt"), py::arg("trace_tol") = 1e-6);
    mod.def("steady_state", &steady_state, py::arg("model"), py::arg("rel_tol") = 1e-10);
    mod.def(
        "steady_state_kernel",
        [](const ModelSpec& m, double rel_tol) {
            const auto k = steady_state_kernel(m, rel_tol);
            return py::make_tuple(k.kernel_dim, k.basis);
        },
        py::arg("model"), py::arg("rel_tol") = 1e-10);
    mod.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));

    mod.def(
        "time_average",
        [](const Trajectory& tr, const std::string& observable, int dim, double burn_in) {
            const auto r = time_average(tr, make_observable(observable, dim), burn_in);
            return py::make_tuple(r.final_value, r.batch_stderr, r.running_values);
        },
        py::arg("trajectory"), py::arg("observable"), py::arg("dim"), py::arg("burn_in"));

    mod.def(
        "drift_form_diagonal",
        [](int p, const ModelSpec& m, int lo, int hi) {
            return drift_form_diagonal(number_power(m.dim(), p), m, lo, hi);
        },
        py::arg("p"), py::arg("model"), py::arg("level_lo"), py::arg("level_hi"));
    mod.def(
        "leading_slope_estimate",
        [](int p, const ModelSpec& m, int j) {
            return leading_slope_estimate(number_power(m.dim(), p), m, p, j);
        },
        py::arg("p"), py::arg("model"), py::arg("j"));
    mod.def(
        "estimate_growth_constants",
        [](int p, const ModelSpec& m) {
            const auto c = estimate_growth_constants(number_power(m.dim(), p), m);
            return py::make_tuple(c.alpha, c.beta);
        },
        py::arg("p"), py::arg("model"));
    mod.def(
        "estimate_lyapunov_pair",
        [](int p, const ModelSpec& m) {
            const auto c = estimate_lyapunov_pair(number_power(m.dim(), p), m);
            return py::make_tuple(c.alpha, c.beta);
        },
        py::arg("p"), py::arg("model"));
    mod.def("well_posed_predicate", &well_posed_predicate, py::arg("params"));
    mod.def("stationarity_predicate", &stationarity_predicate, py::arg("params"), py::arg("p"));
}
