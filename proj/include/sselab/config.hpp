#pragma once

#include <string>
#include <vector>

#include "sselab/girsanov.hpp"
#include "sselab/model.hpp"
#include "sselab/trajectory.hpp"

namespace sselab {

// One experiment per file; sections [model], [solver], [ensemble], [checks].
// Text key = value format, '#' comments. No environment variables affect the
// numerics.
struct Config {
    // [model]
    std::string model_name = "damped";
    int dim = 20;
    OscillatorParams osc;        // oscillator / damped / two_photon parameters
    MeasurementParams meas;      // measurement parameters
    double omega = 1.0, A = 1.0, nu = 0.5;
    double beta3 = 0.0, alpha4 = 1.0, alpha5 = 0.0;

    // [solver]
    SolverConfig solver;

    // [checks]
    std::string kind = "nsse"; // nsse | linear | weighted
    std::string init = "fock:0";
    std::vector<std::string> observables{"N"};
    std::vector<double> times;
    bool enforce = false;
    int p = 4;
    double burn_in = -1.0; // < 0: use default_burn_in

    ModelSpec build_model_spec() const;
    State initial_state() const;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Named observable over states: N, N2, Q, P, P0 (|<e_0, x>|²), norm.
StateFunctional make_observable(const std::string& name, int dim);

} // namespace sselab
