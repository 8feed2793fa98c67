#pragma once

#include <vector>

#include "sselab/model.hpp"
#include "sselab/trajectory.hpp"

namespace sselab {

// Density matrices are dense Hermitian unit-trace matrices.
using Density = Eigen::MatrixXcd;

// G rho + rho G* + sum_k L_k rho L_k*. trace of the result is the truncation
// defect (zero for exactly conservative models).
Density lindblad_rhs(const Density& rho, const ModelSpec& m);

void validate_density(const Density& rho, double herm_tol = 1e-10,
                      double trace_tol = 1e-10, double psd_tol = 1e-8);

// Classical RK4 on the matrix ODE; re-Hermitized each step and trace-checked.
Density evolve_density(const Density& rho0, const ModelSpec& m, double t_final,
                       double dt, double trace_tol = 1e-6);

// Step size keeping RK4 comfortably inside its stability region for this
// generator.
double stable_ode_dt(const ModelSpec& m);

struct SteadyStateKernel {
    int kernel_dim = 0;
    std::vector<Density> basis;       // unvec'd kernel vectors (not normalized states)
    Eigen::VectorXd singular_values;  // smallest few, ascending
    double rel_tol = 0.0;
    Density state;                    // valid density when kernel_dim == 1
};

// Null space of the vectorized generator; singular values below
// rel_tol * sigma_max count as kernel directions.
SteadyStateKernel steady_state_kernel(const ModelSpec& m, double rel_tol = 1e-10);

// Unique stationary state; throws NonUniqueSteadyState when the kernel
// dimension differs from one.
Density steady_state(const ModelSpec& m, double rel_tol = 1e-10);

double trace_distance(const Density& a, const Density& b);

struct DensityComparison {
    double trace_dist = 0.0;
    // (1/2) sqrt(dim) * Frobenius aggregate of the entrywise MC standard
    // errors; the scale against which trace_dist is judged
    double aggregate_sigma = 0.0;
    Eigen::VectorXd diag_stderr;
    Density rho_mc;
    int n_traj = 0;
    bool degenerate = false; // too few trajectories for error estimates
};

// Weighted ensemble average of |X_t><X_t| against a reference density.
DensityComparison compare_mc_density(const std::vector<Trajectory>& ensemble, double t,
                                     const Density& rho_ref);

} // namespace sselab
