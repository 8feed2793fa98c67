#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sselab/hilbert.hpp"

namespace sselab {

// Coefficients of the forced/damped oscillator family:
// H = i b1 (a† - a) + b2 N + b3 (a†)² a²,
// L1 = α1 a, L2 = α2 a†, L3 = α3 N, L4 = α4 a², L5 = α5 (a†)², L6 = α6 N².
struct OscillatorParams {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    std::array<Complex, 6> alpha{};
};

// Simultaneous position/momentum monitoring on Fock quadratures:
// L1 = (kappa/sigma) Q, L2 = kappa sigma P, H = h_alpha P² + h_beta Q².
struct MeasurementParams {
    double kappa = 1.0;
    double sigma = 1.0;
    double h_alpha = 0.0;
    double h_beta = 0.0;
};

using PresetParams = std::variant<std::monostate, OscillatorParams, MeasurementParams>;

// Model (H, L_1..L_K) with the derived effective drift
// G = -iH - 1/2 sum_k L_k* L_k. Immutable after construction.
class ModelSpec {
public:
    int dim() const { return dim_; }
    int channel_count() const { return static_cast<int>(channels_.size()); }
    const FockOperator& hamiltonian() const { return H_; }
    const std::vector<FockOperator>& channels() const { return channels_; }
    const FockOperator& channel(int k) const;
    const FockOperator& effective_drift() const { return G_; }
    const std::string& label() const { return label_; }
    const PresetParams& preset_params() const { return preset_; }

    // maximal ladder degree among channels; interior levels j <= dim-1-maxdeg
    // are unaffected by the truncation
    int max_ladder_degree() const { return maxdeg_; }

    // Re-derives G through the construction path used at build time;
    // bit-identical to effective_drift().
    FockOperator rebuild_effective_drift() const;

private:
    friend ModelSpec build_model(int, const FockOperator&,
                                 const std::vector<FockOperator>&, std::string);
    friend ModelSpec preset_oscillator(const OscillatorParams&, int, std::string);
    friend ModelSpec preset_measurement(const MeasurementParams&, int);

    int dim_ = 0;
    FockOperator H_;
    std::vector<FockOperator> channels_;
    FockOperator G_;
    std::string label_;
    int maxdeg_ = 0;
    PresetParams preset_;
    bool galerkin_exact_ = false; // G built as P_n G P_n of the untruncated model
};

// G from the operators as given (truncated products). Models built this way
// satisfy 2Re<x,Gx> + sum ||L_k x||² = 0 identically on the truncated space.
ModelSpec build_model(int dim, const FockOperator& H,
                      const std::vector<FockOperator>& channels,
                      std::string label = "custom");

// Presets construct the operators on an enlarged space and project, so G is
// exactly P_n G P_n of the untruncated model (the Galerkin convention); the
// conservativity defect is then confined to the top maxdeg levels.
ModelSpec preset_oscillator(const OscillatorParams& p, int dim,
                            std::string label = "oscillator");
ModelSpec preset_damped(double omega, double A, double nu, int dim);
ModelSpec preset_two_photon(double beta3, double alpha4, double alpha5, int dim);
ModelSpec preset_measurement(const MeasurementParams& p, int dim);

// r(x) = 2 Re<x, Gx> + sum_k ||L_k x||²; zero (to rounding) away from the
// truncation boundary, and quantifies the boundary defect otherwise.
double conservativity_residual(const ModelSpec& m, const State& x);

} // namespace sselab
