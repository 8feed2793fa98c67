#include "sselab/model.hpp"

#include <cmath>

namespace sselab {

namespace {

constexpr int kExtraLevels = 4; // covers products of degree-2 channels

FockOperator derive_drift(const FockOperator& H, const std::vector<FockOperator>& channels) {
    FockOperator g = (-kI) * H;
    for (const auto& l : channels)
        g = g - Complex(0.5, 0.0) * (l.adjoint() * l);
    return g;
}

FockOperator oscillator_hamiltonian(const OscillatorParams& p, int dim) {
    const auto l = ladder_ops(dim);
    FockOperator h = FockOperator::zero(dim);
    if (p.beta1 != 0.0) h = h + (kI * Complex(p.beta1, 0.0)) * (l.a_dagger - l.a);
    if (p.beta2 != 0.0) h = h + Complex(p.beta2, 0.0) * l.number;
    if (p.beta3 != 0.0)
        h = h + Complex(p.beta3, 0.0) * (l.a_dagger * l.a_dagger * l.a * l.a);
    return h;
}

std::vector<FockOperator> oscillator_channels(const OscillatorParams& p, int dim) {
    const auto l = ladder_ops(dim);
    std::vector<FockOperator> out;
    auto push = [&](Complex alpha, const FockOperator& op) {
        if (alpha != Complex(0.0, 0.0)) out.push_back(alpha * op);
    };
    push(p.alpha[0], l.a);
    push(p.alpha[1], l.a_dagger);
    push(p.alpha[2], l.number);
    push(p.alpha[3], l.a * l.a);
    push(p.alpha[4], l.a_dagger * l.a_dagger);
    push(p.alpha[5], l.number * l.number);
    return out;
}

int channel_maxdeg(const std::vector<FockOperator>& channels) {
    int d = 0;
    for (const auto& l : channels) d = std::max(d, l.bandwidth());
    return d;
}

void check_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

} // namespace

const FockOperator& ModelSpec::channel(int k) const {
    if (k < 0 || k >= channel_count())
        throw std::out_of_range("ModelSpec::channel: index out of range");
    return channels_[static_cast<std::size_t>(k)];
}

FockOperator ModelSpec::rebuild_effective_drift() const {
    if (!galerkin_exact_) return derive_drift(H_, channels_);
    if (const auto* osc = std::get_if<OscillatorParams>(&preset_)) {
        const int ext = dim_ + kExtraLevels;
        return derive_drift(oscillator_hamiltonian(*osc, ext),
                            oscillator_channels(*osc, ext))
            .truncated(dim_);
    }
    if (const auto* mp = std::get_if<MeasurementParams>(&preset_)) {
        const int ext = dim_ + kExtraLevels;
        const auto quad = quadratures(ext);
        FockOperator h = Complex(mp->h_alpha, 0.0) * (quad.p * quad.p) +
                         Complex(mp->h_beta, 0.0) * (quad.q * quad.q);
        std::vector<FockOperator> ls{Complex(mp->kappa / mp->sigma, 0.0) * quad.q,
                                     Complex(mp->kappa * mp->sigma, 0.0) * quad.p};
        return derive_drift(h, ls).truncated(dim_);
    }
    throw std::logic_error("ModelSpec: missing preset parameters");
}

ModelSpec build_model(int dim, const FockOperator& H,
                      const std::vector<FockOperator>& channels, std::string label) {
    if (H.dim() != dim) throw DimensionMismatch("build_model: H dimension mismatch");
    for (const auto& l : channels)
        if (l.dim() != dim) throw DimensionMismatch("build_model: channel dimension mismatch");
    if (H.symmetry() != FockOperator::Symmetry::Hermitian)
        throw std::invalid_argument("build_model: H must be Hermitian");

    ModelSpec m;
    m.dim_ = dim;
    m.H_ = H;
    m.channels_ = channels;
    m.G_ = derive_drift(H, channels);
    m.label_ = std::move(label);
    m.maxdeg_ = channel_maxdeg(channels);
    return m;
}

ModelSpec preset_oscillator(const OscillatorParams& p, int dim, std::string label) {
    if (dim < 2) throw std::invalid_argument("preset_oscillator: dim must be >= 2");
    check_finite(p.beta1, "beta1");
    check_finite(p.beta2, "beta2");
    check_finite(p.beta3, "beta3");
    for (const auto& a : p.alpha) {
        check_finite(a.real(), "alpha");
        check_finite(a.imag(), "alpha");
    }

    const int ext = dim + kExtraLevels;
    FockOperator h_ext = oscillator_hamiltonian(p, ext);
    std::vector<FockOperator> l_ext = oscillator_channels(p, ext);
    FockOperator g_ext = derive_drift(h_ext, l_ext);

    ModelSpec m;
    m.dim_ = dim;
    m.H_ = h_ext.truncated(dim);
    m.channels_.reserve(l_ext.size());
    for (const auto& l : l_ext) m.channels_.push_back(l.truncated(dim));
    m.G_ = g_ext.truncated(dim);
    m.label_ = std::move(label);
    m.maxdeg_ = channel_maxdeg(m.channels_);
    m.preset_ = p;
    m.galerkin_exact_ = true;
    return m;
}

ModelSpec preset_damped(double omega, double A, double nu, int dim) {
    if (!(omega > 0.0) || !(A > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("preset_damped: omega, A, nu must be > 0");
    OscillatorParams p;
    p.beta2 = omega;
    p.alpha[0] = Complex(std::sqrt(A * (nu + 1.0)), 0.0);
    p.alpha[1] = Complex(std::sqrt(A * nu), 0.0);
    return preset_oscillator(p, dim, "damped");
}

ModelSpec preset_two_photon(double beta3, double alpha4, double alpha5, int dim) {
    if (!(alpha4 > 0.0)) throw std::invalid_argument("preset_two_photon: alpha4 must be > 0");
    if (alpha5 < 0.0) throw std::invalid_argument("preset_two_photon: alpha5 must be >= 0");
    OscillatorParams p;
    p.beta3 = beta3;
    p.alpha[3] = Complex(alpha4, 0.0);
    p.alpha[4] = Complex(alpha5, 0.0);
    return preset_oscillator(p, dim, "two_photon");
}

ModelSpec preset_measurement(const MeasurementParams& p, int dim) {
    if (dim < 2) throw std::invalid_argument("preset_measurement: dim must be >= 2");
    if (!(p.kappa > 0.0) || !(p.sigma > 0.0))
        throw std::invalid_argument("preset_measurement: kappa, sigma must be > 0");
    check_finite(p.h_alpha, "h_alpha");
    check_finite(p.h_beta, "h_beta");

    const int ext = dim + kExtraLevels;
    const auto quad = quadratures(ext);
    FockOperator h_ext = Complex(p.h_alpha, 0.0) * (quad.p * quad.p) +
                         Complex(p.h_beta, 0.0) * (quad.q * quad.q);
    std::vector<FockOperator> l_ext{Complex(p.kappa / p.sigma, 0.0) * quad.q,
                                    Complex(p.kappa * p.sigma, 0.0) * quad.p};
    FockOperator g_ext = derive_drift(h_ext, l_ext);

    ModelSpec m;
    m.dim_ = dim;
    m.H_ = h_ext.truncated(dim);
    for (const auto& l : l_ext) m.channels_.push_back(l.truncated(dim));
    m.G_ = g_ext.truncated(dim);
    m.label_ = "measurement";
    m.maxdeg_ = channel_maxdeg(m.channels_);
    m.preset_ = p;
    m.galerkin_exact_ = true;
    return m;
}

double conservativity_residual(const ModelSpec& m, const State& x) {
    if (x.size() != m.dim())
        throw DimensionMismatch("conservativity_residual: dimension mismatch");
    double r = 2.0 * expect_real(m.effective_drift(), x);
    for (const auto& l : m.channels()) r += l.apply(x).squaredNorm();
    return r;
}

} // namespace sselab
