#include "wgm/transfer_matrix.hpp"

#include <cmath>

#include "wgm/errors.hpp"

namespace wgm::tm {

namespace {

constexpr double kSingularDenominator = 1e-15;

Complex checked_ratio(Complex numerator, Complex denominator, const char* where) {
    if (std::abs(denominator) < kSingularDenominator) {
        throw SingularityError(std::string(where) + ": resonance singularity (lossless critically coupled point)");
    }
    return numerator / denominator;
}

// Round-trip response of the scatterer loop, (t_s - t alpha e^{i theta}) / (1 - t_s t alpha e^{i theta}).
Complex scatterer_factor(Complex loop, double t, const ScattererCoefficients& sc) {
    return checked_ratio(sc.t_s - t * loop, 1.0 - sc.t_s * t * loop, "transmission (scatterer loop)");
}

Complex ring_response(Complex loop, double t, Complex inserted, const char* where) {
    return checked_ratio(-t + loop * inserted, -1.0 + t * loop * inserted, where);
}

}  // namespace

ScattererCoefficients ScattererCoefficients::from_strength(double epsilon) {
    if (!(epsilon >= 0.0)) {
        throw DomainError("scatterer strength epsilon must be non-negative");
    }
    return {Complex(std::cos(epsilon), 0.0), Complex(0.0, std::sin(epsilon)), epsilon};
}

TransferMatrix4 build_coupling_matrix(const CouplerCoefficients& coupler) {
    if (coupler.kappa_c == 0.0) {
        throw SingularityError("build_coupling_matrix: coupling coefficient is zero");
    }
    const Complex t(coupler.t, 0.0);
    const Complex prefactor = 1.0 / std::conj(Complex(coupler.kappa_c, 0.0));
    TransferMatrix4 m = TransferMatrix4::Zero();
    m(0, 0) = -1.0;
    m(0, 1) = std::conj(t);
    m(1, 0) = -t;
    m(1, 1) = 1.0;
    m.block<2, 2>(2, 2) = m.block<2, 2>(0, 0);
    return prefactor * m;
}

TransferMatrix4 build_propagation_matrix(double theta1, double theta2, double alpha1, double alpha2) {
    if (!(alpha1 > 0.0) || !(alpha2 > 0.0) || alpha1 > 1.0 || alpha2 > 1.0) {
        throw SingularityError("build_propagation_matrix: arc attenuations must lie in (0, 1]");
    }
    TransferMatrix4 m = TransferMatrix4::Zero();
    m(0, 0) = std::polar(1.0 / alpha1, -theta1);
    m(1, 1) = std::polar(alpha2, theta2);
    m(2, 2) = std::polar(1.0 / alpha2, -theta2);
    m(3, 3) = std::polar(alpha1, theta1);
    return m;
}

Complex transmission_case1(double theta, double t, double alpha) {
    return ring_response(std::polar(alpha, theta), t, 1.0, "transmission_case1");
}

Complex transmission_case2(double theta, double t, double alpha, const ScattererCoefficients& sc) {
    const Complex loop = std::polar(alpha, theta);
    return ring_response(loop, t, scatterer_factor(loop, t, sc), "transmission_case2");
}

Complex transmission_case3(double theta, double t, double alpha, Complex t_qe) {
    return ring_response(std::polar(alpha, theta), t, t_qe, "transmission_case3");
}

Complex transmission_case4(double theta, double t, double alpha, const ScattererCoefficients& sc, Complex t_qe) {
    const Complex loop = std::polar(alpha, theta);
    return ring_response(loop, t, t_qe * scatterer_factor(loop, t, sc), "transmission_case4");
}

Complex transmission(const SystemConfig& config, double cavity_detuning) {
    const SystemConfig cfg = apply_direction(config);
    const double kappa_tot = cfg.rates.kappa_tot();
    if (kappa_tot > 0.0 && std::abs(cavity_detuning) > kMaxDetuningOverKappaTot * kappa_tot) {
        throw DomainError("transmission: |delta1| beyond 1000 kappa_tot leaves the first-order regime");
    }
    const double theta = detuning_to_phase(cavity_detuning, cfg.geometry.round_trip_time());
    const double t = cfg.coupler.t;
    const double alpha = cfg.coupler.alpha;
    const bool has_emitter = cfg.rates.emitter_decay > 0.0;
    const bool has_scatterer = cfg.rates.epsilon > 0.0;

    if (!has_emitter) {
        return has_scatterer
                   ? transmission_case2(theta, t, alpha, ScattererCoefficients::from_strength(cfg.rates.epsilon))
                   : transmission_case1(theta, t, alpha);
    }
    const Complex t_qe = qe_transmission(cfg.emitter_detuning(cavity_detuning), cfg.rates.gamma,
                                         cfg.rates.emitter_decay);
    return has_scatterer
               ? transmission_case4(theta, t, alpha, ScattererCoefficients::from_strength(cfg.rates.epsilon), t_qe)
               : transmission_case3(theta, t, alpha, t_qe);
}

}  // namespace wgm::tm
