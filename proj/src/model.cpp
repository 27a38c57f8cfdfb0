#include "wgm/model.hpp"

#include <cmath>
#include <sstream>

#include "wgm/errors.hpp"

namespace wgm {

namespace {

constexpr double kBridgeRelativeTolerance = 1e-9;

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw DomainError(message);
    }
}

bool relative_match(double a, double b, double tol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= tol * scale;
}

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

Direction parse_direction(std::string_view s) {
    if (s == "forward") return Direction::Forward;
    if (s == "backward") return Direction::Backward;
    throw DomainError("unknown direction '" + std::string(s) + "' (expected forward or backward)");
}

std::string_view to_string(BridgeForm f) { return f == BridgeForm::Exact ? "exact" : "first_order"; }

BridgeForm parse_bridge_form(std::string_view s) {
    if (s == "exact") return BridgeForm::Exact;
    if (s == "first_order") return BridgeForm::FirstOrder;
    throw DomainError("unknown bridge form '" + std::string(s) + "' (expected exact or first_order)");
}

RingGeometry RingGeometry::make(double radius, double effective_index, double free_spectral_range,
                                double resonance) {
    require(radius > 0.0, "ring radius must be positive");
    require(effective_index > 0.0, "effective index must be positive");
    require(free_spectral_range > 0.0, "free spectral range must be positive");
    require(resonance > 0.0, "resonance frequency must be positive");
    RingGeometry g{radius, effective_index, free_spectral_range, resonance, 0};
    const double m = g.exact_modal_number();
    require(m >= 0.5, "geometry implies a modal number below 1");
    g.modal_number = static_cast<int>(std::lround(m));
    return g;
}

CouplerCoefficients CouplerCoefficients::lossless(double t, double alpha) {
    require(t >= 0.0 && t <= 1.0, "coupler transmission t must lie in [0, 1]");
    require(alpha > 0.0 && alpha <= 1.0, "round-trip attenuation alpha must lie in (0, 1]");
    return {t, std::sqrt(std::max(0.0, 1.0 - t * t)), alpha};
}

CavityRates bridge_coupler_to_rates(const CouplerCoefficients& coupler, double free_spectral_range,
                                    BridgeForm form) {
    require(free_spectral_range > 0.0, "free spectral range must be positive");
    require(coupler.t > 0.0, "coupler transmission t must be positive to define kappa_ex");
    require(coupler.alpha > 0.0, "round-trip attenuation alpha must be positive to define kappa_in");
    if (form == BridgeForm::Exact) {
        return {-std::log(coupler.alpha) * free_spectral_range, -std::log(coupler.t) * free_spectral_range};
    }
    return {(1.0 - coupler.alpha) * free_spectral_range, (1.0 - coupler.t) * free_spectral_range};
}

CouplerCoefficients bridge_rates_to_coupler(double kappa_in, double kappa_ex, double free_spectral_range,
                                            BridgeForm form) {
    require(free_spectral_range > 0.0, "free spectral range must be positive");
    require(kappa_in >= 0.0 && kappa_ex >= 0.0, "cavity rates must be non-negative");
    const double tau = 1.0 / free_spectral_range;
    if (form == BridgeForm::Exact) {
        return CouplerCoefficients::lossless(std::exp(-kappa_ex * tau), std::exp(-kappa_in * tau));
    }
    require(kappa_in * tau < 1.0 && kappa_ex * tau <= 1.0, "first-order bridge needs kappa * tau_rt < 1");
    return CouplerCoefficients::lossless(1.0 - kappa_ex * tau, 1.0 - kappa_in * tau);
}

double bridge_emitter(double emitter_decay, double free_spectral_range, double kappa_tot) {
    require(emitter_decay >= 0.0, "emitter decay Gamma must be non-negative");
    require(2.0 * free_spectral_range > kappa_tot, "bridge requires 2F > kappa_tot");
    return std::sqrt(emitter_decay * (2.0 * free_spectral_range - kappa_tot));
}

double emitter_decay_from_coupling(double g, double free_spectral_range, double kappa_tot) {
    require(g >= 0.0, "coupling g must be non-negative");
    require(2.0 * free_spectral_range > kappa_tot, "bridge requires 2F > kappa_tot");
    return g * g / (2.0 * free_spectral_range - kappa_tot);
}

double bridge_scatterer(double epsilon, double free_spectral_range) {
    require(epsilon >= 0.0, "scatterer strength epsilon must be non-negative");
    require(free_spectral_range > 0.0, "free spectral range must be positive");
    return epsilon * free_spectral_range;
}

double scatterer_strength_from_rate(double h, double free_spectral_range) {
    require(h >= 0.0, "backscatter coupling h must be non-negative");
    require(free_spectral_range > 0.0, "free spectral range must be positive");
    return h / free_spectral_range;
}

Complex qe_transmission(double emitter_detuning, double gamma, double emitter_decay) {
    require(gamma >= 0.0 && emitter_decay >= 0.0, "emitter rates must be non-negative");
    if (emitter_detuning == 0.0 && gamma == 0.0 && emitter_decay == 0.0) {
        throw SingularityError("qe_transmission: 0/0 at zero detuning with no emitter dissipation");
    }
    return Complex(emitter_detuning, gamma - emitter_decay) / Complex(emitter_detuning, gamma + emitter_decay);
}

PhaseAmplitude qe_phase_amplitude(Complex t_qe) {
    const double magnitude = std::abs(t_qe);
    if (magnitude == 0.0) {
        throw SingularityError("qe_phase_amplitude: t_qe = 0 is an infinite attenuation");
    }
    double phase = std::arg(t_qe);
    if (phase <= -std::numbers::pi) {
        phase = std::numbers::pi;
    }
    return {phase, -std::log(magnitude)};
}

EffectiveResonance effective_resonance(double resonance, double phase, int modal_number) {
    require(modal_number >= 1, "modal number must be at least 1");
    const double fraction = phase / (kTwoPi * modal_number);
    return {resonance * (1.0 - fraction), std::abs(fraction) < 1.0};
}

SystemConfig apply_direction(const SystemConfig& config) {
    SystemConfig out = config;
    if (config.direction == Direction::Backward) {
        out.rates.g = 0.0;
        out.rates.emitter_decay = 0.0;
    }
    return out;
}

std::vector<std::string> validate(const SystemConfig& config) {
    std::vector<std::string> warnings;
    const RingGeometry& geo = config.geometry;
    require(geo.radius > 0.0 && geo.effective_index > 0.0, "geometry: radius and effective index must be positive");
    require(geo.free_spectral_range > 0.0, "geometry: free spectral range must be positive");
    require(geo.resonance > 0.0, "geometry: resonance must be positive");
    require(geo.modal_number >= 1, "geometry: modal number must be at least 1");
    require(std::abs(geo.modal_number - geo.exact_modal_number()) < 0.5,
            "geometry: modal number inconsistent with resonance, n_eff and radius");

    const RateSet& r = config.rates;
    for (double v : {r.kappa_in, r.kappa_ex, r.gamma, r.emitter_decay, r.g, r.h, r.omega_qe}) {
        require(v >= 0.0 && std::isfinite(v), "rates: every rate must be finite and non-negative");
    }
    require(r.epsilon >= 0.0 && r.epsilon < std::numbers::pi / 2.0, "rates: epsilon must lie in [0, pi/2)");
    const double fsr = geo.free_spectral_range;
    require(2.0 * fsr > r.kappa_tot(), "rates: kappa_tot must stay below 2F");

    const double g_squared = r.emitter_decay * (2.0 * fsr - r.kappa_tot());
    if (!relative_match(r.g * r.g, g_squared, kBridgeRelativeTolerance)) {
        throw DomainError("rates: g and Gamma violate g^2 = Gamma (2F - kappa_tot)");
    }
    if (!relative_match(r.h, r.epsilon * fsr, kBridgeRelativeTolerance)) {
        throw DomainError("rates: h and epsilon violate h = epsilon F");
    }

    const CouplerCoefficients& c = config.coupler;
    require(c.t >= 0.0 && c.t <= 1.0, "coupler: t must lie in [0, 1]");
    require(c.alpha > 0.0 && c.alpha <= 1.0, "coupler: alpha must lie in (0, 1]");
    require(std::abs(c.t * c.t + c.kappa_c * c.kappa_c - 1.0) <= 1e-12, "coupler: |t|^2 + |kappa|^2 != 1");
    // Either bridge form is accepted; they differ at second order in kappa tau_rt.
    const double tau = geo.round_trip_time();
    const double ex = r.kappa_ex * tau;
    const double in = r.kappa_in * tau;
    require(std::abs(c.t - std::exp(-ex)) <= ex * ex + 1e-12, "coupler: t inconsistent with kappa_ex");
    require(std::abs(c.alpha - std::exp(-in)) <= in * in + 1e-12, "coupler: alpha inconsistent with kappa_in");

    require(config.drive_amplitude >= 0.0 && config.drive_amplitude <= kMaxDriveAmplitude,
            "drive: alpha_in must lie in [0, 0.5]");
    if (config.drive_amplitude > kDriveWarningThreshold) {
        std::ostringstream msg;
        msg << "drive: alpha_in = " << config.drive_amplitude << " is outside the weak-drive regime (> "
            << kDriveWarningThreshold << ")";
        warnings.push_back(msg.str());
    }
    require(config.sigma_z >= -1.0 && config.sigma_z <= 1.0, "sigma_z must lie in [-1, 1]");
    return warnings;
}

}  // namespace wgm
