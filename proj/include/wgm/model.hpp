#pragma once

// Physical parameters of a waveguide-coupled ring resonator with a chirally
// coupled two-level emitter and a point backscatterer, and the conversions
// between transfer-matrix coefficients and cavity rates.
//
// Units: every rate and frequency is an angular frequency in rad/s. Values
// quoted as "X/2pi in Hz" are converted once, by hz_over_2pi().

#include <complex>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace wgm {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Angular frequency from a frequency quoted as omega/2pi in Hz.
constexpr double hz_over_2pi(double hz) { return kTwoPi * hz; }
constexpr double to_hz_over_2pi(double angular) { return angular / kTwoPi; }

enum class Direction { Forward, Backward };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

// Exact: alpha = exp(-kappa_in tau), t = exp(-kappa_ex tau).
// FirstOrder: alpha = 1 - kappa_in tau, t = 1 - kappa_ex tau.
enum class BridgeForm { Exact, FirstOrder };

std::string_view to_string(BridgeForm f);
BridgeForm parse_bridge_form(std::string_view s);

struct RingGeometry {
    double radius = 0.0;           // m
    double effective_index = 0.0;
    double free_spectral_range = 0.0;  // rad/s
    double resonance = 0.0;            // rad/s
    int modal_number = 0;

    // Derives the modal number as round(resonance * n_eff * R / c).
    static RingGeometry make(double radius, double effective_index, double free_spectral_range, double resonance);

    double round_trip_time() const { return 1.0 / free_spectral_range; }
    double propagation_constant(double omega) const { return effective_index * omega / kSpeedOfLight; }
    // Non-integer mode number implied by the geometry.
    double exact_modal_number() const { return resonance * effective_index * radius / kSpeedOfLight; }
};

struct RateSet {
    double kappa_in = 0.0;
    double kappa_ex = 0.0;
    double gamma = 0.0;          // emitter dissipation
    double emitter_decay = 0.0;  // Gamma, emitter decay into the resonator
    double g = 0.0;
    double h = 0.0;
    double epsilon = 0.0;        // scatterer strength, dimensionless
    double omega_qe = 0.0;

    double kappa_tot() const { return kappa_in + kappa_ex; }
};

struct CouplerCoefficients {
    double t = 1.0;        // waveguide transmission
    double kappa_c = 0.0;  // coupling coefficient, sqrt(1 - t^2)
    double alpha = 1.0;    // round-trip amplitude attenuation

    // Lossless coupler: kappa_c = sqrt(1 - t^2). Requires t in [0, 1], alpha in (0, 1].
    static CouplerCoefficients lossless(double t, double alpha);
};

struct SystemConfig {
    RingGeometry geometry;
    RateSet rates;
    CouplerCoefficients coupler;
    double drive_amplitude = 0.1;
    Direction direction = Direction::Forward;
    double sigma_z = -1.0;
    BridgeForm bridge_form = BridgeForm::Exact;

    // Emitter detuning Delta2 = omega - omega_qe for a cavity detuning Delta1 = omega - Omega.
    double emitter_detuning(double cavity_detuning) const {
        return cavity_detuning + (geometry.resonance - rates.omega_qe);
    }
};

inline constexpr double kMaxDriveAmplitude = 0.5;
inline constexpr double kDriveWarningThreshold = 0.2;

// Checks every invariant of the configuration. Throws DomainError on the first
// violation; returns human-readable warnings for soft limits.
std::vector<std::string> validate(const SystemConfig& config);

struct CavityRates {
    double kappa_in = 0.0;
    double kappa_ex = 0.0;
};

CavityRates bridge_coupler_to_rates(const CouplerCoefficients& coupler, double free_spectral_range,
                                    BridgeForm form = BridgeForm::Exact);
CouplerCoefficients bridge_rates_to_coupler(double kappa_in, double kappa_ex, double free_spectral_range,
                                            BridgeForm form = BridgeForm::Exact);

// g = sqrt(Gamma (2F - kappa_tot)) and its inverse.
double bridge_emitter(double emitter_decay, double free_spectral_range, double kappa_tot);
double emitter_decay_from_coupling(double g, double free_spectral_range, double kappa_tot);

// h = epsilon F and its inverse.
double bridge_scatterer(double epsilon, double free_spectral_range);
double scatterer_strength_from_rate(double h, double free_spectral_range);

// Single-pass transmission of a chirally coupled emitter,
// (D2 + i(gamma - Gamma)) / (D2 + i(gamma + Gamma)).
Complex qe_transmission(double emitter_detuning, double gamma, double emitter_decay);

struct PhaseAmplitude {
    double phase = 0.0;        // arg t_qe in (-pi, pi]
    double dissipation = 0.0;  // -ln |t_qe|

    Complex recompose() const { return std::polar(std::exp(-dissipation), phase); }
};

PhaseAmplitude qe_phase_amplitude(Complex t_qe);

struct EffectiveResonance {
    double omega = 0.0;
    // False once the phase shift reaches a full mode order, where the
    // first-order shift no longer describes a resonance.
    bool within_validity = true;
};

EffectiveResonance effective_resonance(double resonance, double phase, int modal_number);

// Backward input never reaches the emitter: g and Gamma are zeroed.
SystemConfig apply_direction(const SystemConfig& config);

}  // namespace wgm
