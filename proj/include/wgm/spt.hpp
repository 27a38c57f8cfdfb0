#pragma once

// Single-photon transport: closed-form port-2 transmission of a ring whose
// counter-clockwise mode couples to a two-level emitter and, through a
// backscatterer, to the clockwise mode.

#include "wgm/model.hpp"

namespace wgm::spt {

struct SptInput {
    double cavity_detuning = 0.0;   // Delta1 = omega - Omega
    double emitter_detuning = 0.0;  // Delta2 = omega - omega_qe
    double kappa_in = 0.0;
    double kappa_ex = 0.0;
    double gamma = 0.0;
    double g = 0.0;
    double h = 0.0;

    Complex cavity_pole() const { return {cavity_detuning, kappa_in + kappa_ex}; }
    Complex emitter_pole() const { return {emitter_detuning, gamma}; }
};

// Throws DomainError for negative rates, SingularityError when the
// denominator vanishes (no dissipation anywhere at resonance).
Complex spt_transmission(const SptInput& in);

inline double spt_power(const SptInput& in) { return std::norm(spt_transmission(in)); }

// Builds the input for a configuration at cavity detuning Delta1, honouring direction.
SptInput make_input(const SystemConfig& config, double cavity_detuning);

}  // namespace wgm::spt
