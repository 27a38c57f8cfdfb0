#include "wgm/spt.hpp"

#include <cmath>

#include "wgm/errors.hpp"

namespace wgm::spt {

Complex spt_transmission(const SptInput& in) {
    for (double rate : {in.kappa_in, in.kappa_ex, in.gamma, in.g, in.h}) {
        if (!(rate >= 0.0)) {
            throw DomainError("spt_transmission: rates must be non-negative");
        }
    }
    const Complex d1 = in.cavity_pole();
    const Complex d2 = in.emitter_pole();
    const double g2 = in.g * in.g;
    const double h2 = in.h * in.h;

    const Complex denominator = d1 * (d1 * d2 - g2) - d2 * h2;
    const double scale = std::abs(d1) * std::abs(d1) * std::abs(d2) + std::abs(d1) * g2 + std::abs(d2) * h2;
    if (std::abs(denominator) <= 1e-15 * scale || denominator == 0.0) {
        throw SingularityError("spt_transmission: vanishing denominator");
    }
    const Complex detuned_loss(in.cavity_detuning, in.kappa_in - in.kappa_ex);
    const Complex numerator = d1 * (detuned_loss * d2 - g2) - d2 * h2;
    return numerator / denominator;
}

SptInput make_input(const SystemConfig& config, double cavity_detuning) {
    const SystemConfig cfg = apply_direction(config);
    return {cavity_detuning, cfg.emitter_detuning(cavity_detuning), cfg.rates.kappa_in, cfg.rates.kappa_ex,
            cfg.rates.gamma,  cfg.rates.g,                           cfg.rates.h};
}

}  // namespace wgm::spt
