#pragma once

// Transfer-matrix description of the ring. Field amplitudes at the coupler
// are ordered (a, b, c, d): a and b run counter-clockwise (the mode that
// meets the emitter), c and d run clockwise.

#include <Eigen/Dense>

#include "wgm/model.hpp"

namespace wgm::tm {

using TransferMatrix4 = Eigen::Matrix4cd;

struct ScattererCoefficients {
    Complex t_s{1.0, 0.0};
    Complex r_s{0.0, 0.0};
    double epsilon = 0.0;

    // Lossless point scatterer: t_s = cos(eps), r_s = i sin(eps).
    static ScattererCoefficients from_strength(double epsilon);
};

// (a0, b0, c0, d0) = M_cpl (a1, b1, c1, d1). Throws SingularityError when kappa_c = 0.
TransferMatrix4 build_coupling_matrix(const CouplerCoefficients& coupler);

// (a1, b1, c1, d1) = M_pro (a1', b1', c1', d1') for the two arcs between
// coupler and emitter/scatterer.
TransferMatrix4 build_propagation_matrix(double theta1, double theta2, double alpha1, double alpha2);

// Port-2 transmission b0/a0 for input at port 1. theta is the total round-trip
// phase relative to resonance, t the coupler transmission, alpha the total
// round-trip attenuation.
Complex transmission_case1(double theta, double t, double alpha);
Complex transmission_case2(double theta, double t, double alpha, const ScattererCoefficients& sc);
Complex transmission_case3(double theta, double t, double alpha, Complex t_qe);
Complex transmission_case4(double theta, double t, double alpha, const ScattererCoefficients& sc, Complex t_qe);

// Round-trip phase measured from resonance, theta = Delta1 * tau_rt.
inline double detuning_to_phase(double cavity_detuning, double round_trip_time) {
    return cavity_detuning * round_trip_time;
}

// Sweeps beyond this many kappa_tot leave the small-phase regime.
inline constexpr double kMaxDetuningOverKappaTot = 1e3;

// Full transfer-matrix transmission for a configuration at cavity detuning
// Delta1. Direction is honoured; the case is picked from which of the
// emitter and scatterer are present.
Complex transmission(const SystemConfig& config, double cavity_detuning);

}  // namespace wgm::tm
