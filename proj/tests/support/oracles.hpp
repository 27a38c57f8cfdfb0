#pragma once

// Reference computations built straight from the model equations, sharing no
// code with the library beyond its config structs. Tests compare the library
// against these.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "wgm/model.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cd I{0.0, 1.0};

// Transfer matrix by brute force: the 4x4 coupler and propagation matrices are
// multiplied out, the ring fields are parametrised by (a1', c1') through the
// emitter/scatterer relations, and c0 = 0 fixes the ratio.
inline cd tm_matrix_path(double theta1, double theta2, double alpha1, double alpha2, double t, cd t_s, cd r_s,
                         cd t_qe) {
    const double kc = std::sqrt(1.0 - t * t);
    Eigen::Matrix4cd cpl;
    cpl << -1.0, t, 0.0, 0.0,
           -t, 1.0, 0.0, 0.0,
           0.0, 0.0, -1.0, t,
           0.0, 0.0, -t, 1.0;
    cpl /= kc;
    Eigen::Matrix4cd pro = Eigen::Matrix4cd::Zero();
    pro(0, 0) = std::exp(-I * theta1) / alpha1;
    pro(1, 1) = alpha2 * std::exp(I * theta2);
    pro(2, 2) = std::exp(-I * theta2) / alpha2;
    pro(3, 3) = alpha1 * std::exp(I * theta1);
    const Eigen::Matrix4cd m = cpl * pro;

    // b1' = t_qe (t_s a1' + r_s c1'),  d1' = t_s c1' + r_s a1'
    Eigen::Vector4cd v0(1.0, t_qe * t_s, 0.0, r_s);
    Eigen::Vector4cd v1(0.0, t_qe * r_s, 1.0, t_s);
    const cd c = -(m.row(2) * v0)(0) / (m.row(2) * v1)(0);
    const Eigen::Vector4cd out = m * (v0 + c * v1);
    return out(1) / out(0);
}

// Emitter transmission straight from its definition.
inline cd t_qe(double delta2, double gamma, double decay) {
    return (delta2 + I * (gamma - decay)) / (delta2 + I * (gamma + decay));
}

// Steady state of the three linear mean-field equations, solved as a 3x3
// system, then passed through the input-output relation.
inline cd mean_field_transmission(const wgm::SystemConfig& c, double delta1, double delta2, double sigma_z = -1.0) {
    const double kt = c.rates.kappa_in + c.rates.kappa_ex;
    const double g = c.direction == wgm::Direction::Backward ? 0.0 : c.rates.g;
    const double h = c.rates.h;
    const cd d1 = delta1 + I * kt;
    const cd d2 = delta2 + I * c.rates.gamma;
    const double drive = c.drive_amplitude * std::sqrt(2.0 * c.rates.kappa_ex);
    // unknowns (a, sigma, b); rows are da/dt, dsigma/dt, db/dt = 0
    Eigen::Matrix3cd m;
    m << I * d1, -I * g, -I * h,
         I * g * sigma_z, I * d2, 0.0,
         -I * h, 0.0, I * d1;
    const Eigen::Vector3cd rhs(-drive, 0.0, 0.0);
    const Eigen::Vector3cd x = m.fullPivLu().solve(rhs);
    return (c.drive_amplitude - std::sqrt(2.0 * c.rates.kappa_ex) * x(0)) / c.drive_amplitude;
}

// Operators on (mode a) x (mode b) x (emitter), index ((na * levels_b) + nb) * 2 + e,
// e = 0 ground, 1 excited.
struct Fock {
    int la, lb;
    int dim() const { return la * lb * 2; }
    int index(int na, int nb, int e) const { return (na * lb + nb) * 2 + e; }

    Mat a() const {
        Mat m = Mat::Zero(dim(), dim());
        for (int na = 1; na < la; ++na)
            for (int nb = 0; nb < lb; ++nb)
                for (int e = 0; e < 2; ++e) m(index(na - 1, nb, e), index(na, nb, e)) = std::sqrt(double(na));
        return m;
    }
    Mat b() const {
        Mat m = Mat::Zero(dim(), dim());
        for (int na = 0; na < la; ++na)
            for (int nb = 1; nb < lb; ++nb)
                for (int e = 0; e < 2; ++e) m(index(na, nb - 1, e), index(na, nb, e)) = std::sqrt(double(nb));
        return m;
    }
    Mat sm() const {
        Mat m = Mat::Zero(dim(), dim());
        for (int na = 0; na < la; ++na)
            for (int nb = 0; nb < lb; ++nb) m(index(na, nb, 0), index(na, nb, 1)) = 1.0;
        return m;
    }
};

inline Mat hamiltonian(const wgm::SystemConfig& c, const Fock& f, double delta1, double delta2) {
    const double g = c.direction == wgm::Direction::Backward ? 0.0 : c.rates.g;
    const Mat a = f.a(), b = f.b(), s = f.sm();
    const Mat ad = a.adjoint(), bd = b.adjoint(), sp = s.adjoint();
    const double drive = std::sqrt(2.0 * c.rates.kappa_ex) * c.drive_amplitude;
    return -delta1 * ad * a - delta2 * sp * s - delta1 * bd * b + I * drive * (ad - a) + g * (ad * s + sp * a) +
           c.rates.h * (ad * b + bd * a);
}

inline Mat lindblad_rhs(const Mat& rho, const Mat& h, const Fock& f, double kt, double gamma) {
    Mat out = -I * (h * rho - rho * h);
    const auto dissipate = [&](const Mat& c, double rate) {
        const Mat cd_ = c.adjoint();
        out += rate * (2.0 * c * rho * cd_ - cd_ * c * rho - rho * cd_ * c);
    };
    dissipate(f.a(), kt);
    dissipate(f.b(), kt);
    dissipate(f.sm(), gamma);
    return out;
}

// Liouvillian assembled column by column: column i + jD is the image of the
// matrix unit E_ij (column-major vec).
inline Mat liouvillian(const Mat& h, const Fock& f, double kt, double gamma) {
    const int d = f.dim();
    Mat l(d * d, d * d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            const Mat img = lindblad_rhs(e, h, f, kt, gamma);
            l.col(i + j * d) = Eigen::Map<const Vec>(img.data(), d * d);
        }
    }
    return l;
}

// Unique kernel vector of L via full-pivot LU, reshaped and trace-normalised.
inline Mat steady_state(const Mat& l, int d) {
    Eigen::FullPivLU<Mat> lu(l);
    lu.setThreshold(1e-10);
    const Mat k = lu.kernel();
    Mat rho = Eigen::Map<const Mat>(k.col(0).data(), d, d);
    return rho / rho.trace();
}

// Reference parameter set (rates in rad/s).
inline wgm::SystemConfig baseline(double gamma_ratio = 0.0, double h_over_kappa_in = 0.0) {
    using namespace wgm;
    SystemConfig c;
    const double fsr = hz_over_2pi(3e12);
    c.geometry = RingGeometry::make(10.5e-6, 1.5, fsr, hz_over_2pi(193.4e12));
    c.rates.kappa_in = hz_over_2pi(30e9);
    c.rates.kappa_ex = hz_over_2pi(30e9);
    c.rates.gamma = hz_over_2pi(6e6);
    c.rates.emitter_decay = gamma_ratio * c.rates.gamma;
    const double kt = c.rates.kappa_tot();
    c.rates.g = std::sqrt(c.rates.emitter_decay * (2.0 * fsr - kt));
    c.rates.h = h_over_kappa_in * c.rates.kappa_in;
    c.rates.epsilon = c.rates.h / fsr;
    c.rates.omega_qe = c.geometry.resonance;
    const double t = std::exp(-c.rates.kappa_ex / fsr);
    const double alpha = std::exp(-c.rates.kappa_in / fsr);
    c.coupler = {t, std::sqrt(1.0 - t * t), alpha};
    return c;
}

}  // namespace oracle
