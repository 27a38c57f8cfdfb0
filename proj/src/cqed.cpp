#include "wgm/cqed.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "wgm/errors.hpp"

namespace wgm::cqed {

namespace {

using numerics::kron;
using numerics::RealMatrix;
using numerics::RealVector;

constexpr Complex kI{0.0, 1.0};

ComplexMatrix ladder(int levels) {
    ComplexMatrix m = ComplexMatrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) {
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return m;
}

ComplexMatrix emitter_lowering() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

ComplexMatrix embed(const HilbertSpace& space, const ComplexMatrix& on_a, const ComplexMatrix& on_b,
                    const ComplexMatrix& on_emitter) {
    (void)space;
    return kron(kron(on_a, on_b), on_emitter);
}

Eigen::Index side_length(const Superoperator& l) {
    if (l.rows() != l.cols()) {
        throw DomainError("superoperator must be square");
    }
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(l.rows()))));
    if (d * d != l.rows() || d == 0) {
        throw DomainError("superoperator dimension is not a perfect square");
    }
    return d;
}

ComplexVector vectorize(const ComplexMatrix& rho) {
    return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

ComplexMatrix unvectorize(const ComplexVector& v, Eigen::Index d) {
    return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

ComplexMatrix from_real_coordinates(const RealVector& x, Eigen::Index d) {
    ComplexMatrix rho(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        rho(j, j) = x(j + j * d);
        for (Eigen::Index i = 0; i < j; ++i) {
            rho(i, j) = Complex(x(i + j * d), x(j + i * d));
            rho(j, i) = std::conj(rho(i, j));
        }
    }
    return rho;
}

// Replaces the (0,0) population equation with the trace condition and
// solves for the unique Hermitian steady state. The real form has a handful
// of entries per row, so a sparse LU goes first; the dense pivoted LU backs
// it up and is the one that diagnoses a degenerate null space.
DensityMatrix solve_bordered(RealMatrix a, Eigen::Index d) {
    const double scale = a.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) {
        throw SingularityError("steady_state: degenerate null space (Liouvillian vanishes)");
    }
    a /= scale;
    a.row(0).setZero();
    for (Eigen::Index i = 0; i < d; ++i) {
        a(0, i + i * d) = 1.0;
    }
    RealVector rhs = RealVector::Zero(a.rows());
    rhs(0) = 1.0;

    const Eigen::SparseMatrix<double> sparse = a.sparseView();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sparse);
    if (lu.info() == Eigen::Success) {
        RealVector x = lu.solve(rhs);
        if (lu.info() == Eigen::Success) {
            x += lu.solve(RealVector(rhs - sparse * x));
            const double residual = (sparse * x - rhs).norm();
            // A consistent right-hand side hides a degenerate kernel, so probe
            // the inverse with a vector that is not in the range.
            const RealVector probe = RealVector::LinSpaced(a.rows(), 1.0, 2.0);
            const double growth = RealVector(lu.solve(probe)).norm() / probe.norm();
            if (x.allFinite() && residual <= 1e-12 * std::max(1.0, x.norm()) && growth < 1e12) {
                return {from_real_coordinates(x, d)};
            }
        }
    }

    RealVector x;
    try {
        x = numerics::solve_refined(a, rhs, 1, 1e-14);
    } catch (const SingularityError&) {
        throw SingularityError("steady_state: degenerate null space (steady state not unique)");
    }
    return {from_real_coordinates(x, d)};
}

DensityMatrix evolve_to_steady_state(const Superoperator& l, Eigen::Index d, const SteadyStateOptions& options) {
    const double norm = numerics::spectral_norm_bound(l);
    ComplexMatrix initial = options.initial_state.value_or(ComplexMatrix::Zero(d, d));
    if (!options.initial_state) {
        initial(0, 0) = 1.0;
    }
    if (initial.rows() != d || initial.cols() != d) {
        throw DomainError("steady_state: initial state has the wrong dimension");
    }
    ComplexVector v = vectorize(initial);
    if (norm == 0.0) {
        return {initial};
    }
    const double h = options.step_fraction / norm;
    const int interval = std::max(1, options.check_interval);
    for (long long step = 0; step < options.max_steps; step += interval) {
        if ((l * v).norm() <= options.derivative_tolerance * norm * v.norm()) {
            ComplexMatrix rho = unvectorize(v, d);
            return {rho / rho.trace()};
        }
        for (int k = 0; k < interval; ++k) {
            numerics::rk4_linear_step(l, v, h);
        }
    }
    throw ConvergenceError("steady_state: time evolution did not converge within " +
                           std::to_string(options.max_steps) + " steps");
}

SteadyStateResult make_result(const SystemConfig& config, const DensityMatrix& state, const ComplexMatrix& op_a,
                              const ComplexMatrix& op_b, const ComplexMatrix& op_sigma, double residual,
                              SteadyStateMethod method, const HilbertSpace& space) {
    const double drive = config.drive_amplitude;
    if (!(drive > 0.0)) {
        throw DomainError("master-equation transmission needs a non-zero drive amplitude");
    }
    SteadyStateResult r;
    r.a = state.expectation(op_a);
    r.b = state.expectation(op_b);
    r.sigma_minus = state.expectation(op_sigma);
    r.a_out = drive - std::sqrt(2.0 * config.rates.kappa_ex) * r.a;
    r.transmission = std::norm(r.a_out / drive);
    r.residual = residual;
    r.method = method;
    r.physicality = check_physicality(state, space);
    return r;
}

}  // namespace

void HilbertSpace::validate() const {
    if (n_max_a < 1 || n_max_b < 1) {
        throw ConfigError("truncation", "Fock level counts must be at least 1");
    }
    if (dimension() < 8) {
        throw ConfigError("truncation", "Hilbert space dimension " + std::to_string(dimension()) + " is below 8");
    }
}

OperatorMatrix annihilation_a(const HilbertSpace& space) {
    return {embed(space, ladder(space.n_max_a), ComplexMatrix::Identity(space.n_max_b, space.n_max_b),
                  ComplexMatrix::Identity(2, 2)),
            OperatorLabel::A};
}

OperatorMatrix annihilation_b(const HilbertSpace& space) {
    return {embed(space, ComplexMatrix::Identity(space.n_max_a, space.n_max_a), ladder(space.n_max_b),
                  ComplexMatrix::Identity(2, 2)),
            OperatorLabel::B};
}

OperatorMatrix sigma_minus(const HilbertSpace& space) {
    return {embed(space, ComplexMatrix::Identity(space.n_max_a, space.n_max_a),
                  ComplexMatrix::Identity(space.n_max_b, space.n_max_b), emitter_lowering()),
            OperatorLabel::SigmaMinus};
}

OperatorMatrix sigma_plus(const HilbertSpace& space) {
    return {sigma_minus(space).matrix.adjoint(), OperatorLabel::SigmaPlus};
}

OperatorMatrix sigma_z(const HilbertSpace& space) {
    const ComplexMatrix sm = sigma_minus(space).matrix;
    return {sm.adjoint() * sm - sm * sm.adjoint(), OperatorLabel::SigmaZ};
}

OperatorMatrix identity(const HilbertSpace& space) {
    return {ComplexMatrix::Identity(space.dimension(), space.dimension()), OperatorLabel::Identity};
}

OperatorMatrix build_hamiltonian(const SystemConfig& config, const HilbertSpace& space, double cavity_detuning,
                                 double emitter_detuning) {
    space.validate();
    const SystemConfig cfg = apply_direction(config);
    const ComplexMatrix a = annihilation_a(space).matrix;
    const ComplexMatrix b = annihilation_b(space).matrix;
    const ComplexMatrix sm = sigma_minus(space).matrix;
    const ComplexMatrix ad = a.adjoint();
    const ComplexMatrix bd = b.adjoint();
    const ComplexMatrix sp = sm.adjoint();
    const double drive = std::sqrt(2.0 * cfg.rates.kappa_ex) * cfg.drive_amplitude;

    ComplexMatrix h = -cavity_detuning * (ad * a) - emitter_detuning * (sp * sm) - cavity_detuning * (bd * b);
    h += kI * drive * (ad - a);
    h += cfg.rates.g * (ad * sm + sp * a);
    h += cfg.rates.h * (ad * b + bd * a);
    numerics::require_finite(h, "build_hamiltonian");
    return {h, OperatorLabel::Hamiltonian};
}

Superoperator build_liouvillian(const OperatorMatrix& hamiltonian, const RateSet& rates, const HilbertSpace& space,
                                Eigen::Index max_dimension) {
    const Eigen::Index d = space.dimension();
    const ComplexMatrix& h = hamiltonian.matrix;
    if (h.rows() != d || h.cols() != d) {
        throw DomainError("build_liouvillian: Hamiltonian does not match the Hilbert space");
    }
    if (d * d > max_dimension) {
        throw ResourceError("build_liouvillian: superoperator dimension " + std::to_string(d * d) +
                            " exceeds the cap of " + std::to_string(max_dimension));
    }
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
        throw DomainError("build_liouvillian: Hamiltonian is not Hermitian");
    }
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    Superoperator l = -kI * (kron(id, h) - kron(h.transpose(), id));

    const auto add_dissipator = [&](double rate, const ComplexMatrix& c) {
        if (rate == 0.0) {
            return;
        }
        const ComplexMatrix n = c.adjoint() * c;
        l += rate * (2.0 * kron(c.conjugate(), c) - kron(id, n) - kron(n.transpose(), id));
    };
    add_dissipator(rates.kappa_tot(), annihilation_a(space).matrix);
    add_dissipator(rates.kappa_tot(), annihilation_b(space).matrix);
    add_dissipator(rates.gamma, sigma_minus(space).matrix);
    numerics::require_finite(l, "build_liouvillian");
    return l;
}

double DensityMatrix::min_eigenvalue() const { return numerics::hermitian_eigen(rho).values(0); }

DensityMatrix vacuum_state(const HilbertSpace& space) {
    ComplexMatrix rho = ComplexMatrix::Zero(space.dimension(), space.dimension());
    rho(0, 0) = 1.0;
    return {rho};
}

PhysicalityReport check_physicality(const DensityMatrix& state, const HilbertSpace& space) {
    PhysicalityReport r;
    r.trace_deviation = state.trace_deviation();
    r.hermiticity_deviation = state.hermiticity_deviation();
    r.min_eigenvalue = state.min_eigenvalue();
    for (int na = 0; na < space.n_max_a; ++na) {
        for (int nb = 0; nb < space.n_max_b; ++nb) {
            for (int e = 0; e < 2; ++e) {
                const Eigen::Index k = (Eigen::Index{na} * space.n_max_b + nb) * 2 + e;
                const double p = state.rho(k, k).real();
                if (na == space.n_max_a - 1) r.top_fock_population_a += p;
                if (nb == space.n_max_b - 1) r.top_fock_population_b += p;
            }
        }
    }
    return r;
}

std::string_view to_string(SteadyStateMethod m) {
    switch (m) {
        case SteadyStateMethod::NullSpace: return "null-space";
        case SteadyStateMethod::TimeEvolution: return "time-evolution";
        case SteadyStateMethod::Semiclassical: return "semiclassical";
    }
    return "unknown";
}

double steady_state_residual(const Superoperator& l, const DensityMatrix& state) {
    const double norm = l.norm();
    const double r = (l * vectorize(state.rho)).norm();
    return norm > 0.0 ? r / norm : r;
}

RealMatrix hermitian_real_form(const Superoperator& l) {
    const Eigen::Index d = side_length(l);
    const Eigen::Index n = l.rows();
    RealMatrix out(n, n);
    ComplexVector column(n);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const Eigen::Index q = i + j * d;
            const Eigen::Index mirror = j + i * d;
            if (i == j) {
                column = l.col(q);
            } else if (i < j) {
                column = l.col(q) + l.col(mirror);
            } else {
                column = kI * (l.col(mirror) - l.col(q));
            }
            for (Eigen::Index cj = 0; cj < d; ++cj) {
                for (Eigen::Index ci = 0; ci < d; ++ci) {
                    const Eigen::Index row = ci + cj * d;
                    out(row, q) = ci <= cj ? column(row).real() : column(cj + ci * d).imag();
                }
            }
        }
    }
    return out;
}

DensityMatrix steady_state(const Superoperator& l, const SteadyStateOptions& options) {
    const Eigen::Index d = side_length(l);
    numerics::require_finite(l, "steady_state");
    DensityMatrix state;
    switch (options.method) {
        case SteadyStateMethod::NullSpace: state = solve_bordered(hermitian_real_form(l), d); break;
        case SteadyStateMethod::TimeEvolution: state = evolve_to_steady_state(l, d, options); break;
        case SteadyStateMethod::Semiclassical:
            throw DomainError("steady_state: the semiclassical method has no density matrix");
    }
    if (options.method == SteadyStateMethod::NullSpace &&
        steady_state_residual(l, state) > options.residual_tolerance) {
        throw ConvergenceError("steady_state: residual above tolerance");
    }
    return state;
}

DensityMatrix steady_state_from_hermitian_pair(const Superoperator& l) {
    const Eigen::Index d = side_length(l);
    const ComplexVector v = numerics::nullspace_hermitian_pair(l);
    ComplexMatrix rho = unvectorize(v, d);
    rho /= rho.trace();
    return {0.5 * (rho + rho.adjoint())};
}

MasterEquationSolver::MasterEquationSolver(const SystemConfig& config, const HilbertSpace& space,
                                           SteadyStateOptions options, Eigen::Index max_dimension)
    : config_(apply_direction(config)), space_(space), options_(std::move(options)) {
    space_.validate();
    const OperatorMatrix h0 = build_hamiltonian(config_, space_, 0.0, 0.0);
    fixed_ = build_liouvillian(h0, config_.rates, space_, max_dimension);
    if (options_.method == SteadyStateMethod::NullSpace) {
        fixed_real_ = hermitian_real_form(fixed_);
    }
    op_a_ = annihilation_a(space_).matrix;
    op_b_ = annihilation_b(space_).matrix;
    op_sigma_ = sigma_minus(space_).matrix;
    cavity_number_ = (op_a_.adjoint() * op_a_ + op_b_.adjoint() * op_b_).diagonal().real();
    emitter_number_ = (op_sigma_.adjoint() * op_sigma_).diagonal().real();
}

Superoperator MasterEquationSolver::liouvillian(double cavity_detuning) const {
    const double emitter_detuning = config_.emitter_detuning(cavity_detuning);
    const Eigen::Index d = space_.dimension();
    Superoperator l = fixed_;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double omega = cavity_detuning * (cavity_number_(i) - cavity_number_(j)) +
                                 emitter_detuning * (emitter_number_(i) - emitter_number_(j));
            l(i + j * d, i + j * d) += kI * omega;
        }
    }
    return l;
}

SteadyStateResult MasterEquationSolver::solve(double cavity_detuning) const {
    const Superoperator l = liouvillian(cavity_detuning);
    if (options_.method == SteadyStateMethod::Semiclassical) {
        throw DomainError("MasterEquationSolver: semiclassical method requested");
    }
    if (options_.method == SteadyStateMethod::TimeEvolution) {
        const DensityMatrix state = steady_state(l, options_);
        return make_result(config_, state, op_a_, op_b_, op_sigma_, steady_state_residual(l, state),
                           SteadyStateMethod::TimeEvolution, space_);
    }

    const double emitter_detuning = config_.emitter_detuning(cavity_detuning);
    const Eigen::Index d = space_.dimension();
    RealMatrix a = fixed_real_;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double omega = cavity_detuning * (cavity_number_(i) - cavity_number_(j)) +
                                 emitter_detuning * (emitter_number_(i) - emitter_number_(j));
            const Eigen::Index re = i + j * d;
            const Eigen::Index im = j + i * d;
            a(re, im) -= omega;
            a(im, re) += omega;
        }
    }
    const DensityMatrix state = solve_bordered(std::move(a), d);
    const double residual = steady_state_residual(l, state);
    if (residual > options_.residual_tolerance) {
        throw ConvergenceError("steady_state: residual " + std::to_string(residual) + " above tolerance");
    }
    return make_result(config_, state, op_a_, op_b_, op_sigma_, residual, SteadyStateMethod::NullSpace, space_);
}

SteadyStateResult master_equation_transmission(const SystemConfig& config, const HilbertSpace& space,
                                               double cavity_detuning, const SteadyStateOptions& options) {
    return MasterEquationSolver(config, space, options).solve(cavity_detuning);
}

namespace {

struct Poles {
    Complex cavity;
    Complex emitter;
    Complex denominator;
};

Poles semiclassical_poles(const SystemConfig& cfg, double cavity_detuning, double emitter_detuning) {
    const Complex d1(cavity_detuning, cfg.rates.kappa_tot());
    const Complex d2(emitter_detuning, cfg.rates.gamma);
    const double g2 = cfg.rates.g * cfg.rates.g;
    const double h2 = cfg.rates.h * cfg.rates.h;
    const Complex den = d1 * (d1 * d2 + cfg.sigma_z * g2) - d2 * h2;
    const double scale = std::norm(d1) * std::abs(d2) + std::abs(d1) * g2 + std::abs(d2) * h2;
    if (den == 0.0 || std::abs(den) <= 1e-15 * scale) {
        throw SingularityError("semiclassical steady state: vanishing denominator");
    }
    return {d1, d2, den};
}

}  // namespace

Complex semiclassical_amplitude(const SystemConfig& config, double cavity_detuning, double emitter_detuning) {
    const SystemConfig cfg = apply_direction(config);
    const Poles p = semiclassical_poles(cfg, cavity_detuning, emitter_detuning);
    const double drive = cfg.drive_amplitude * std::sqrt(2.0 * cfg.rates.kappa_ex);
    return kI * drive * p.cavity * p.emitter / p.denominator;
}

SemiclassicalState semiclassical_fixed_point(const SystemConfig& config, double cavity_detuning,
                                             double emitter_detuning) {
    const SystemConfig cfg = apply_direction(config);
    const Poles p = semiclassical_poles(cfg, cavity_detuning, emitter_detuning);
    SemiclassicalState s;
    s.a = semiclassical_amplitude(cfg, cavity_detuning, emitter_detuning);
    s.b = cfg.rates.h * s.a / p.cavity;
    s.sigma_minus = -cfg.rates.g * cfg.sigma_z * s.a / p.emitter;
    return s;
}

Complex semiclassical_transmission(const SystemConfig& config, double cavity_detuning, double emitter_detuning) {
    const SystemConfig cfg = apply_direction(config);
    const Poles p = semiclassical_poles(cfg, cavity_detuning, emitter_detuning);
    const double g2 = cfg.rates.g * cfg.rates.g;
    const double h2 = cfg.rates.h * cfg.rates.h;
    const Complex detuned_loss(cavity_detuning, cfg.rates.kappa_in - cfg.rates.kappa_ex);
    const Complex numerator = p.cavity * (detuned_loss * p.emitter + cfg.sigma_z * g2) - p.emitter * h2;
    return numerator / p.denominator;
}

double equations_of_motion_residual(const SystemConfig& config, double cavity_detuning, double emitter_detuning,
                                    const SemiclassicalState& s) {
    const SystemConfig cfg = apply_direction(config);
    const Complex d1(cavity_detuning, cfg.rates.kappa_tot());
    const Complex d2(emitter_detuning, cfg.rates.gamma);
    const double drive = cfg.drive_amplitude * std::sqrt(2.0 * cfg.rates.kappa_ex);
    const double g = cfg.rates.g;
    const double h = cfg.rates.h;

    const Complex da = kI * d1 * s.a + drive - kI * g * s.sigma_minus - kI * h * s.b;
    const Complex ds = kI * d2 * s.sigma_minus + kI * g * cfg.sigma_z * s.a;
    const Complex db = kI * d1 * s.b - kI * h * s.a;
    const double worst = std::max({std::abs(da), std::abs(ds), std::abs(db)});
    return drive > 0.0 ? worst / drive : worst;
}

}  // namespace wgm::cqed
