#pragma once

// Cavity-QED description: two ring modes (a driven, counter-clockwise; b,
// clockwise) and a two-level emitter coupled to a only. Provides the
// weak-probe semiclassical steady state and a Lindblad master-equation
// solver on a truncated Fock space.
//
// Tensor order is (mode a) x (mode b) x (emitter); emitter basis is
// {ground, excited}. Density matrices are vectorized column-major, so
// vec(A rho B) = (B^T kron A) vec(rho).

#include <optional>
#include <string_view>

#include "wgm/model.hpp"
#include "wgm/numerics.hpp"

namespace wgm::cqed {

using numerics::ComplexMatrix;
using numerics::ComplexVector;
using Superoperator = numerics::ComplexMatrix;

struct HilbertSpace {
    int n_max_a = 4;  // Fock levels 0 .. n_max_a - 1
    int n_max_b = 4;

    Eigen::Index dimension() const { return Eigen::Index{n_max_a} * n_max_b * 2; }
    // Throws ConfigError if a level count is below 1 or the dimension below 8.
    void validate() const;
};

enum class OperatorLabel { A, B, SigmaMinus, SigmaPlus, SigmaZ, Identity, Hamiltonian };

struct OperatorMatrix {
    ComplexMatrix matrix;
    OperatorLabel label = OperatorLabel::Identity;
};

OperatorMatrix annihilation_a(const HilbertSpace& space);
OperatorMatrix annihilation_b(const HilbertSpace& space);
OperatorMatrix sigma_minus(const HilbertSpace& space);
OperatorMatrix sigma_plus(const HilbertSpace& space);
OperatorMatrix sigma_z(const HilbertSpace& space);
OperatorMatrix identity(const HilbertSpace& space);

// Hamiltonian in the frame rotating at the drive frequency, in rad/s.
// Direction is applied before assembly.
OperatorMatrix build_hamiltonian(const SystemConfig& config, const HilbertSpace& space, double cavity_detuning,
                                 double emitter_detuning);

inline constexpr Eigen::Index kDefaultMaxSuperoperatorDimension = 4096;

// vec(d rho/dt) = L vec(rho). Both ring modes decay at kappa_tot and the
// emitter at gamma; dissipators carry the bare 2 c rho c^+ - {c^+ c, rho}
// bracket, so these are amplitude decay rates.
Superoperator build_liouvillian(const OperatorMatrix& hamiltonian, const RateSet& rates, const HilbertSpace& space,
                                Eigen::Index max_dimension = kDefaultMaxSuperoperatorDimension);

struct DensityMatrix {
    ComplexMatrix rho;

    Complex expectation(const ComplexMatrix& op) const { return (rho * op).trace(); }
    double trace_deviation() const { return std::abs(rho.trace() - Complex(1.0, 0.0)); }
    double hermiticity_deviation() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;
};

// Vacuum of both modes with the emitter in its ground state.
DensityMatrix vacuum_state(const HilbertSpace& space);

struct PhysicalityReport {
    double trace_deviation = 0.0;
    double hermiticity_deviation = 0.0;
    double min_eigenvalue = 0.0;
    double top_fock_population_a = 0.0;
    double top_fock_population_b = 0.0;

    double top_fock_population() const { return std::max(top_fock_population_a, top_fock_population_b); }
    bool ok() const {
        return trace_deviation < 1e-8 && hermiticity_deviation < 1e-10 && min_eigenvalue > -1e-8 &&
               top_fock_population() < 1e-6;
    }
};

PhysicalityReport check_physicality(const DensityMatrix& state, const HilbertSpace& space);

enum class SteadyStateMethod { NullSpace, TimeEvolution, Semiclassical };

std::string_view to_string(SteadyStateMethod m);

struct SteadyStateOptions {
    SteadyStateMethod method = SteadyStateMethod::NullSpace;
    // Accepted bound on ||L vec(rho)|| / ||L||_F.
    double residual_tolerance = 1e-10;
    // Time evolution: step = step_fraction / ||L||, stop once
    // ||L vec(rho)|| <= derivative_tolerance * ||L|| (spectral-norm bound).
    double step_fraction = 0.1;
    double derivative_tolerance = 1e-14;
    long long max_steps = 2'000'000;
    int check_interval = 50;
    std::optional<ComplexMatrix> initial_state;
};

// ||L vec(rho)|| / ||L||_F.
double steady_state_residual(const Superoperator& l, const DensityMatrix& state);

// Null-space path: solves the Hermitian real form of L with one row replaced
// by the trace condition. Time-evolution path: RK4 from the initial state
// (vacuum by default). Throws SingularityError for a degenerate null space
// and ConvergenceError when the residual or step budget is exceeded.
DensityMatrix steady_state(const Superoperator& l, const SteadyStateOptions& options = {});

// Steady state from the L^H L eigenvector (numerics::nullspace_hermitian_pair).
DensityMatrix steady_state_from_hermitian_pair(const Superoperator& l);

// Real representation of L acting on Hermitian matrices. Coordinates share
// the column-major layout of vec(rho): index i + jD holds Re rho_ij for
// i <= j and Im rho_ji for i > j.
numerics::RealMatrix hermitian_real_form(const Superoperator& l);

struct SteadyStateResult {
    Complex a{};
    Complex b{};
    Complex sigma_minus{};
    Complex a_out{};
    double transmission = 0.0;
    double residual = 0.0;
    SteadyStateMethod method = SteadyStateMethod::NullSpace;
    std::optional<PhysicalityReport> physicality;
};

// Caches the detuning-independent part of the Liouvillian so a sweep only
// rebuilds the diagonal detuning terms. solve() is const and safe to call
// from several threads.
class MasterEquationSolver {
public:
    MasterEquationSolver(const SystemConfig& config, const HilbertSpace& space, SteadyStateOptions options = {},
                         Eigen::Index max_dimension = kDefaultMaxSuperoperatorDimension);

    Superoperator liouvillian(double cavity_detuning) const;
    SteadyStateResult solve(double cavity_detuning) const;
    const HilbertSpace& space() const { return space_; }

private:
    SystemConfig config_;
    HilbertSpace space_;
    SteadyStateOptions options_;
    Superoperator fixed_;                  // L at zero detuning
    numerics::RealMatrix fixed_real_;      // its Hermitian real form
    numerics::RealVector cavity_number_;   // a^+a + b^+b diagonal
    numerics::RealVector emitter_number_;  // sigma^+ sigma^- diagonal
    ComplexMatrix op_a_, op_b_, op_sigma_;
};

// One-off master-equation solve at cavity detuning Delta1.
SteadyStateResult master_equation_transmission(const SystemConfig& config, const HilbertSpace& space,
                                               double cavity_detuning, const SteadyStateOptions& options = {});

struct SemiclassicalState {
    Complex a{};
    Complex b{};
    Complex sigma_minus{};
};

// Steady state of the mean-field equations with sigma_z frozen at config.sigma_z.
SemiclassicalState semiclassical_fixed_point(const SystemConfig& config, double cavity_detuning,
                                             double emitter_detuning);
Complex semiclassical_amplitude(const SystemConfig& config, double cavity_detuning, double emitter_detuning);
// Closed-form port-2 transmission; independent of the drive amplitude.
Complex semiclassical_transmission(const SystemConfig& config, double cavity_detuning, double emitter_detuning);

// Largest right-hand side of the mean-field equations at `state`, relative
// to the drive term alpha_in sqrt(2 kappa_ex).
double equations_of_motion_residual(const SystemConfig& config, double cavity_detuning, double emitter_detuning,
                                    const SemiclassicalState& state);

}  // namespace wgm::cqed
