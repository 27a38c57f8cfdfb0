#pragma once

// Dense complex linear algebra and integration kernels.
//
// Storage is Eigen's column-major dense matrices. Tensor products follow the
// usual Kronecker convention, kron(A, B)(i*rB + k, j*cB + l) = A(i,j) B(k,l),
// so the first factor is the slowest-varying index.

#include <complex>
#include <functional>
#include <string_view>

#include <Eigen/Dense>

namespace wgm::numerics {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Eigen::Index kMaxKronDimension = 1 << 16;

// Throws DomainError naming `where` if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, std::string_view where);
void require_finite(const RealMatrix& m, std::string_view where);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   Eigen::Index max_dimension = kMaxKronDimension);

// Upper bound on the spectral norm, sqrt(||M||_1 ||M||_inf).
double spectral_norm_bound(const ComplexMatrix& m);

struct HermitianEigen {
    RealVector values;       // ascending
    ComplexMatrix vectors;   // columns
};

// Input is symmetrized as (M + M^H)/2 before decomposition.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

struct NullspaceOptions {
    // Second-smallest eigenvalue of L^H L below this fraction of its largest
    // eigenvalue means the null space is not one-dimensional.
    double degeneracy_ratio = 1e-14;
    // Inverse-iteration sweeps on L applied after the eigendecomposition.
    int refinement_steps = 2;
    // Post-condition bound on ||L v|| / ||L||_F.
    double residual_tolerance = 1e-10;
};

// Unit vector spanning the null space of a square L, taken as the eigenvector
// of L^H L with the smallest eigenvalue and polished by shifted inverse
// iteration. The phase is fixed so the largest-magnitude component is real
// and positive.
ComplexVector nullspace_hermitian_pair(const ComplexMatrix& l, const NullspaceOptions& options = {});

struct LinearSolveReport {
    double rcond = 0.0;
    double relative_residual = 0.0;
};

// Partial-pivot LU with iterative refinement. Throws SingularityError when
// the reciprocal condition estimate falls below `min_rcond`.
RealVector solve_refined(const RealMatrix& a, const RealVector& b, int refinement_steps = 1,
                         double min_rcond = 1e-14, LinearSolveReport* report = nullptr);

using Derivative = std::function<ComplexVector(double, const ComplexVector&)>;

// Classical fourth-order Runge-Kutta from t = 0 to t_end. The step count is
// ceil(t_end / step), with the step shrunk to land exactly on t_end.
ComplexVector rk4_evolve(const Derivative& f, ComplexVector x0, double t_end, double step);

// Single RK4 step of size h for the autonomous linear system x' = L x.
void rk4_linear_step(const ComplexMatrix& l, ComplexVector& x, double h);

}  // namespace wgm::numerics
