#include "wgm/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wgm/errors.hpp"

namespace wgm::numerics {

namespace {

template <typename Matrix>
void require_finite_impl(const Matrix& m, std::string_view where) {
    if (!m.allFinite()) {
        throw DomainError(std::string(where) + ": non-finite matrix entry");
    }
}

}  // namespace

void require_finite(const ComplexMatrix& m, std::string_view where) { require_finite_impl(m, where); }
void require_finite(const RealMatrix& m, std::string_view where) { require_finite_impl(m, where); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, Eigen::Index max_dimension) {
    const auto checked_product = [max_dimension](Eigen::Index x, Eigen::Index y) {
        if (x != 0 && y > max_dimension / x) {
            throw ResourceError("kron: result dimension exceeds " + std::to_string(max_dimension));
        }
        return x * y;
    };
    const Eigen::Index rows = checked_product(a.rows(), b.rows());
    const Eigen::Index cols = checked_product(a.cols(), b.cols());

    ComplexMatrix out(rows, cols);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    require_finite(out, "kron");
    return out;
}

double spectral_norm_bound(const ComplexMatrix& m) {
    const double norm_1 = m.cwiseAbs().colwise().sum().maxCoeff();
    const double norm_inf = m.cwiseAbs().rowwise().sum().maxCoeff();
    return std::sqrt(norm_1 * norm_inf);
}

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DomainError("hermitian_eigen: matrix is not square");
    }
    const ComplexMatrix sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("hermitian_eigen: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexVector nullspace_hermitian_pair(const ComplexMatrix& l, const NullspaceOptions& options) {
    if (l.rows() != l.cols() || l.rows() == 0) {
        throw DomainError("nullspace_hermitian_pair: matrix must be square and non-empty");
    }
    require_finite(l, "nullspace_hermitian_pair");

    const ComplexMatrix gram = l.adjoint() * l;
    const HermitianEigen eig = hermitian_eigen(gram);
    const double largest = std::max(eig.values(eig.values.size() - 1), 0.0);
    if (eig.values.size() > 1 && eig.values(1) <= options.degeneracy_ratio * largest) {
        throw SingularityError("nullspace_hermitian_pair: null space is not one-dimensional");
    }
    ComplexVector v = eig.vectors.col(0);

    const double l_norm = l.norm();
    if (l_norm > 0.0 && options.refinement_steps > 0) {
        const double shift = 1e-13 * l_norm;
        const ComplexMatrix shifted = l - Complex(shift, 0.0) * ComplexMatrix::Identity(l.rows(), l.cols());
        const Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
        for (int step = 0; step < options.refinement_steps; ++step) {
            ComplexVector next = lu.solve(v);
            const double n = next.norm();
            if (!std::isfinite(n) || n == 0.0) {
                break;
            }
            v = next / n;
        }
    }

    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v *= std::polar(1.0, -std::arg(v(pivot)));
    v.normalize();

    if (l_norm > 0.0 && (l * v).norm() > options.residual_tolerance * l_norm) {
        throw ConvergenceError("nullspace_hermitian_pair: residual above tolerance");
    }
    return v;
}

RealVector solve_refined(const RealMatrix& a, const RealVector& b, int refinement_steps, double min_rcond,
                         LinearSolveReport* report) {
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw DomainError("solve_refined: dimension mismatch");
    }
    const Eigen::PartialPivLU<RealMatrix> lu(a);
    // rcond() is fooled by exactly zero pivots; check the pivot spread too.
    const RealVector pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rcond = std::min(lu.rcond(), pivots.size() ? pivots.minCoeff() / pivots.maxCoeff() : 1.0);
    if (!(rcond >= min_rcond)) {
        throw SingularityError("solve_refined: matrix is numerically singular (rcond " + std::to_string(rcond) + ")");
    }
    RealVector x = lu.solve(b);
    for (int step = 0; step < refinement_steps; ++step) {
        const RealVector r = b - a * x;
        x += lu.solve(r);
    }
    require_finite(RealMatrix(x), "solve_refined");
    if (report != nullptr) {
        report->rcond = rcond;
        const double b_norm = b.norm();
        report->relative_residual = (a * x - b).norm() / (b_norm > 0.0 ? b_norm : 1.0);
    }
    return x;
}

ComplexVector rk4_evolve(const Derivative& f, ComplexVector x0, double t_end, double step) {
    if (!(step > 0.0)) {
        throw DomainError("rk4_evolve: step must be positive");
    }
    if (!(t_end >= 0.0)) {
        throw DomainError("rk4_evolve: t_end must be non-negative");
    }
    const auto steps = static_cast<long long>(std::ceil(t_end / step - 1e-12));
    if (steps == 0) {
        return x0;
    }
    const double h = t_end / static_cast<double>(steps);
    ComplexVector x = std::move(x0);
    double t = 0.0;
    for (long long n = 0; n < steps; ++n) {
        const ComplexVector k1 = f(t, x);
        const ComplexVector k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
        const ComplexVector k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
        const ComplexVector k4 = f(t + h, x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = static_cast<double>(n + 1) * h;
        if (!x.allFinite()) {
            throw ConvergenceError("rk4_evolve: state became non-finite at t = " + std::to_string(t));
        }
    }
    return x;
}

void rk4_linear_step(const ComplexMatrix& l, ComplexVector& x, double h) {
    const ComplexVector k1 = l * x;
    const ComplexVector k2 = l * (x + 0.5 * h * k1);
    const ComplexVector k3 = l * (x + 0.5 * h * k2);
    const ComplexVector k4 = l * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
        throw ConvergenceError("rk4_linear_step: state became non-finite");
    }
}

}  // namespace wgm::numerics
