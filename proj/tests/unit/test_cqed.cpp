#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wgm/cqed.hpp"
#include "wgm/errors.hpp"
#include "wgm/spt.hpp"

using namespace wgm;
using namespace wgm::cqed;

namespace {

// Real coordinates of a Hermitian matrix in the layout used by hermitian_real_form.
numerics::RealVector real_coordinates(const ComplexMatrix& rho) {
    const Eigen::Index d = rho.rows();
    numerics::RealVector x(d * d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) x(i + j * d) = i <= j ? rho(i, j).real() : rho(j, i).imag();
    return x;
}

ComplexMatrix random_hermitian(int d, unsigned seed) {
    std::srand(seed);
    const ComplexMatrix x = ComplexMatrix::Random(d, d);
    return x + x.adjoint();
}

}  // namespace

TEST_CASE("Hilbert space validation") {
    CHECK(HilbertSpace{}.dimension() == 32);
    CHECK_THROWS_AS((HilbertSpace{1, 2}.validate()), ConfigError);
    CHECK_THROWS_AS((HilbertSpace{0, 8}.validate()), ConfigError);
    CHECK_NOTHROW((HilbertSpace{2, 2}.validate()));
}

TEST_CASE("operators match an independent construction") {
    const HilbertSpace s{3, 2};
    const oracle::Fock f{3, 2};
    CHECK((annihilation_a(s).matrix - f.a()).norm() == 0.0);
    CHECK((annihilation_b(s).matrix - f.b()).norm() == 0.0);
    CHECK((sigma_minus(s).matrix - f.sm()).norm() == 0.0);
    CHECK((sigma_plus(s).matrix - f.sm().adjoint()).norm() == 0.0);
    CHECK(sigma_z(s).matrix.isApprox(f.sm().adjoint() * f.sm() - f.sm() * f.sm().adjoint()));
    CHECK(identity(s).matrix.isIdentity());
    CHECK(annihilation_a(s).label == OperatorLabel::A);
}

TEST_CASE("[a, a+] = 1 except on the truncation edge") {
    const HilbertSpace s{4, 3};
    const ComplexMatrix a = annihilation_a(s).matrix;
    const ComplexMatrix c = a * a.adjoint() - a.adjoint() * a;
    const oracle::Fock f{4, 3};
    for (int na = 0; na < 4; ++na)
        for (int nb = 0; nb < 3; ++nb)
            for (int e = 0; e < 2; ++e) {
                const int i = f.index(na, nb, e);
                CHECK(std::abs(c(i, i) - (na == 3 ? -3.0 : 1.0)) < 1e-14);
            }
}

TEST_CASE("Hamiltonian is Hermitian and matches an independent construction") {
    const SystemConfig c = oracle::baseline(100.0, 10.0);
    const HilbertSpace s{3, 3};
    const double kt = c.rates.kappa_tot();
    const ComplexMatrix h = build_hamiltonian(c, s, 0.7 * kt, -0.3 * kt).matrix;
    CHECK((h - h.adjoint()).norm() <= 1e-12 * h.norm());
    const ComplexMatrix ref = oracle::hamiltonian(c, oracle::Fock{3, 3}, 0.7 * kt, -0.3 * kt);
    CHECK((h - ref).norm() <= 1e-14 * ref.norm());
}

TEST_CASE("Liouvillian matches the column-by-column construction") {
    const SystemConfig c = oracle::baseline(100.0, 1.0);
    const HilbertSpace s{3, 2};
    const oracle::Fock f{3, 2};
    const double kt = c.rates.kappa_tot();
    const OperatorMatrix h = build_hamiltonian(c, s, 0.4 * kt, 0.4 * kt);
    const Superoperator l = build_liouvillian(h, c.rates, s);
    const oracle::Mat ref = oracle::liouvillian(h.matrix, f, kt, c.rates.gamma);
    CHECK((l - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("Liouvillian guards") {
    const SystemConfig c = oracle::baseline();
    const HilbertSpace big{8, 8};
    const OperatorMatrix h = build_hamiltonian(c, big, 0.0, 0.0);
    CHECK_THROWS_AS(build_liouvillian(h, c.rates, big), ResourceError);
    const HilbertSpace over{6, 6};  // 72^2 = 5184 > 4096
    const OperatorMatrix h6 = build_hamiltonian(c, over, 0.0, 0.0);
    CHECK_THROWS_AS(build_liouvillian(h6, c.rates, over), ResourceError);
    CHECK_NOTHROW(build_liouvillian(h6, c.rates, over, 1 << 13));

    const HilbertSpace s{2, 2};
    OperatorMatrix bad = build_hamiltonian(c, s, 0.0, 0.0);
    bad.matrix(0, 1) += 1.0;
    CHECK_THROWS_AS(build_liouvillian(bad, c.rates, s), DomainError);
    const OperatorMatrix wrong = build_hamiltonian(c, HilbertSpace{3, 2}, 0.0, 0.0);
    CHECK_THROWS_AS(build_liouvillian(wrong, c.rates, s), DomainError);
}

TEST_CASE("Liouvillian preserves trace and Hermiticity") {
    const SystemConfig c = oracle::baseline(100.0, 10.0);
    const HilbertSpace s{3, 3};
    const Eigen::Index d = s.dimension();
    const Superoperator l = build_liouvillian(build_hamiltonian(c, s, 1e11, 1e11), c.rates, s);
    const ComplexMatrix rho = random_hermitian(static_cast<int>(d), 5);
    const ComplexVector v = Eigen::Map<const ComplexVector>(rho.data(), d * d);
    const ComplexVector w = l * v;
    const ComplexMatrix drho = Eigen::Map<const ComplexMatrix>(w.data(), d, d);
    CHECK(std::abs(drho.trace()) <= 1e-12 * l.norm());
    CHECK((drho - drho.adjoint()).norm() <= 1e-12 * drho.norm());

    // the real form acts on real coordinates the way L acts on rho
    const numerics::RealMatrix r = hermitian_real_form(l);
    CHECK((r * real_coordinates(rho) - real_coordinates(drho)).norm() <= 1e-12 * drho.norm());
}

TEST_CASE("null-space steady state matches the full-pivot kernel oracle") {
    for (double ratio : {0.1, 100.0}) {
        const SystemConfig c = oracle::baseline(ratio, 1.0);
        const HilbertSpace s{3, 3};
        const double kt = c.rates.kappa_tot();
        for (double x : {-1.0, 0.0, 0.37}) {
            const double d1 = x * kt;
            const Superoperator l = build_liouvillian(build_hamiltonian(c, s, d1, d1), c.rates, s);
            const DensityMatrix rho = steady_state(l);
            const ComplexMatrix ref = oracle::steady_state(l, static_cast<int>(s.dimension()));
            CHECK((rho.rho - ref).norm() < 1e-9);
            CHECK(steady_state_residual(l, rho) < 1e-10);
        }
    }
}

TEST_CASE("null-space and time-evolution paths agree on <a>") {
    const SystemConfig c = oracle::baseline(100.0);
    const HilbertSpace s{2, 2};
    const double kt = c.rates.kappa_tot();
    const ComplexMatrix a = annihilation_a(s).matrix;
    const Superoperator l = build_liouvillian(build_hamiltonian(c, s, 0.3 * kt, 0.3 * kt), c.rates, s);

    const DensityMatrix null_space = steady_state(l);
    SteadyStateOptions evolve;
    evolve.method = SteadyStateMethod::TimeEvolution;
    const DensityMatrix evolved = steady_state(l, evolve);
    const Complex a1 = null_space.expectation(a);
    const Complex a2 = evolved.expectation(a);
    CHECK(std::abs(a1 - a2) < 1e-8);
    CHECK(std::abs(a1 - a2) < 1e-6 * std::abs(a1));

    const DensityMatrix pair = steady_state_from_hermitian_pair(l);
    CHECK(std::abs(pair.expectation(a) - a1) < 1e-6 * std::abs(a1));
}

TEST_CASE("time evolution reports non-convergence") {
    const SystemConfig c = oracle::baseline(100.0);
    const HilbertSpace s{2, 2};
    const Superoperator l = build_liouvillian(build_hamiltonian(c, s, 0.0, 0.0), c.rates, s);
    SteadyStateOptions o;
    o.method = SteadyStateMethod::TimeEvolution;
    o.max_steps = 100;
    CHECK_THROWS_AS(steady_state(l, o), ConvergenceError);
}

TEST_CASE("a dissipation-free emitter makes the steady state ambiguous") {
    SystemConfig c = oracle::baseline();
    c.rates.gamma = 0.0;
    const HilbertSpace s{2, 2};
    const Superoperator l = build_liouvillian(build_hamiltonian(c, s, 0.0, 0.0), c.rates, s);
    CHECK_THROWS_AS(steady_state(l), SingularityError);
    CHECK_THROWS_AS(steady_state_from_hermitian_pair(l), SingularityError);
}

TEST_CASE("physicality report") {
    const HilbertSpace s{3, 3};
    const PhysicalityReport vac = check_physicality(vacuum_state(s), s);
    CHECK(vac.ok());
    CHECK(vac.trace_deviation == 0.0);

    DensityMatrix top = vacuum_state(s);
    top.rho.setZero();
    top.rho(s.dimension() - 1, s.dimension() - 1) = 1.0;
    const PhysicalityReport r = check_physicality(top, s);
    CHECK(r.top_fock_population() == 1.0);
    CHECK_FALSE(r.ok());

    DensityMatrix neg = vacuum_state(s);
    neg.rho(1, 1) = -0.1;
    neg.rho(0, 0) = 1.1;
    CHECK(check_physicality(neg, s).min_eigenvalue < -0.09);
    CHECK_FALSE(check_physicality(neg, s).ok());
}

TEST_CASE("critical-coupling master solve") {
    const SystemConfig c = oracle::baseline();
    const SteadyStateResult r = master_equation_transmission(c, HilbertSpace{}, 0.0);
    CHECK(r.transmission < 1e-3);
    REQUIRE(r.physicality);
    CHECK(r.physicality->ok());
    // <a> = alpha_in sqrt(2 kappa_ex) / kappa_tot on resonance
    const double expected = c.drive_amplitude * std::sqrt(2 * c.rates.kappa_ex) / c.rates.kappa_tot();
    CHECK(std::abs(r.a - expected) < 1e-6 * expected);
    CHECK(std::abs(r.a_out - (c.drive_amplitude - std::sqrt(2 * c.rates.kappa_ex) * r.a)) < 1e-15);
}

TEST_CASE("strong coupling master solve matches the semiclassical value") {
    const SystemConfig c = oracle::baseline(100.0);
    const MasterEquationSolver solver(c, HilbertSpace{});
    const double kt = c.rates.kappa_tot();
    for (double x : {0.0, -1.0, 2.5}) {
        const SteadyStateResult r = solver.solve(x * kt);
        const double semi = std::norm(semiclassical_transmission(c, x * kt, x * kt));
        CHECK(std::abs(r.transmission - semi) < 1e-2);
        CHECK(r.residual < 1e-10);
    }
}

TEST_CASE("doubling the truncation leaves the transmission unchanged") {
    const SystemConfig c = oracle::baseline(100.0, 1.0);
    const double d = 0.9 * c.rates.kappa_tot();
    const double base = master_equation_transmission(c, HilbertSpace{4, 4}, d).transmission;
    const double wide_a = master_equation_transmission(c, HilbertSpace{8, 4}, d).transmission;
    const double wide_b = master_equation_transmission(c, HilbertSpace{4, 8}, d).transmission;
    CHECK(std::abs(base - wide_a) < 1e-6);
    CHECK(std::abs(base - wide_b) < 1e-6);
}

TEST_CASE("zero drive has no defined transmission") {
    SystemConfig c = oracle::baseline();
    c.drive_amplitude = 0.0;
    CHECK_THROWS_AS(master_equation_transmission(c, HilbertSpace{2, 2}, 0.0), DomainError);
}

TEST_CASE("semiclassical fixed point solves the equations of motion") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double ratio : {0.0, 0.1, 100.0})
        for (double hk : {0.0, 10.0})
            for (double sz : {-1.0, -0.3, 0.5}) {
                SystemConfig c = oracle::baseline(ratio, hk);
                c.sigma_z = sz;
                const double kt = c.rates.kappa_tot();
                const double d1 = 5 * kt * u(rng);
                const double d2 = 5 * kt * u(rng);
                const SemiclassicalState st = semiclassical_fixed_point(c, d1, d2);
                CHECK(equations_of_motion_residual(c, d1, d2, st) < 1e-10);
                CHECK(std::abs(st.a - semiclassical_amplitude(c, d1, d2)) <= 1e-12 * std::abs(st.a));
                const Complex t = semiclassical_transmission(c, d1, d2);
                const Complex from_a =
                    (c.drive_amplitude - std::sqrt(2 * c.rates.kappa_ex) * st.a) / c.drive_amplitude;
                CHECK(std::abs(t - from_a) < 1e-12);
                CHECK(std::abs(t - oracle::mean_field_transmission(c, d1, d2, sz)) < 1e-12);
            }
}

TEST_CASE("semiclassical critical coupling") {
    const SystemConfig c = oracle::baseline();
    CHECK(std::abs(semiclassical_transmission(c, 0.0, 0.0)) < 1e-15);
    const double expected = c.drive_amplitude * std::sqrt(2 * c.rates.kappa_ex) / c.rates.kappa_tot();
    CHECK(std::abs(semiclassical_amplitude(c, 0.0, 0.0) - expected) < 1e-15 * expected);
}

TEST_CASE("steady-state method names") {
    CHECK(to_string(SteadyStateMethod::NullSpace) == "null-space");
    CHECK(to_string(SteadyStateMethod::TimeEvolution) == "time-evolution");
    CHECK(to_string(SteadyStateMethod::Semiclassical) == "semiclassical");
}
