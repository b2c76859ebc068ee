#include "mqj/effective.hpp"
#include "mqj/lindblad.hpp"

#include <doctest.h>

#include <cmath>

using namespace mqj;

namespace {

ModelParams undriven() {
    ModelParams p;
    p.g = 0.0;
    p.omega_l = 0.0;
    p.omega_m = 0.0;
    return p;
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

}  // namespace

TEST_CASE("rhs is traceless and reproduces independent decays") {
    const auto model = make_system(ModelParams{});
    const auto d = model.basis.dimension();
    Matrix a = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(std::sin(i + 2.0 * j), std::cos(3.0 * i - j));
    Matrix rho = a * a.adjoint();
    rho /= rho.trace();
    CHECK(std::abs(lindblad_rhs(rho, model.hamiltonian.matrix, model.channels).trace()) < 1e-13);

    const auto free = make_system(undriven());
    const auto k = free.basis.index(2, 2, 0);
    const Matrix r = lindblad_rhs(projector(ket(free.basis, 2, 2, 0)), free.hamiltonian.matrix, free.channels);
    CHECK(r(k, k).real() == doctest::Approx(-0.2));
}

TEST_CASE("liouvillian matches rhs") {
    const auto model = make_system(ModelParams{});
    const auto d = model.basis.dimension();
    Matrix rho = Matrix::Zero(d, d);
    rho(0, 0) = 0.6;
    rho(4, 4) = 0.4;
    rho(0, 4) = Complex(0.1, 0.2);
    rho(4, 0) = Complex(0.1, -0.2);
    const Matrix l = liouvillian(model.hamiltonian.matrix, model.channels);
    const Eigen::Map<const Vector> vec(rho.data(), d * d);
    const Vector lv = l * vec;
    const Matrix expected = lindblad_rhs(rho, model.hamiltonian.matrix, model.channels);
    CHECK(max_abs(Eigen::Map<const Matrix>(lv.data(), d, d) - expected) < 1e-13);
}

TEST_CASE("effective dark state is stationary") {
    const auto eff = build_effective_model(ModelParams{});
    Vector dark = Vector::Zero(4);
    dark(static_cast<int>(EffectiveState::a01)) = 1.0;
    CHECK(max_abs(lindblad_rhs(projector(dark), eff.hamiltonian.matrix, eff.channels)) < 1e-12);
}

TEST_CASE("evolution") {
    const auto free = make_system(undriven());
    const Matrix rho0 = projector(ket(free.basis, 0, 0, 1));
    CHECK(max_abs(evolve_density(rho0, 0.0, free.hamiltonian.matrix, free.channels) - rho0) == 0.0);
    const Matrix rho = evolve_density(rho0, 3.0, free.hamiltonian.matrix, free.channels);
    const auto k = free.basis.index(0, 0, 1);
    CHECK(rho(k, k).real() == doctest::Approx(std::exp(-3.0)).epsilon(1e-7));

    const auto model = make_system(ModelParams{});
    const Matrix start = projector(ket(model.basis, 0, 0, 0));
    EvolveStats stats;
    const Matrix a = evolve_density(start, 50.0, model.hamiltonian.matrix, model.channels, {}, &stats);
    const Matrix b = evolve_density_exact(start, 50.0, model.hamiltonian.matrix, model.channels);
    CHECK(max_abs(a - b) < 1e-7);
    CHECK(stats.accepted > 0);
    const auto diag = diagnose(a);
    CHECK(diag.hermiticity < 1e-10);
    CHECK(diag.trace_error < 1e-9);
    CHECK(diag.min_eigenvalue > -1e-8);
}

TEST_CASE("step-size underflow is reported") {
    const auto model = make_system(ModelParams{});
    EvolveOptions o;
    o.rel_tol = 1e-30;
    o.abs_tol = 1e-30;
    o.min_step = 1e-3;
    const Matrix start = projector(ket(model.basis, 0, 0, 0));
    CHECK_THROWS_AS(evolve_density(start, 10.0, model.hamiltonian.matrix, model.channels, o), NumericalError);
}

TEST_CASE("steady state") {
    const auto eff = light_manifold(build_effective_model(ModelParams{}));
    const Matrix rho = steady_state(eff.hamiltonian.matrix, eff.channels);
    const auto pop = steady_populations(-0.05);
    CHECK(pop.p00 == doctest::Approx(0.33554).epsilon(3e-5));
    CHECK(pop.ps01 == doctest::Approx(0.33552).epsilon(3e-5));
    CHECK(pop.p11 == doctest::Approx(0.32894).epsilon(3e-5));
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    // leading-order agreement at model damping
    CHECK(std::abs(rho(0, 0).real() - pop.p00) < 2e-5);
    CHECK(std::abs(rho(2, 2).real() - pop.p11) < 2e-5);

    const auto sym = light_manifold(build_effective_model(0.1, 0.0, 8e-4));
    const Matrix r0 = steady_state(sym.hamiltonian.matrix, sym.channels);
    for (int k = 0; k < 3; ++k) CHECK(r0(k, k).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-4));

    const auto free = make_system(undriven());
    CHECK_THROWS_WITH_AS(steady_state(free.hamiltonian.matrix, free.channels),
                         doctest::Contains("degenerate steady manifold"), NumericalError);
}
