#include "mqj/effective.hpp"
#include "mqj/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace mqj;

TEST_CASE("derived parameters") {
    const auto e = derived_params(ModelParams{});
    CHECK(e.g_eff == doctest::Approx(-1.0 / (std::sqrt(2.0) * 50.0)).epsilon(1e-14));
    CHECK(e.g_eff == doctest::Approx(-0.0141421).epsilon(1e-6));
    CHECK(e.kappa_eff == doctest::Approx(8.0e-4).epsilon(1e-12));
    CHECK(e.delta_l == doctest::Approx(-0.005).epsilon(1e-12));
    CHECK(e.x == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(e.cooperativity == doctest::Approx(10.0).epsilon(1e-12));

    ModelParams p;
    p.delta = 0.0;
    CHECK_THROWS_WITH_AS(derived_params(p), doctest::Contains("delta"), NumericalError);
    p = ModelParams{};
    p.omega_m = 0.0;
    CHECK_THROWS_WITH_AS(derived_params(p), doctest::Contains("omega_m"), NumericalError);
}

TEST_CASE("effective hamiltonian") {
    const auto m = build_effective_model(ModelParams{});
    const Matrix& h = m.hamiltonian.matrix;
    const int g00 = 0, s01 = 1, g11 = 2, a01 = 3;
    CHECK(h.col(a01).isZero(0.0));
    CHECK(h.row(a01).isZero(0.0));
    CHECK(h(g00, s01).real() == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(h(g00, s01).real() == doctest::Approx(0.070711).epsilon(1e-5));
    CHECK(std::abs(h(g11, g11) - Complex(-0.005, -4.0e-4)) < 1e-15);
    REQUIRE(m.channels.size() == 1);
    CHECK(m.channels[0].rate == doctest::Approx(8.0e-4));
    CHECK((m.channels[0].op.matrix.col(a01)).isZero(0.0));
}

TEST_CASE("closed-form steady populations") {
    const auto zero = steady_populations(0.0);
    CHECK(zero.p00 == doctest::Approx(1.0 / 3.0));
    CHECK(zero.ps01 == doctest::Approx(1.0 / 3.0));
    CHECK(zero.p11 == doctest::Approx(1.0 / 3.0));

    const auto p = steady_populations(-0.05);
    CHECK(p.p00 == doctest::Approx(0.33554817).epsilon(1e-7));
    CHECK(p.ps01 == doctest::Approx(0.33551528).epsilon(1e-7));
    CHECK(p.p11 == doctest::Approx(0.32893655).epsilon(1e-7));

    const auto q = steady_populations(0.05);
    CHECK(q.p00 == p.p00);
    CHECK(q.p11 == p.p11);

    const auto big = steady_populations(1e4);
    CHECK(big.p00 == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(big.p11 < 1e-15);
    const auto inf = steady_populations(std::numeric_limits<double>::infinity());
    CHECK(inf.p00 == 1.0);
    CHECK(inf.ps01 == 0.0);
}

TEST_CASE("effective steady state against the closed form") {
    // weak damping: the closed form is exact to leading order in kappa_eff
    for (double x : {0.0, -0.05, -0.2, 0.7}) {
        CAPTURE(x);
        CHECK(steady_population_error(x, 0.1, 8e-8) < 1e-9);
    }
    // at model damping the correction is second order in kappa_eff / omega_m
    CHECK(steady_population_error(-0.05, 0.1, 8e-4) < 0.25 * std::pow(8e-4 / 0.1, 2));
}

TEST_CASE("quasi-steady amplitudes on the full dark eigenvector") {
    const ModelParams p;
    const auto model = make_system(p);
    const auto dark = dark_eigenstate(model);
    const Matrix u = collective_transform(model.basis).matrix;
    const Vector c = u * dark.state;
    const auto& b = model.basis;
    const Complex a01 = c(collective_index(b, Collective::a01, 0));
    const Complex a02 = c(collective_index(b, Collective::a02, 0));
    CHECK(a01.real() > 0.99);
    CHECK((a02 / a01).real() == doctest::Approx(-p.omega_l / (2.0 * p.delta)).epsilon(0.05));
    CHECK(std::abs(c(collective_index(b, Collective::a12, 0))) < 1e-3);
    CHECK(std::abs(c(collective_index(b, Collective::g22, 0))) < 1e-12);
    CHECK(-dark.eigenvalue.imag() * 2.0 == doctest::Approx(p.gamma() * 1e-4).epsilon(0.05));

    const auto r = quasisteady_residual(c, b, p);
    CHECK(r.alpha02_0 < 0.05 * std::abs(a02));
    CHECK(r.xi22_0 < 1e-12);

    CHECK(quasisteady_residual(Vector::Zero(b.dimension()), b, p).max() == 0.0);
}

TEST_CASE("timescales") {
    const auto ts = timescales(ModelParams{});
    CHECK(ts.t_cav == doctest::Approx(3.01 * 2500.0 / 4.0).epsilon(1e-12));
    CHECK(ts.t_dark == doctest::Approx(20000.0 / 0.15).epsilon(1e-12));
    CHECK(ts.t_light == doctest::Approx(4.027e5).epsilon(1e-3));
    CHECK(ts.ratio_dark_cav == doctest::Approx(70.9).epsilon(1e-3));
    CHECK(ts.ratio_light_dark == doctest::Approx(3.02).epsilon(1e-3));
    CHECK(ts.ratio_max == doctest::Approx(32.0 / 0.45).epsilon(1e-12));
    CHECK(ts.ratio_dark_cav < ts.ratio_max);

    ModelParams p;
    p.gamma0 = p.gamma1 = 0.0;
    CHECK_THROWS_AS(timescales(p), NumericalError);
    p = ModelParams{};
    p.kappa = 0.0;
    CHECK_THROWS_WITH_AS(timescales(p), doctest::Contains("kappa"), NumericalError);
}
