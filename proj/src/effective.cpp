#include "mqj/effective.hpp"

#include <algorithm>
#include <cmath>

namespace mqj {

EffectiveParams derived_params(const ModelParams& p) {
    if (p.delta == 0.0) throw NumericalError("g_eff, delta_l and x are undefined for delta = 0");
    if (p.omega_m == 0.0) throw NumericalError("x is undefined for omega_m = 0");
    if (p.kappa == 0.0) throw NumericalError("kappa_eff is undefined for kappa = 0");
    if (p.kappa * p.gamma() == 0.0)
        throw NumericalError("cooperativity is undefined for kappa * gamma = 0");

    EffectiveParams e{};
    e.g_eff = -p.omega_l * p.g / (std::sqrt(2.0) * p.delta);
    e.delta_l = -p.omega_l * p.omega_l / (4.0 * p.delta);
    e.kappa_eff = 4.0 * e.g_eff * e.g_eff / p.kappa;
    e.x = -p.omega_l * p.omega_l / (4.0 * p.delta * p.omega_m);
    e.cooperativity = p.g * p.g / (p.kappa * p.gamma());
    return e;
}

EffectiveModel build_effective_model(double omega_m, double delta_l, double kappa_eff) {
    constexpr int g00 = 0, s01 = 1, g11 = 2;

    Matrix h = Matrix::Zero(4, 4);
    const double ladder = omega_m / std::sqrt(2.0);
    h(g00, s01) = h(s01, g00) = ladder;
    h(s01, g11) = h(g11, s01) = ladder;
    h(g11, g11) += delta_l;
    h(g00, g00) -= delta_l;
    h(s01, s01) += Complex(0.0, -0.5 * kappa_eff);
    h(g11, g11) += Complex(0.0, -0.5 * kappa_eff);

    // Cavity leakage from the one-photon admixtures is a single coherent map.
    Matrix jump = Matrix::Zero(4, 4);
    jump(g00, s01) = 1.0;
    jump(s01, g11) = 1.0;

    EffectiveModel model;
    model.hamiltonian = {std::move(h), BasisKind::effective, "H_eff"};
    model.channels.push_back({{std::move(jump), BasisKind::effective, "C_cav_eff"}, kappa_eff});
    return model;
}

EffectiveModel build_effective_model(const ModelParams& p) {
    const auto e = derived_params(p);
    return build_effective_model(p.omega_m, e.delta_l, e.kappa_eff);
}

EffectiveModel light_manifold(const EffectiveModel& model) {
    EffectiveModel out;
    out.hamiltonian = {model.hamiltonian.matrix.topLeftCorner(3, 3), BasisKind::effective,
                       model.hamiltonian.label + "_light"};
    for (const auto& c : model.channels)
        out.channels.push_back({{c.op.matrix.topLeftCorner(3, 3), BasisKind::effective, c.op.label},
                                c.rate});
    return out;
}

double QuasiSteadyResidual::max() const {
    return std::max({alpha02_0, alpha12_0, xi22_0, sigma02_0, sigma12_0, xi00_1, sigma01_1});
}

QuasiSteadyResidual quasisteady_residual(const Vector& v, const BasisIndex& basis,
                                         const ModelParams& p) {
    if (v.size() != basis.dimension())
        throw NumericalError("quasisteady_residual: state dimension mismatch");
    const auto e = derived_params(p);
    auto amp = [&](Collective c, int n) -> Complex {
        return n <= basis.n_max() ? v(collective_index(basis, c, n)) : Complex(0.0);
    };
    using C = Collective;
    const double l2 = p.omega_l / (2.0 * p.delta);
    const double ls2 = p.omega_l / (std::sqrt(2.0) * p.delta);
    const Complex photon = kI * 2.0 * e.g_eff / p.kappa;

    QuasiSteadyResidual r{};
    r.alpha02_0 = std::abs(amp(C::a02, 0) + l2 * amp(C::a01, 0));
    r.alpha12_0 = std::abs(amp(C::a12, 0));
    r.xi22_0 = std::abs(amp(C::g22, 0));
    r.sigma02_0 = std::abs(amp(C::s02, 0) + l2 * amp(C::s01, 0));
    r.sigma12_0 = std::abs(amp(C::s12, 0) - ls2 * amp(C::g11, 0));
    r.xi00_1 = std::abs(amp(C::g00, 1) + photon * amp(C::s01, 0));
    r.sigma01_1 = std::abs(amp(C::s01, 1) + photon * amp(C::g11, 0));
    return r;
}

DarkEigenstate dark_eigenstate(const SystemModel& model) {
    Eigen::ComplexEigenSolver<Matrix> solver(model.hamiltonian.matrix);
    if (solver.info() != Eigen::Success) throw NumericalError("dark_eigenstate: eigensolver failed");
    const Vector target = collective_ket(model.basis, Collective::a01, 0);
    Eigen::Index best = 0;
    double best_overlap = -1.0;
    for (Eigen::Index k = 0; k < solver.eigenvectors().cols(); ++k) {
        const auto col = solver.eigenvectors().col(k);
        const double overlap = std::abs(target.dot(col)) / col.norm();
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = k;
        }
    }
    Vector v = solver.eigenvectors().col(best).normalized();
    const Complex phase = target.dot(v);
    v *= std::conj(phase) / std::abs(phase);
    return {std::move(v), solver.eigenvalues()(best)};
}

SteadyPopulations steady_populations(double x) {
    const double x2 = x * x;
    if (!std::isfinite(x2)) return {1.0, 0.0, 0.0};
    const double denom = 3.0 + 16.0 * x2 + 16.0 * x2 * x2;
    const double ps01 = (1.0 + 8.0 * x2) / denom;
    const double p11 = 1.0 / denom;
    return {1.0 - ps01 - p11, ps01, p11};
}

TimescaleSummary timescales(const ModelParams& p) {
    if (p.g == 0.0) throw NumericalError("T_cav is undefined for g = 0");
    if (p.omega_l == 0.0) throw NumericalError("T_cav, T_dark and T_light are undefined for omega_l = 0");
    if (p.kappa == 0.0) throw NumericalError("T_cav and ratio_max are undefined for kappa = 0");
    if (p.delta == 0.0) throw NumericalError("timescales are undefined for delta = 0");
    if (p.omega_m == 0.0) throw NumericalError("x, T_cav and T_light are undefined for omega_m = 0");
    const double dark_rate = 2.0 * p.gamma0 + p.gamma1;
    if (!(dark_rate > 0.0)) throw NumericalError("T_dark is undefined for 2 gamma0 + gamma1 = 0");

    const double x = -p.omega_l * p.omega_l / (4.0 * p.delta * p.omega_m);
    const double x2 = x * x;
    const double d2 = p.delta * p.delta;
    const double l2 = p.omega_l * p.omega_l;
    const double light_rate = 2.0 * p.gamma0 + (1.0 + 8.0 * x2) * p.gamma1;

    TimescaleSummary s{};
    s.t_cav = (3.0 + 4.0 * x2) * p.kappa * d2 / (4.0 * p.g * p.g * l2);
    s.t_dark = 8.0 * d2 / (l2 * dark_rate);
    s.t_light = (3.0 + 16.0 * x2 + 16.0 * x2 * x2) / light_rate * 8.0 * d2 / l2;
    s.ratio_dark_cav = s.t_dark / s.t_cav;
    s.ratio_light_dark = s.t_light / s.t_dark;
    s.ratio_max = 32.0 * p.g * p.g / (3.0 * p.kappa * dark_rate);
    return s;
}

}  // namespace mqj
