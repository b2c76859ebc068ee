#include "mqj/validation.hpp"

#include "mqj/lindblad.hpp"
#include "mqj/rng.hpp"
#include "mqj/trajectory.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>

namespace mqj {

Matrix reset_superoperator(std::span<const Channel> channels) {
    if (channels.empty()) return {};
    const auto d = channels.front().op.matrix.rows();
    Matrix s = Matrix::Zero(d * d, d * d);
    for (const auto& c : channels)
        s += c.rate * Eigen::kroneckerProduct(c.op.matrix.conjugate(), c.op.matrix).eval();
    return s;
}

std::vector<Channel> transform_channels(std::span<const Channel> channels, const Matrix& u,
                                        BasisKind target) {
    std::vector<Channel> out;
    out.reserve(channels.size());
    for (const auto& c : channels)
        out.push_back({{u * c.op.matrix * u.adjoint(), target, c.op.label}, c.rate});
    return out;
}

double decay_bookkeeping_error(const Matrix& h, std::span<const Channel> channels) {
    Matrix sum = Matrix::Zero(h.rows(), h.cols());
    for (const auto& c : channels) sum += c.rate * (c.op.matrix.adjoint() * c.op.matrix);
    return max_abs(decay_operator(h) - sum);
}

double hamiltonian_equivalence_error(const ModelParams& params, const BasisIndex& basis) {
    const Matrix u = collective_transform(basis).matrix;
    const Matrix bare = build_hamiltonian(params, basis).matrix;
    return max_abs(u * bare * u.adjoint() - collective_hamiltonian(params, basis).matrix);
}

double reset_equivalence_error(const ModelParams& params, const BasisIndex& basis) {
    const Matrix u = collective_transform(basis).matrix;
    const auto bare = build_jump_operators(params, basis);
    const auto moved = transform_channels(bare, u, BasisKind::collective);
    const auto coll = collective_resets(params, basis);
    // Channel order: bare {cav, 1->0, 1->1, 2->0, 2->1}; collective {cav, R01, R02, R11, R12}.
    const std::vector<Channel> bare_j0{moved[1], moved[3]}, bare_j1{moved[2], moved[4]};
    const std::vector<Channel> coll_j0{coll[1], coll[2]}, coll_j1{coll[3], coll[4]};
    return std::max({max_abs(reset_superoperator(moved) - reset_superoperator(coll)),
                     max_abs(reset_superoperator(bare_j0) - reset_superoperator(coll_j0)),
                     max_abs(reset_superoperator(bare_j1) - reset_superoperator(coll_j1))});
}

double antisymmetric_leakage(const ModelParams& params, const BasisIndex& basis) {
    const Matrix h = collective_hamiltonian(params, basis).matrix;
    const auto row = collective_index(basis, Collective::a01, 0);
    double worst = 0.0;
    for (auto c : {Collective::g00, Collective::g11, Collective::g22, Collective::s01,
                   Collective::s02, Collective::s12})
        for (int n = 0; n < basis.fock_size(); ++n) {
            const auto col = collective_index(basis, c, n);
            worst = std::max({worst, std::abs(h(row, col)), std::abs(h(col, row))});
        }
    return worst;
}

double swap_symmetry_error(const SystemModel& model) {
    const Matrix p = atom_swap(model.basis);
    double worst = max_abs(p * model.hamiltonian.matrix * p - model.hamiltonian.matrix);
    const Matrix conj = Eigen::kroneckerProduct(p.conjugate(), p).eval();
    const auto& ch = model.channels;
    for (auto pair : {std::array<int, 2>{1, 3}, std::array<int, 2>{2, 4}}) {
        const std::vector<Channel> level{ch[pair[0]], ch[pair[1]]};
        const Matrix s = reset_superoperator(level);
        worst = std::max(worst, max_abs(conj * s - s * conj));
    }
    return worst;
}

double norm_loss_identity_error(const SystemModel& model, int samples, std::uint64_t seed) {
    const Propagator prop(model.hamiltonian.matrix);
    CounterRng rng(seed);
    const double h = 2e-5;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vector psi(model.basis.dimension());
        for (auto& a : psi) a = Complex(2.0 * rng.next() - 1.0, 2.0 * rng.next() - 1.0);
        psi.normalize();
        auto surv = [&](double t) { return prop.propagate(psi, t).squaredNorm(); };
        const double fd =
            (-surv(2 * h) + 8.0 * surv(h) - 8.0 * surv(-h) + surv(-2 * h)) / (12.0 * h);
        double weights = 0.0;
        for (const auto& c : model.channels) weights += c.rate * (c.op.matrix * psi).squaredNorm();
        if (weights > 0.0) worst = std::max(worst, std::abs(fd + weights) / weights);
    }
    return worst;
}

double steady_population_error(double x, double omega_m, double kappa_eff) {
    const auto light = light_manifold(build_effective_model(omega_m, x * omega_m, kappa_eff));
    const Matrix rho = steady_state(light.hamiltonian.matrix, light.channels);
    const auto p = steady_populations(x);
    return std::max({std::abs(rho(0, 0).real() - p.p00), std::abs(rho(1, 1).real() - p.ps01),
                     std::abs(rho(2, 2).real() - p.p11)});
}

std::vector<CheckResult> run_invariant_suite(const ModelParams& params) {
    std::vector<CheckResult> out;
    auto check = [&](std::string name, double value, double tol) {
        out.push_back({std::move(name), value, tol, value <= tol});
    };

    const auto model = make_system(params);
    check("decay bookkeeping i(H-H^+) = sum C^+C", decay_bookkeeping_error(model.hamiltonian.matrix, model.channels), 1e-12);
    const Matrix u = collective_transform(model.basis).matrix;
    check("collective transform unitary", max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())), 1e-14);
    check("atom-swap symmetry", swap_symmetry_error(model), 1e-12);
    check("collective Hamiltonian equivalence", hamiltonian_equivalence_error(params, model.basis), 1e-12);
    check("collective reset superoperator equivalence", reset_equivalence_error(params, model.basis), 1e-12);
    check("antisymmetric sector decoupling", antisymmetric_leakage(params, model.basis), 1e-12);
    check("norm-loss rate vs channel weights", norm_loss_identity_error(model, 8, 0x5eed), 1e-8);

    const Propagator prop(model.hamiltonian.matrix);
    check("propagator spectral reconstruction", prop.spectral() ? prop.reconstruction_error() : INFINITY,
          1e-9 * max_abs(model.hamiltonian.matrix));

    if (params.delta != 0.0 && params.omega_m != 0.0 && params.kappa * params.gamma() != 0.0) {
        const auto eff = build_effective_model(params);
        const Vector dark = Vector::Unit(4, static_cast<int>(EffectiveState::a01));
        check("effective H annihilates |a01,0>", max_abs(eff.hamiltonian.matrix * dark), 0.0);
        const Matrix rho_dark = dark * dark.adjoint();
        check("effective Lindblad rhs vanishes on |a01,0>",
              max_abs(lindblad_rhs(rho_dark, eff.hamiltonian.matrix, eff.channels)), 1e-12);

        for (double x : {0.0, -0.05, -0.2})
            check("closed-form steady populations, weak damping, x = " + std::to_string(x),
                  steady_population_error(x, 0.1, 8e-8), 1e-9);
        const auto e = derived_params(params);
        check("closed-form steady populations at model damping (leading order)",
              steady_population_error(e.x, params.omega_m, e.kappa_eff),
              0.25 * std::pow(e.kappa_eff / params.omega_m, 2) + 1e-12);

        const auto dark_full = dark_eigenstate(model);
        const Vector coll = u * dark_full.state;
        const Complex a01 = coll(collective_index(model.basis, Collective::a01, 0));
        const Complex a02 = coll(collective_index(model.basis, Collective::a02, 0));
        const double predicted = -params.omega_l / (2.0 * params.delta);
        check("quasi-steady alpha02/alpha01 on dark eigenvector (relative)",
              std::abs(a02 / a01 - predicted) / std::abs(predicted), 0.05);
    }

    EvolveStats stats;
    const Matrix rho0 = ket(model.basis, 0, 0, 0) * ket(model.basis, 0, 0, 0).adjoint();
    const Matrix rho = evolve_density(rho0, 50.0, model.hamiltonian.matrix, model.channels, {}, &stats);
    const auto diag = diagnose(rho);
    check("Lindblad trace preservation (t = 50)", diag.trace_error, 1e-9);
    check("Lindblad Hermiticity (t = 50)", diag.hermiticity, 1e-10);
    check("Lindblad positivity, -min eigenvalue (t = 50)", -diag.min_eigenvalue, 1e-8);
    return out;
}

}  // namespace mqj
