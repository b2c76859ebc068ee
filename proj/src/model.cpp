#include "mqj/model.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace mqj {

namespace {

Matrix level_op(int to, int from) {
    Matrix m = Matrix::Zero(3, 3);
    m(to, from) = 1.0;
    return m;
}

Matrix annihilation(int fock_size) {
    Matrix b = Matrix::Zero(fock_size, fock_size);
    for (int n = 1; n < fock_size; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

Matrix on_atom1(const BasisIndex& basis, const Matrix& s) {
    const Matrix rest = Matrix::Identity(3 * basis.fock_size(), 3 * basis.fock_size());
    return Eigen::kroneckerProduct(s, rest);
}

Matrix on_atom2(const BasisIndex& basis, const Matrix& s) {
    const Matrix i3 = Matrix::Identity(3, 3);
    const Matrix in = Matrix::Identity(basis.fock_size(), basis.fock_size());
    return Eigen::kroneckerProduct(i3, Eigen::kroneckerProduct(s, in).eval()).eval();
}

Matrix on_cavity(const BasisIndex& basis, const Matrix& c) {
    return Eigen::kroneckerProduct(Matrix::Identity(9, 9), c);
}

// Builder for operators written as sums of |c,n'><c',n| terms.
class CollectiveBuilder {
public:
    explicit CollectiveBuilder(const BasisIndex& basis)
        : basis_(basis), m_(Matrix::Zero(basis.dimension(), basis.dimension())) {}

    // value * |row><col| (x) 1_Fock
    void atomic(Collective row, Collective col, Complex value) {
        for (int n = 0; n < basis_.fock_size(); ++n)
            m_(collective_index(basis_, row, n), collective_index(basis_, col, n)) += value;
    }
    // value * |row><col| b^dagger + H.c.
    void with_creation(Collective row, Collective col, Complex value) {
        for (int n = 0; n + 1 < basis_.fock_size(); ++n) {
            const double amp = std::sqrt(static_cast<double>(n + 1));
            const auto r = collective_index(basis_, row, n + 1);
            const auto c = collective_index(basis_, col, n);
            m_(r, c) += value * amp;
            m_(c, r) += std::conj(value) * amp;
        }
    }
    void hermitian_pair(Collective row, Collective col, Complex value) {
        atomic(row, col, value);
        atomic(col, row, std::conj(value));
    }
    void photon_number(Complex value) {
        for (auto c : kCollectiveStates)
            for (int n = 0; n < basis_.fock_size(); ++n)
                m_(collective_index(basis_, c, n), collective_index(basis_, c, n)) += value * double(n);
    }
    Matrix take() { return std::move(m_); }

private:
    const BasisIndex& basis_;
    Matrix m_;
};

RegimeStatus classify(double ratio, double limit) {
    if (std::abs(ratio - 1.0) <= 1e-12) return RegimeStatus::borderline;
    return ratio <= limit ? RegimeStatus::pass : RegimeStatus::warn;
}

}  // namespace

void ModelParams::validate() const {
    const std::pair<const char*, double> rates[] = {{"g", g},           {"kappa", kappa},
                                                    {"gamma0", gamma0}, {"gamma1", gamma1},
                                                    {"omega_l", omega_l}, {"omega_m", omega_m}};
    for (const auto& [name, value] : rates) {
        if (!(value >= 0.0) || !std::isfinite(value))
            throw ConfigError(std::string(name) + " must be a finite value >= 0");
    }
    if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
    if (n_max < 0) throw ConfigError("n_max must be >= 0");
}

BasisIndex::BasisIndex(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw ConfigError("n_max must be >= 0");
}

ProductState BasisIndex::state(Eigen::Index k) const {
    const int n = static_cast<int>(k % fock_size());
    const int pair = static_cast<int>(k / fock_size());
    return {pair / 3, pair % 3, n};
}

BasisIndex build_basis(int n_max) { return BasisIndex(n_max); }

std::string_view collective_name(Collective c) {
    static constexpr std::array<std::string_view, 9> names{"00",  "11",  "22",  "s01", "s02",
                                                           "s12", "a01", "a02", "a12"};
    return names[static_cast<std::size_t>(c)];
}

std::string_view channel_name(ChannelId id) {
    switch (id) {
        case ChannelId::cavity: return "cavity";
        case ChannelId::atom1_to0: return "atom1_to0";
        case ChannelId::atom1_to1: return "atom1_to1";
        case ChannelId::atom2_to0: return "atom2_to0";
        case ChannelId::atom2_to1: return "atom2_to1";
    }
    return "unknown";
}

SystemModel make_system(const ModelParams& params) {
    params.validate();
    BasisIndex basis(params.n_max);
    auto h = build_hamiltonian(params, basis);
    auto channels = build_jump_operators(params, basis);
    return SystemModel{params, basis, std::move(h), std::move(channels)};
}

Operator build_hamiltonian(const ModelParams& p, const BasisIndex& basis) {
    const Matrix b = on_cavity(basis, annihilation(basis.fock_size()));
    const Matrix bdag = b.adjoint();
    const Complex level2(p.delta, -0.5 * p.gamma());

    Matrix h = Matrix::Zero(basis.dimension(), basis.dimension());
    for (auto on_atom : {on_atom1, on_atom2}) {
        const Matrix s12 = on_atom(basis, level_op(1, 2));
        const Matrix s01 = on_atom(basis, level_op(0, 1));
        const Matrix s02 = on_atom(basis, level_op(0, 2));
        h += 0.5 * p.omega_l * (s12 + s12.adjoint());
        h += 0.5 * p.omega_m * (s01 + s01.adjoint());
        const Matrix coupling = p.g * s02 * bdag;
        h += coupling + coupling.adjoint();
        h += level2 * on_atom(basis, level_op(2, 2));
    }
    h += Complex(0.0, -0.5 * p.kappa) * (bdag * b);
    return {std::move(h), BasisKind::bare, "H_cond"};
}

std::vector<Channel> build_jump_operators(const ModelParams& p, const BasisIndex& basis) {
    std::vector<Channel> channels;
    channels.reserve(5);
    channels.push_back({{on_cavity(basis, annihilation(basis.fock_size())), BasisKind::bare, "C_cav"},
                        p.kappa});
    channels.push_back({{on_atom1(basis, level_op(0, 2)), BasisKind::bare, "C_atom1_to0"}, p.gamma0});
    channels.push_back({{on_atom1(basis, level_op(1, 2)), BasisKind::bare, "C_atom1_to1"}, p.gamma1});
    channels.push_back({{on_atom2(basis, level_op(0, 2)), BasisKind::bare, "C_atom2_to0"}, p.gamma0});
    channels.push_back({{on_atom2(basis, level_op(1, 2)), BasisKind::bare, "C_atom2_to1"}, p.gamma1});
    return channels;
}

Matrix decay_operator(const Matrix& h) { return kI * (h - h.adjoint()); }

Matrix apply_reset(std::span<const Channel> channels, const Matrix& rho) {
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const auto& c : channels) {
        if (c.rate == 0.0) continue;
        out.noalias() += c.rate * (c.op.matrix * rho * c.op.matrix.adjoint());
    }
    return out;
}

Operator collective_transform(const BasisIndex& basis) {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix u = Matrix::Zero(basis.dimension(), basis.dimension());
    struct Pair {
        Collective sym, anti;
        int j, k;
    };
    constexpr Pair pairs[] = {{Collective::s01, Collective::a01, 0, 1},
                              {Collective::s02, Collective::a02, 0, 2},
                              {Collective::s12, Collective::a12, 1, 2}};
    for (int n = 0; n < basis.fock_size(); ++n) {
        u(collective_index(basis, Collective::g00, n), basis.index(0, 0, n)) = 1.0;
        u(collective_index(basis, Collective::g11, n), basis.index(1, 1, n)) = 1.0;
        u(collective_index(basis, Collective::g22, n), basis.index(2, 2, n)) = 1.0;
        for (const auto& pr : pairs) {
            const auto jk = basis.index(pr.j, pr.k, n);
            const auto kj = basis.index(pr.k, pr.j, n);
            u(collective_index(basis, pr.sym, n), jk) = r;
            u(collective_index(basis, pr.sym, n), kj) = r;
            u(collective_index(basis, pr.anti, n), jk) = r;
            u(collective_index(basis, pr.anti, n), kj) = -r;
        }
    }
    return {std::move(u), BasisKind::collective, "U_collective"};
}

Operator collective_hamiltonian(const ModelParams& p, const BasisIndex& basis) {
    using C = Collective;
    const double sq2 = std::sqrt(2.0);
    CollectiveBuilder h(basis);

    const double hl = 0.5 * p.omega_l;
    h.hermitian_pair(C::s01, C::s02, hl);
    h.hermitian_pair(C::a01, C::a02, hl);
    h.hermitian_pair(C::g11, C::s12, hl * sq2);
    h.hermitian_pair(C::s12, C::g22, hl * sq2);

    const double hm = 0.5 * p.omega_m;
    h.hermitian_pair(C::s02, C::s12, hm);
    h.hermitian_pair(C::a02, C::a12, hm);
    h.hermitian_pair(C::g00, C::s01, hm * sq2);
    h.hermitian_pair(C::s01, C::g11, hm * sq2);

    h.with_creation(C::s01, C::s12, p.g);
    h.with_creation(C::a01, C::a12, -p.g);
    h.with_creation(C::g00, C::s02, p.g * sq2);
    h.with_creation(C::s02, C::g22, p.g * sq2);

    h.photon_number(Complex(0.0, -0.5 * p.kappa));
    const Complex level2(p.delta, -0.5 * p.gamma());
    for (auto c : {C::s02, C::a02, C::s12, C::a12}) h.atomic(c, c, level2);
    h.atomic(C::g22, C::g22, 2.0 * level2);
    return {h.take(), BasisKind::collective, "H_cond"};
}

std::vector<Channel> collective_resets(const ModelParams& p, const BasisIndex& basis) {
    using C = Collective;
    const double r = 1.0 / std::sqrt(2.0);
    auto make = [&](std::initializer_list<std::tuple<C, C, double>> terms, const char* label,
                    double rate) {
        CollectiveBuilder b(basis);
        for (const auto& [row, col, v] : terms) b.atomic(row, col, v);
        return Channel{{b.take(), BasisKind::collective, label}, rate};
    };

    std::vector<Channel> out;
    out.push_back({{on_cavity(basis, annihilation(basis.fock_size())), BasisKind::collective, "C_cav"},
                   p.kappa});
    out.push_back(make({{C::g00, C::s02, 1.0}, {C::s01, C::s12, r}, {C::a01, C::a12, -r},
                        {C::s02, C::g22, 1.0}},
                       "R_01", p.gamma0));
    out.push_back(make({{C::g00, C::a02, 1.0}, {C::s01, C::a12, r}, {C::a01, C::s12, -r},
                        {C::a02, C::g22, -1.0}},
                       "R_02", p.gamma0));
    out.push_back(make({{C::g11, C::s12, 1.0}, {C::s01, C::s02, r}, {C::a01, C::a02, r},
                        {C::s12, C::g22, 1.0}},
                       "R_11", p.gamma1));
    out.push_back(make({{C::g11, C::a12, 1.0}, {C::s01, C::a02, r}, {C::a01, C::s02, r},
                        {C::a12, C::g22, -1.0}},
                       "R_12", p.gamma1));
    return out;
}

Matrix atom_swap(const BasisIndex& basis) {
    Matrix p = Matrix::Zero(basis.dimension(), basis.dimension());
    for (Eigen::Index k = 0; k < basis.dimension(); ++k) {
        const auto s = basis.state(k);
        p(basis.index(s.j2, s.j1, s.n), k) = 1.0;
    }
    return p;
}

Vector ket(const BasisIndex& basis, int j1, int j2, int n) {
    Vector v = Vector::Zero(basis.dimension());
    v(basis.index(j1, j2, n)) = 1.0;
    return v;
}

Vector collective_ket(const BasisIndex& basis, Collective c, int n) {
    const Operator u = collective_transform(basis);
    return u.matrix.row(collective_index(basis, c, n)).transpose();
}

std::string_view regime_status_name(RegimeStatus s) {
    switch (s) {
        case RegimeStatus::pass: return "pass";
        case RegimeStatus::warn: return "warn";
        case RegimeStatus::borderline: return "borderline";
    }
    return "unknown";
}

bool RegimeReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const RegimeCheck& c) { return c.status == RegimeStatus::pass; });
}

RegimeReport validate_regime(const ModelParams& p, const RegimeThresholds& t) {
    const double lo = std::min({p.g, p.kappa, p.gamma(), p.omega_l});
    const double hi = std::max({p.g, p.kappa, p.gamma(), p.omega_l});
    constexpr double inf = std::numeric_limits<double>::infinity();

    const double m_ratio = p.omega_m == 0.0 ? 0.0 : (lo > 0.0 ? p.omega_m / lo : inf);
    const double d_ratio = p.delta == 0.0 ? inf : hi / std::abs(p.delta);

    RegimeReport report;
    report.checks.push_back({"omega_m < min(g, kappa, gamma, omega_l)", m_ratio,
                             classify(m_ratio, t.max_omega_m_ratio)});
    report.checks.push_back({"max(g, kappa, gamma, omega_l) << delta", d_ratio,
                             classify(d_ratio, 1.0 / t.min_delta_ratio)});
    return report;
}

}  // namespace mqj
