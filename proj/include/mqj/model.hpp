#pragma once

#include "mqj/types.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mqj {

/// Physical parameters in units of the atom-cavity coupling g (hbar = 1,
/// time in 1/g). Defaults are the C = 10 operating point.
struct ModelParams {
    double g = 1.0;
    double kappa = 1.0;
    double gamma0 = 0.05;  // 2 -> 0 decay
    double gamma1 = 0.05;  // 2 -> 1 decay
    double omega_l = 1.0;  // 1-2 drive
    double omega_m = 0.1;  // 0-1 drive
    double delta = 50.0;   // detuning of level 2
    int n_max = 2;         // Fock truncation

    double gamma() const { return gamma0 + gamma1; }

    /// Throws ConfigError naming the first negative rate or truncation.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct ProductState {
    int j1;
    int j2;
    int n;
    friend bool operator==(const ProductState&, const ProductState&) = default;
};

/// Lexicographic (j1, j2, n) enumeration of the two-atom + cavity space.
class BasisIndex {
public:
    explicit BasisIndex(int n_max);

    int n_max() const { return n_max_; }
    int fock_size() const { return n_max_ + 1; }
    Eigen::Index dimension() const { return 9 * fock_size(); }

    Eigen::Index index(int j1, int j2, int n) const { return (j1 * 3 + j2) * fock_size() + n; }
    Eigen::Index index(const ProductState& s) const { return index(s.j1, s.j2, s.n); }
    ProductState state(Eigen::Index k) const;

private:
    int n_max_;
};

BasisIndex build_basis(int n_max);

/// Exchange-adapted atomic states. |s_jk>, |a_jk> = (|jk> +- |kj>)/sqrt2.
enum class Collective { g00, g11, g22, s01, s02, s12, a01, a02, a12 };
inline constexpr std::array<Collective, 9> kCollectiveStates{
    Collective::g00, Collective::g11, Collective::g22, Collective::s01, Collective::s02,
    Collective::s12, Collective::a01, Collective::a02, Collective::a12};
std::string_view collective_name(Collective c);

/// Flat index of |c, n> in the collective basis (same layout as BasisIndex).
inline Eigen::Index collective_index(const BasisIndex& basis, Collective c, int n) {
    return static_cast<Eigen::Index>(c) * basis.fock_size() + n;
}

enum class BasisKind { bare, collective, effective };

struct Operator {
    Matrix matrix;
    BasisKind basis = BasisKind::bare;
    std::string label;
};

/// Fixed channel order; trajectory reproducibility depends on it.
enum class ChannelId { cavity, atom1_to0, atom1_to1, atom2_to0, atom2_to1 };
std::string_view channel_name(ChannelId id);

/// A jump channel: unscaled operator plus its rate. Jump weight is
/// rate * ||op psi||^2; the Lindblad operator is sqrt(rate) * op.
struct Channel {
    Operator op;
    double rate = 0.0;
    Matrix scaled() const { return std::sqrt(rate) * op.matrix; }
};

/// Everything a simulation needs, immutable after construction.
struct SystemModel {
    ModelParams params;
    BasisIndex basis;
    Operator hamiltonian;
    std::vector<Channel> channels;
};

SystemModel make_system(const ModelParams& params);

Operator build_hamiltonian(const ModelParams& params, const BasisIndex& basis);
std::vector<Channel> build_jump_operators(const ModelParams& params, const BasisIndex& basis);

/// i (H - H^dagger); positive semidefinite for a physical H_cond.
Matrix decay_operator(const Matrix& h);

/// Sum over channels of rate * C rho C^dagger.
Matrix apply_reset(std::span<const Channel> channels, const Matrix& rho);

/// Real orthogonal U with (collective amplitudes) = U (bare amplitudes).
Operator collective_transform(const BasisIndex& basis);

/// H_cond written directly in the collective basis.
Operator collective_hamiltonian(const ModelParams& params, const BasisIndex& basis);

/// Cavity channel plus the four exchange-adapted atomic resets R_01, R_02,
/// R_11, R_12 (rates Gamma0, Gamma0, Gamma1, Gamma1), collective basis.
std::vector<Channel> collective_resets(const ModelParams& params, const BasisIndex& basis);

/// Permutation swapping the two atoms, |j1 j2 n> -> |j2 j1 n>.
Matrix atom_swap(const BasisIndex& basis);

Vector ket(const BasisIndex& basis, int j1, int j2, int n);
/// |c, n> expressed in the bare product basis.
Vector collective_ket(const BasisIndex& basis, Collective c, int n);

enum class RegimeStatus { pass, warn, borderline };
std::string_view regime_status_name(RegimeStatus s);

struct RegimeCheck {
    std::string name;
    double ratio;
    RegimeStatus status;
};

struct RegimeThresholds {
    double min_delta_ratio = 10.0;     // delta / max(g, kappa, Gamma, Omega_L)
    double max_omega_m_ratio = 0.5;    // Omega_M / min(g, kappa, Gamma, Omega_L)
};

struct RegimeReport {
    std::vector<RegimeCheck> checks;
    bool all_pass() const;
};

RegimeReport validate_regime(const ModelParams& params, const RegimeThresholds& thresholds = {});

}  // namespace mqj
