#pragma once

#include "mqj/model.hpp"

#include <vector>

namespace mqj {

/// Adiabatically eliminated parameters.
struct EffectiveParams {
    double g_eff;      // -Omega_L g / (sqrt2 Delta)
    double delta_l;    // -Omega_L^2 / (4 Delta)
    double kappa_eff;  // 4 g_eff^2 / kappa
    double x;          // -Omega_L^2 / (4 Delta Omega_M)
    double cooperativity;  // g^2 / (kappa Gamma)
};

/// Throws NumericalError naming the undefined quantity (delta = 0,
/// omega_m = 0, kappa = 0, or kappa * Gamma = 0).
EffectiveParams derived_params(const ModelParams& params);

/// Index order of the effective basis.
enum class EffectiveState { g00 = 0, s01 = 1, g11 = 2, a01 = 3 };

struct EffectiveModel {
    Operator hamiltonian;           // 4x4 on {|00,0>, |s01,0>, |11,0>, |a01,0>}
    std::vector<Channel> channels;  // one cavity channel |00><s01| + |s01><11|, rate kappa_eff
};

EffectiveModel build_effective_model(const ModelParams& params);
/// Same model from the ladder drive and the eliminated quantities directly.
EffectiveModel build_effective_model(double omega_m, double delta_l, double kappa_eff);

/// Restriction to the light manifold {|00,0>, |s01,0>, |11,0>} where the
/// steady state is unique.
EffectiveModel light_manifold(const EffectiveModel& model);

/// Deviations of the fast amplitudes from their quasi-steady values,
/// each as |actual - predicted|. Input in the collective basis.
struct QuasiSteadyResidual {
    double alpha02_0;  // alpha_02,0 + (Omega_L / 2 Delta) alpha_01,0
    double alpha12_0;  // alpha_12,0
    double xi22_0;     // xi_22,0
    double sigma02_0;  // sigma_02,0 + (Omega_L / 2 Delta) sigma_01,0
    double sigma12_0;  // sigma_12,0 - (Omega_L / sqrt2 Delta) xi_11,0
    double xi00_1;     // xi_00,1 + (2i g_eff / kappa) sigma_01,0
    double sigma01_1;  // sigma_01,1 + (2i g_eff / kappa) xi_11,0
    double max() const;
};

QuasiSteadyResidual quasisteady_residual(const Vector& collective_state, const BasisIndex& basis,
                                         const ModelParams& params);

/// Eigenvector of H_cond (bare basis) with the largest overlap with |a01,0>,
/// normalized and phased so that <a01,0|v> is real positive.
struct DarkEigenstate {
    Vector state;
    Complex eigenvalue;
};
DarkEigenstate dark_eigenstate(const SystemModel& model);

struct SteadyPopulations {
    double p00;
    double ps01;
    double p11;
};

SteadyPopulations steady_populations(double x);

struct TimescaleSummary {
    double t_cav;
    double t_dark;
    double t_light;
    double ratio_dark_cav;
    double ratio_light_dark;
    double ratio_max;  // 32 g^2 / (3 kappa (2 Gamma0 + Gamma1))
};

TimescaleSummary timescales(const ModelParams& params);

}  // namespace mqj
