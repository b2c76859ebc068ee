#pragma once

#include "mqj/effective.hpp"
#include "mqj/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace mqj {

/// Column-stacked superoperator of rho -> sum_c rate_c C_c rho C_c^dagger.
Matrix reset_superoperator(std::span<const Channel> channels);

/// Channels conjugated by a basis change: C -> U C U^dagger.
std::vector<Channel> transform_channels(std::span<const Channel> channels, const Matrix& u,
                                        BasisKind target);

/// max |i(H - H^dagger) - sum_c rate_c C_c^dagger C_c|.
double decay_bookkeeping_error(const Matrix& h, std::span<const Channel> channels);

/// max |U H_bare U^dagger - H_collective|.
double hamiltonian_equivalence_error(const ModelParams& params, const BasisIndex& basis);

/// max elementwise difference of the bare (transformed) and collective
/// reset superoperators.
double reset_equivalence_error(const ModelParams& params, const BasisIndex& basis);

/// max |<a01,0| H_coll |sym>| over every exchange-symmetric basis state.
double antisymmetric_leakage(const ModelParams& params, const BasisIndex& basis);

/// max of |P H P - H| and the swap-conjugation commutator of each
/// two-atom jump superoperator at fixed final level.
double swap_symmetry_error(const SystemModel& model);

/// Relative mismatch between a 5-point finite-difference derivative of the
/// survival at t = 0 and the summed channel weights, maximized over
/// `samples` random states.
double norm_loss_identity_error(const SystemModel& model, int samples, std::uint64_t seed);

/// max |P_numeric - P_closed_form| for the light-manifold steady state.
double steady_population_error(double x, double omega_m, double kappa_eff);

struct CheckResult {
    std::string name;
    double value;
    double tolerance;
    bool passed;
};

/// Invariant suite run by the `validate` experiment.
std::vector<CheckResult> run_invariant_suite(const ModelParams& params);

}  // namespace mqj
