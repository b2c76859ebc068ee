#pragma once

#include "mqj/model.hpp"

#include <span>

namespace mqj {

/// d rho / dt = -i (H rho - rho H^dagger) + sum_c rate_c C_c rho C_c^dagger.
Matrix lindblad_rhs(const Matrix& rho, const Matrix& h, std::span<const Channel> channels);

/// Column-stacked Liouvillian L with vec(d rho/dt) = L vec(rho).
Matrix liouvillian(const Matrix& h, std::span<const Channel> channels);

struct EvolveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    double min_step = 1e-14;
};

struct EvolveStats {
    long accepted = 0;
    long rejected = 0;
    double max_hermiticity_drift = 0.0;  // largest |rho - rho^dagger| removed by symmetrization
};

/// Adaptive Dormand-Prince integration of the master equation to time t.
/// Throws NumericalError on step-size underflow.
Matrix evolve_density(const Matrix& rho0, double t, const Matrix& h,
                      std::span<const Channel> channels, const EvolveOptions& options = {},
                      EvolveStats* stats = nullptr);

/// exp(L t) vec(rho0); dense, meant for validation at small dimension.
Matrix evolve_density_exact(const Matrix& rho0, double t, const Matrix& h,
                            std::span<const Channel> channels);

/// Unique trace-1 Hermitian null vector of the Liouvillian. Throws
/// NumericalError("degenerate steady manifold ...") if the null space is
/// not one-dimensional.
Matrix steady_state(const Matrix& h, std::span<const Channel> channels);

struct DensityDiagnostics {
    double hermiticity;     // max |rho - rho^dagger|
    double trace_error;     // |tr rho - 1|
    double min_eigenvalue;  // of the Hermitian part
};

DensityDiagnostics diagnose(const Matrix& rho);

}  // namespace mqj
