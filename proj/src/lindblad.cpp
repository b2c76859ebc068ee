#include "mqj/lindblad.hpp"

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace mqj {

namespace odeint = boost::numeric::odeint;

Matrix lindblad_rhs(const Matrix& rho, const Matrix& h, std::span<const Channel> channels) {
    if (rho.rows() != h.rows() || rho.cols() != h.cols())
        throw NumericalError("lindblad_rhs: dimension mismatch");
    Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h.adjoint());
    out += apply_reset(channels, rho);
    return out;
}

Matrix liouvillian(const Matrix& h, std::span<const Channel> channels) {
    const auto d = h.rows();
    const Matrix id = Matrix::Identity(d, d);
    // vec(A X B) = (B^T kron A) vec(X)
    Matrix l = Complex(0.0, -1.0) * (Eigen::kroneckerProduct(id, h).eval() -
                                     Eigen::kroneckerProduct(h.conjugate(), id).eval());
    for (const auto& c : channels) {
        if (c.rate == 0.0) continue;
        l += c.rate * Eigen::kroneckerProduct(c.op.matrix.conjugate(), c.op.matrix).eval();
    }
    return l;
}

Matrix evolve_density(const Matrix& rho0, double t, const Matrix& h,
                      std::span<const Channel> channels, const EvolveOptions& options,
                      EvolveStats* stats) {
    if (!(t >= 0.0)) throw NumericalError("evolve_density: t must be >= 0");
    EvolveStats local;
    if (t == 0.0) {
        if (stats) *stats = local;
        return rho0;
    }

    using State = std::vector<Complex>;
    const auto d = rho0.rows();
    auto system = [&](const State& x, State& dxdt, double /*t*/) {
        const Eigen::Map<const Matrix> rho(x.data(), d, d);
        Eigen::Map<Matrix> out(dxdt.data(), d, d);
        out = lindblad_rhs(rho, h, channels);
    };

    State x(rho0.data(), rho0.data() + rho0.size());
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
    double now = 0.0;
    double dt = std::min(options.initial_step, t);
    while (now < t) {
        dt = std::min(dt, t - now);
        if (dt < options.min_step) {
            std::ostringstream msg;
            msg << "evolve_density: step size underflow (dt = " << dt << " at t = " << now << ")";
            throw NumericalError(msg.str());
        }
        if (stepper.try_step(system, x, now, dt) == odeint::success) {
            ++local.accepted;
            Eigen::Map<Matrix> rho(x.data(), d, d);
            const Matrix herm = 0.5 * (rho + rho.adjoint());
            local.max_hermiticity_drift = std::max(local.max_hermiticity_drift, max_abs(rho - herm));
            rho = herm;
        } else {
            ++local.rejected;
        }
    }
    if (stats) *stats = local;
    return Eigen::Map<const Matrix>(x.data(), d, d);
}

Matrix evolve_density_exact(const Matrix& rho0, double t, const Matrix& h,
                            std::span<const Channel> channels) {
    const auto d = rho0.rows();
    const Matrix prop = (t * liouvillian(h, channels)).exp();
    const Vector v = prop * Eigen::Map<const Vector>(rho0.data(), d * d);
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix steady_state(const Matrix& h, std::span<const Channel> channels) {
    const auto d = h.rows();
    const Matrix l = liouvillian(h, channels);
    Eigen::BDCSVD<Matrix> svd(l, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = static_cast<double>(l.rows()) * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, sv(0));
    Eigen::Index null_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol) ++null_dim;
    if (null_dim != 1) {
        std::ostringstream msg;
        msg << "degenerate steady manifold: null space dimension " << null_dim;
        throw NumericalError(msg.str());
    }
    const Vector v = svd.matrixV().col(sv.size() - 1);
    Matrix rho = Eigen::Map<const Matrix>(v.data(), d, d);
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

DensityDiagnostics diagnose(const Matrix& rho) {
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return {max_abs(rho - rho.adjoint()), std::abs(rho.trace() - 1.0),
            solver.eigenvalues().minCoeff()};
}

}  // namespace mqj
