#include "mqj/trajectory.hpp"

#include "mqj/parallel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace mqj {

Propagator::Propagator(const Matrix& hamiltonian, double max_condition)
    : h_(hamiltonian), decay_(decay_operator(hamiltonian)) {
    if (h_.rows() != h_.cols()) throw NumericalError("Propagator: Hamiltonian must be square");

    Eigen::ComplexEigenSolver<Matrix> solver(h_);
    if (solver.info() != Eigen::Success) {
        spectral_ = false;
        return;
    }
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();

    Eigen::JacobiSVD<Matrix> svd(vectors_);
    const auto& sv = svd.singularValues();
    condition_ = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                         : std::numeric_limits<double>::infinity();
    if (!(condition_ <= max_condition)) {
        spectral_ = false;
        return;
    }
    inverse_ = vectors_.partialPivLu().inverse();
    const Matrix rebuilt = vectors_ * values_.asDiagonal() * inverse_;
    reconstruction_error_ = max_abs(rebuilt - h_);
    spectral_ = reconstruction_error_ <= 1e-9 * max_abs(h_);
}

Vector Propagator::propagate_expm(const Vector& psi, double dt) const {
    const Matrix generator = Complex(0.0, -dt) * h_;
    return generator.exp() * psi;
}

Vector Propagator::propagate(const Vector& psi, double dt) const {
    if (dt == 0.0) return psi;
    if (!spectral_) return propagate_expm(psi, dt);
    const Vector phases = (Complex(0.0, -dt) * values_).array().exp().matrix();
    return vectors_ * phases.cwiseProduct(inverse_ * psi);
}

NoJumpEvolution::NoJumpEvolution(const Propagator& prop, Vector psi0)
    : prop_(&prop), psi0_(std::move(psi0)) {
    if (prop_->spectral_) coefficients_ = prop_->inverse_ * psi0_;
}

Vector NoJumpEvolution::at(double t) const {
    if (t == 0.0) return psi0_;
    if (!prop_->spectral_) return prop_->propagate_expm(psi0_, t);
    const Vector phases = (Complex(0.0, -t) * prop_->values_).array().exp().matrix();
    return prop_->vectors_ * phases.cwiseProduct(coefficients_);
}

double NoJumpEvolution::loss_rate() const {
    return std::max(0.0, psi0_.dot(prop_->decay_ * psi0_).real());
}

std::optional<double> sample_jump_time(const NoJumpEvolution& evolution, double r, double t_max) {
    if (!(r > 0.0 && r < 1.0)) throw NumericalError("sample_jump_time: r must lie in (0, 1)");
    if (!(t_max > 0.0)) return std::nullopt;

    const double rate = evolution.loss_rate();
    double lo = 0.0;
    double hi = rate > 0.0 ? std::min(t_max, 1.0 / rate) : t_max;
    // Exponential-stride bracketing on the nonincreasing survival function.
    while (evolution.survival(hi) > r) {
        if (hi >= t_max) return std::nullopt;
        lo = hi;
        hi = std::min(2.0 * hi, t_max);
    }
    for (int it = 0; it < 400 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (evolution.survival(mid) > r)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::optional<double> sample_jump_time(const Vector& state, const Propagator& prop, double r,
                                       double t_max) {
    return sample_jump_time(NoJumpEvolution(prop, state), r, t_max);
}

std::optional<int> select_channel(const Vector& state, std::span<const Channel> channels, double u) {
    std::vector<double> cumulative(channels.size());
    double total = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (channels[c].rate > 0.0)
            total += channels[c].rate * (channels[c].op.matrix * state).squaredNorm();
        cumulative[c] = total;
    }
    if (!(total > 0.0)) return std::nullopt;
    const double target = u * total;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (cumulative[c] > target) return static_cast<int>(c);
    }
    // u * total rounded up to total: last channel with weight.
    for (std::size_t c = channels.size(); c-- > 0;) {
        if (c == 0 || cumulative[c] > cumulative[c - 1]) return static_cast<int>(c);
    }
    return std::nullopt;
}

TrajectoryStepper::TrajectoryStepper(const SystemModel& model, const Propagator& prop,
                                     std::uint64_t seed, Vector initial)
    : model_(&model), prop_(&prop), rng_(seed) {
    if (initial.size() != model.basis.dimension())
        throw NumericalError("TrajectoryStepper: initial state has wrong dimension");
    settle(std::move(initial), 0.0);
}

void TrajectoryStepper::settle(Vector psi, double t) {
    const double norm2 = psi.squaredNorm();
    if (!(norm2 > 0.0) || !std::isfinite(norm2))
        throw NumericalError("trajectory state collapsed to zero norm");
    if (norm2 < 1e-12) ++rescales_;
    state_ = psi / std::sqrt(norm2);
    time_ = t;
    segment_.reset();
}

std::optional<double> TrajectoryStepper::next_jump(double horizon) {
    segment_.emplace(*prop_, state_);
    const double r = rng_.next();
    auto dt = sample_jump_time(*segment_, r, horizon - time_);
    if (!dt) {
        pending_ = horizon;
        return std::nullopt;
    }
    pending_ = time_ + *dt;
    return pending_;
}

Vector TrajectoryStepper::state_at(double t) const {
    if (!segment_) return state_;
    Vector psi = segment_->at(t - time_);
    return psi / psi.norm();
}

std::optional<JumpEvent> TrajectoryStepper::apply_jump() {
    if (!segment_) throw NumericalError("apply_jump called without a pending jump");
    const Vector before = segment_->at(pending_ - time_);
    const double u = rng_.next();
    const auto channel = select_channel(before, model_->channels, u);
    if (!channel) {
        settle(before, pending_);
        return std::nullopt;
    }
    settle(model_->channels[*channel].op.matrix * before, pending_);
    return JumpEvent{time_, *channel};
}

void TrajectoryStepper::advance_to(double t) {
    if (!segment_) segment_.emplace(*prop_, state_);
    settle(segment_->at(t - time_), t);
}

TrajectoryRecord run_trajectory(const SystemModel& model, const Propagator& prop, std::uint64_t seed,
                                double t_max, std::span<const double> snapshot_times,
                                const TrajectoryOptions& options) {
    if (!(t_max > 0.0)) throw NumericalError("run_trajectory: t_max must be positive");
    std::vector<double> snaps(snapshot_times.begin(), snapshot_times.end());
    std::sort(snaps.begin(), snaps.end());

    TrajectoryRecord record;
    record.seed = seed;
    record.initial_label = options.initial_label;
    record.horizon = t_max;
    record.demoted = !prop.spectral();

    TrajectoryStepper stepper(model, prop, seed,
                              options.initial ? *options.initial : ket(model.basis, 0, 0, 0));
    std::size_t next_snap = 0;
    while (next_snap < snaps.size() && snaps[next_snap] <= 0.0)
        record.snapshots.push_back({snaps[next_snap++], stepper.state()});

    while (stepper.time() < t_max) {
        const auto jump = stepper.next_jump(t_max);
        const double segment_end = jump ? *jump : t_max;
        while (next_snap < snaps.size() && snaps[next_snap] <= segment_end) {
            const double ts = snaps[next_snap++];
            record.snapshots.push_back({ts, stepper.state_at(std::min(ts, t_max))});
        }
        if (!jump) {
            stepper.advance_to(t_max);
            break;
        }
        if (auto event = stepper.apply_jump()) {
            if (!record.events.empty() && event->time <= record.events.back().time) {
                // Bisection resolves to 1e-9 relative; keep times strictly increasing.
                event->time = std::nextafter(record.events.back().time, t_max);
            }
            record.events.push_back(*event);
        }
    }
    while (next_snap < snaps.size()) record.snapshots.push_back({snaps[next_snap++], stepper.state()});
    record.rescales = stepper.rescales();
    return record;
}

TrajectoryRecord run_trajectory(const SystemModel& model, std::uint64_t seed, double t_max,
                                std::span<const double> snapshot_times,
                                const TrajectoryOptions& options) {
    const Propagator prop(model.hamiltonian.matrix);
    return run_trajectory(model, prop, seed, t_max, snapshot_times, options);
}

std::vector<TrajectoryRecord> run_ensemble(const SystemModel& model, int n_traj,
                                           std::uint64_t master_seed, double t_max,
                                           std::span<const double> snapshot_times, unsigned workers,
                                           const TrajectoryOptions& options) {
    if (n_traj < 1) throw ConfigError("n_traj must be >= 1");
    const Propagator prop(model.hamiltonian.matrix);
    std::vector<TrajectoryRecord> records(static_cast<std::size_t>(n_traj));
    parallel_for(records.size(), workers, [&](std::size_t i) {
        records[i] = run_trajectory(model, prop, derive_seed(master_seed, i), t_max, snapshot_times,
                                    options);
    });
    return records;
}

Matrix ensemble_density(std::span<const TrajectoryRecord> records, std::size_t index) {
    if (records.empty()) throw InsufficientData("ensemble_density: no records");
    const auto dim = records.front().snapshots.at(index).state.size();
    Matrix rho = Matrix::Zero(dim, dim);
    for (const auto& rec : records) {
        const Vector& psi = rec.snapshots.at(index).state;
        rho.noalias() += psi * psi.adjoint();
    }
    return rho / static_cast<double>(records.size());
}

void write_events_csv(std::ostream& out, std::span<const TrajectoryRecord> records) {
    out << "trajectory_id,time,channel\n";
    const auto old_precision = out.precision(15);
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (const auto& e : records[i].events) {
            out << i << ',' << e.time << ',' << channel_name(static_cast<ChannelId>(e.channel))
                << '\n';
        }
    }
    out.precision(old_precision);
}

}  // namespace mqj
