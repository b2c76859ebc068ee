#pragma once

#include "mqj/model.hpp"
#include "mqj/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mqj {

/*!
 * No-jump propagator exp(-i H_cond t).
 *
 * Built once from a spectral decomposition H = V diag(lambda) V^-1, so a
 * propagation costs O(d^2) for any t. If V is ill-conditioned or the
 * reconstruction misses H by more than 1e-9 max|H|, the propagator is
 * demoted to a scaled-and-squared matrix exponential per call.
 */
class Propagator {
public:
    explicit Propagator(const Matrix& hamiltonian, double max_condition = 1e8);

    bool spectral() const { return spectral_; }
    double condition_estimate() const { return condition_; }
    double reconstruction_error() const { return reconstruction_error_; }
    const Matrix& hamiltonian() const { return h_; }
    const Matrix& decay() const { return decay_; }

    /// Unnormalized exp(-i H dt) psi. Negative dt is allowed (backward evolution).
    Vector propagate(const Vector& psi, double dt) const;

    /// Always uses the matrix exponential, regardless of demotion.
    Vector propagate_expm(const Vector& psi, double dt) const;

    friend class NoJumpEvolution;

private:
    Matrix h_;
    Matrix decay_;
    Matrix vectors_;
    Matrix inverse_;
    Vector values_;
    double condition_ = 1.0;
    double reconstruction_error_ = 0.0;
    bool spectral_ = true;
};

/// No-jump evolution of a fixed starting state; precomputes V^-1 psi.
class NoJumpEvolution {
public:
    NoJumpEvolution(const Propagator& prop, Vector psi0);

    Vector at(double t) const;
    /// Squared norm ||exp(-iHt) psi0||^2, i.e. the no-jump probability.
    double survival(double t) const { return at(t).squaredNorm(); }
    /// -d/dt survival at t = 0: psi0^dagger i(H - H^dagger) psi0.
    double loss_rate() const;

private:
    const Propagator* prop_;
    Vector psi0_;
    Vector coefficients_;
};

struct JumpEvent {
    double time;
    int channel;
    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

struct Snapshot {
    double time;
    Vector state;  // normalized
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::string initial_label;
    double horizon = 0.0;
    std::vector<JumpEvent> events;
    std::vector<Snapshot> snapshots;
    int rescales = 0;  // segments whose squared norm fell below 1e-12 before renormalization
    bool demoted = false;
};

/// Jump time solving survival(t) = r before t_max, or nullopt if none.
std::optional<double> sample_jump_time(const NoJumpEvolution& evolution, double r, double t_max);
std::optional<double> sample_jump_time(const Vector& state, const Propagator& prop, double r,
                                       double t_max);

/// Channel picked by cumulative weights rate_c ||C_c psi||^2 in channel order;
/// nullopt when every weight vanishes.
std::optional<int> select_channel(const Vector& state, std::span<const Channel> channels, double u);

/*!
 * Event-driven single trajectory.
 *
 * Draw order per jump is fixed: one uniform for the jump time (next_jump),
 * one for the channel (apply_jump). Reading intermediate states with
 * state_at() consumes nothing.
 */
class TrajectoryStepper {
public:
    TrajectoryStepper(const SystemModel& model, const Propagator& prop, std::uint64_t seed,
                      Vector initial);

    double time() const { return time_; }
    const Vector& state() const { return state_; }
    int rescales() const { return rescales_; }

    /// Absolute time of the next jump if before horizon.
    std::optional<double> next_jump(double horizon);
    /// Normalized state at absolute time t within the current no-jump segment.
    Vector state_at(double t) const;
    /// Applies the pending jump; nullopt if no channel carries weight.
    std::optional<JumpEvent> apply_jump();
    /// Moves to absolute time t without a jump.
    void advance_to(double t);

private:
    void settle(Vector psi, double t);

    const SystemModel* model_;
    const Propagator* prop_;
    CounterRng rng_;
    Vector state_;
    double time_ = 0.0;
    std::optional<NoJumpEvolution> segment_;
    double pending_ = 0.0;
    int rescales_ = 0;
};

struct TrajectoryOptions {
    std::optional<Vector> initial;  // default |00,0>
    std::string initial_label = "00,0";
};

TrajectoryRecord run_trajectory(const SystemModel& model, const Propagator& prop, std::uint64_t seed,
                                double t_max, std::span<const double> snapshot_times = {},
                                const TrajectoryOptions& options = {});
TrajectoryRecord run_trajectory(const SystemModel& model, std::uint64_t seed, double t_max,
                                std::span<const double> snapshot_times = {},
                                const TrajectoryOptions& options = {});

/// Trajectory i is run_trajectory with derive_seed(master_seed, i).
std::vector<TrajectoryRecord> run_ensemble(const SystemModel& model, int n_traj,
                                           std::uint64_t master_seed, double t_max,
                                           std::span<const double> snapshot_times = {},
                                           unsigned workers = 0,
                                           const TrajectoryOptions& options = {});

/// Ensemble mean of |psi><psi| over snapshot `index` of every record.
Matrix ensemble_density(std::span<const TrajectoryRecord> records, std::size_t index);

/// CSV: trajectory_id,time,channel with a header row.
void write_events_csv(std::ostream& out, std::span<const TrajectoryRecord> records);

}  // namespace mqj
