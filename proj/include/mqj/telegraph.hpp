#pragma once

#include "mqj/model.hpp"
#include "mqj/trajectory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mqj {

/// Set of jump channels visible to the detector.
class ChannelMask {
public:
    constexpr ChannelMask() = default;
    static constexpr ChannelMask cavity_only() { return ChannelMask(1u); }
    static constexpr ChannelMask all() { return ChannelMask(0x1fu); }
    constexpr bool contains(int channel) const { return channel >= 0 && channel < 32 && (bits_ >> channel) & 1u; }
    constexpr unsigned bits() const { return bits_; }
    constexpr explicit ChannelMask(unsigned bits) : bits_(bits) {}

private:
    unsigned bits_ = 1u;
};

/// Key of the thinning stream attached to a trajectory seed.
constexpr std::uint64_t detection_seed(std::uint64_t trajectory_seed) {
    return mix64(trajectory_seed ^ 0xd1b54a32d192ed03ULL);
}

struct DetectionStream {
    int trajectory_id = 0;
    double eta = 1.0;
    std::uint64_t seed = 0;
    ChannelMask mask;
    double horizon = 0.0;
    std::vector<double> clicks;
};

/// Keeps event k of the record iff its channel is masked and draw k of the
/// stream keyed by `seed` is below eta.
DetectionStream thin_detections(const TrajectoryRecord& record, double eta, std::uint64_t seed,
                                ChannelMask mask = ChannelMask::cavity_only(),
                                int trajectory_id = 0);

struct Bin {
    double start;
    long count;
};

/// Left-closed bins of width `bin_width` covering [0, horizon].
std::vector<Bin> bin_counts(const DetectionStream& stream, double bin_width);

enum class PeriodKind { light, dark };

struct Period {
    PeriodKind kind;
    double start;
    double end;
    double duration() const { return end - start; }
};

struct PeriodSegmentation {
    std::vector<Period> periods;
    double threshold = 0.0;
    double horizon = 0.0;
};

/// Inter-click gaps (including leading and trailing) longer than the
/// threshold become dark periods; the rest is light.
PeriodSegmentation segment_periods(const DetectionStream& stream, double gap_threshold);

struct Moments {
    long count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
};

Moments moments(std::span<const double> values);

struct PeriodStats {
    Moments light;
    Moments dark;
};

/// Statistics over interior periods (first and last of each segmentation
/// are censored). Throws InsufficientData if no interior period exists.
PeriodStats period_stats(std::span<const PeriodSegmentation> segmentations);

/// Spacings between consecutive clicks inside the same light period.
std::vector<double> light_click_spacings(const DetectionStream& stream,
                                         const PeriodSegmentation& segmentation);

/// Earliest tau such that no click lies in (tau - t_wait, tau] with the
/// window starting no earlier than 0; nullopt if tau would pass the horizon.
std::optional<double> first_quiet_window(std::span<const double> clicks, double t_wait,
                                         double horizon);

struct FidelityOptions {
    double horizon = 0.0;  // 1/g; <= 0 selects 200 T_dark
    ChannelMask mask = ChannelMask::cavity_only();
    unsigned workers = 0;
};

struct FidelitySample {
    bool success = false;
    double tau = 0.0;
    double fidelity = 0.0;
};

struct FidelityPoint {
    double eta = 0.0;
    double t_wait = 0.0;        // 1/g
    double t_over_tdark = 0.0;
    double fidelity = 0.0;
    double stderr_fidelity = 0.0;
    long n_samples = 0;
    long n_dropped = 0;
    double mean_prep_time = 0.0;  // 1/g
};

/// Population of |a01> summed over photon number.
double singlet_fidelity(const Vector& state, const BasisIndex& basis);

/// One trajectory of the wait-for-darkness protocol, starting in |00,0>.
FidelitySample fidelity_sample(const SystemModel& model, const Propagator& prop, double eta,
                               double t_wait, std::uint64_t seed, double horizon,
                               ChannelMask mask = ChannelMask::cavity_only());

/// Trajectory i uses derive_seed(master_seed, i). Throws InsufficientData
/// ("horizon too short") when more than half of the samples are dropped.
FidelityPoint fidelity_protocol(const SystemModel& model, double eta, double t_wait, int n_traj,
                                std::uint64_t master_seed, const FidelityOptions& options = {});

void write_bins_csv(std::ostream& out, std::span<const Bin> bins);
void write_fidelity_csv(std::ostream& out, std::span<const FidelityPoint> points);

}  // namespace mqj
