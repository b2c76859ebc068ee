#include "mqj/telegraph.hpp"

#include "mqj/effective.hpp"
#include "mqj/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace mqj {

DetectionStream thin_detections(const TrajectoryRecord& record, double eta, std::uint64_t seed,
                                ChannelMask mask, int trajectory_id) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
    DetectionStream stream;
    stream.trajectory_id = trajectory_id;
    stream.eta = eta;
    stream.seed = seed;
    stream.mask = mask;
    stream.horizon = record.horizon;
    const CounterRng rng(seed);
    for (std::size_t k = 0; k < record.events.size(); ++k) {
        const auto& e = record.events[k];
        if (mask.contains(e.channel) && rng.at(k) < eta) stream.clicks.push_back(e.time);
    }
    return stream;
}

std::vector<Bin> bin_counts(const DetectionStream& stream, double bin_width) {
    if (!(bin_width > 0.0)) throw ConfigError("bin_width must be positive");
    const auto n_bins =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(stream.horizon / bin_width)));
    std::vector<Bin> bins(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) bins[i] = {static_cast<double>(i) * bin_width, 0};
    for (double t : stream.clicks) {
        const auto k = std::min(n_bins - 1, static_cast<std::size_t>(std::max(0.0, t) / bin_width));
        ++bins[k].count;
    }
    return bins;
}

PeriodSegmentation segment_periods(const DetectionStream& stream, double gap_threshold) {
    if (!(gap_threshold > 0.0)) throw ConfigError("gap_threshold must be positive");
    PeriodSegmentation seg;
    seg.threshold = gap_threshold;
    seg.horizon = stream.horizon;
    const auto& clicks = stream.clicks;
    if (clicks.empty()) {
        seg.periods.push_back({PeriodKind::dark, 0.0, stream.horizon});
        return seg;
    }

    auto push = [&](PeriodKind kind, double a, double b) {
        if (kind == PeriodKind::light && b <= a) return;  // isolated click between dark gaps
        if (!seg.periods.empty() && seg.periods.back().kind == kind)
            seg.periods.back().end = b;
        else
            seg.periods.push_back({kind, a, b});
    };

    double cursor = 0.0;
    double prev = 0.0;
    auto gap = [&](double a, double b) {
        if (b - a > gap_threshold) {
            push(PeriodKind::light, cursor, a);
            push(PeriodKind::dark, a, b);
            cursor = b;
        }
    };
    for (double t : clicks) {
        gap(prev, t);
        prev = t;
    }
    gap(prev, stream.horizon);
    push(PeriodKind::light, cursor, stream.horizon);
    return seg;
}

Moments moments(std::span<const double> values) {
    Moments m;
    m.count = static_cast<long>(values.size());
    if (values.empty()) return m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.variance = ss / static_cast<double>(values.size() - 1);
        m.stderr_mean = std::sqrt(m.variance / static_cast<double>(values.size()));
    }
    return m;
}

PeriodStats period_stats(std::span<const PeriodSegmentation> segmentations) {
    std::vector<double> light;
    std::vector<double> dark;
    for (const auto& seg : segmentations) {
        for (std::size_t i = 1; i + 1 < seg.periods.size(); ++i) {
            const auto& p = seg.periods[i];
            (p.kind == PeriodKind::light ? light : dark).push_back(p.duration());
        }
    }
    if (light.empty() && dark.empty()) throw InsufficientData("insufficient data: no interior periods");
    return {moments(light), moments(dark)};
}

std::vector<double> light_click_spacings(const DetectionStream& stream,
                                         const PeriodSegmentation& segmentation) {
    std::vector<double> spacings;
    const auto& clicks = stream.clicks;
    std::size_t k = 0;
    for (const auto& p : segmentation.periods) {
        if (p.kind != PeriodKind::light) continue;
        while (k < clicks.size() && clicks[k] < p.start) ++k;
        for (std::size_t j = k; j + 1 < clicks.size() && clicks[j + 1] <= p.end; ++j)
            spacings.push_back(clicks[j + 1] - clicks[j]);
    }
    return spacings;
}

std::optional<double> first_quiet_window(std::span<const double> clicks, double t_wait,
                                         double horizon) {
    double last = 0.0;
    for (double t : clicks) {
        if (last + t_wait <= t) break;
        last = t;
    }
    const double tau = last + t_wait;
    if (tau > horizon) return std::nullopt;
    return tau;
}

double singlet_fidelity(const Vector& state, const BasisIndex& basis) {
    const double r = 1.0 / std::sqrt(2.0);
    double f = 0.0;
    for (int n = 0; n < basis.fock_size(); ++n) {
        const Complex a = r * (state(basis.index(0, 1, n)) - state(basis.index(1, 0, n)));
        f += std::norm(a);
    }
    return f / state.squaredNorm();
}

FidelitySample fidelity_sample(const SystemModel& model, const Propagator& prop, double eta,
                               double t_wait, std::uint64_t seed, double horizon, ChannelMask mask) {
    TrajectoryStepper stepper(model, prop, seed, ket(model.basis, 0, 0, 0));
    const CounterRng thinning(detection_seed(seed));
    std::uint64_t event_index = 0;
    double last_click = 0.0;
    for (;;) {
        const double tau = last_click + t_wait;
        if (tau > horizon) return {};
        const auto jump = stepper.next_jump(horizon);
        const double segment_end = jump ? *jump : horizon;
        if (tau <= segment_end) {
            return {true, tau, singlet_fidelity(stepper.state_at(tau), model.basis)};
        }
        if (!jump) return {};
        if (const auto event = stepper.apply_jump()) {
            if (mask.contains(event->channel) && thinning.at(event_index) < eta)
                last_click = event->time;
            ++event_index;
        }
    }
}

FidelityPoint fidelity_protocol(const SystemModel& model, double eta, double t_wait, int n_traj,
                                std::uint64_t master_seed, const FidelityOptions& options) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
    if (!(t_wait >= 0.0)) throw ConfigError("t_wait must be >= 0");
    if (n_traj < 1) throw ConfigError("n_traj must be >= 1");

    const auto ts = timescales(model.params);
    const double horizon = options.horizon > 0.0 ? options.horizon : 200.0 * ts.t_dark;
    const Propagator prop(model.hamiltonian.matrix);

    std::vector<FidelitySample> samples(static_cast<std::size_t>(n_traj));
    parallel_for(samples.size(), options.workers, [&](std::size_t i) {
        samples[i] = fidelity_sample(model, prop, eta, t_wait, derive_seed(master_seed, i), horizon,
                                     options.mask);
    });

    std::vector<double> fidelities;
    double tau_sum = 0.0;
    for (const auto& s : samples) {
        if (!s.success) continue;
        fidelities.push_back(s.fidelity);
        tau_sum += s.tau;
    }
    FidelityPoint point;
    point.eta = eta;
    point.t_wait = t_wait;
    point.t_over_tdark = t_wait / ts.t_dark;
    point.n_samples = static_cast<long>(fidelities.size());
    point.n_dropped = n_traj - point.n_samples;
    if (2 * point.n_dropped > n_traj)
        throw InsufficientData("horizon too short: " + std::to_string(point.n_dropped) + " of " +
                               std::to_string(n_traj) + " trajectories never saw a quiet window");
    const auto m = moments(fidelities);
    point.fidelity = m.mean;
    point.stderr_fidelity = m.stderr_mean;
    point.mean_prep_time = tau_sum / static_cast<double>(point.n_samples);
    return point;
}

void write_bins_csv(std::ostream& out, std::span<const Bin> bins) {
    const auto old = out.precision(15);
    out << "bin_start,count\n";
    for (const auto& b : bins) out << b.start << ',' << b.count << '\n';
    out.precision(old);
}

void write_fidelity_csv(std::ostream& out, std::span<const FidelityPoint> points) {
    const auto old = out.precision(15);
    out << "eta,t_over_Tdark,F,stderr,n_samples,mean_prep_time\n";
    for (const auto& p : points) {
        out << p.eta << ',' << p.t_over_tdark << ',' << p.fidelity << ',' << p.stderr_fidelity << ','
            << p.n_samples << ',' << p.mean_prep_time << '\n';
    }
    out.precision(old);
}

}  // namespace mqj
