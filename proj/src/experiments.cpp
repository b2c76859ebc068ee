#include "mqj/experiments.hpp"

#include "mqj/effective.hpp"
#include "mqj/telegraph.hpp"
#include "mqj/trajectory.hpp"
#include "mqj/validation.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace mqj {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::ofstream open_artifact(const RunConfig& config, const std::string& name) {
    std::ofstream f(fs::path(config.out) / name);
    if (!f) throw ConfigError("cannot write '" + (fs::path(config.out) / name).string() + "'");
    return f;
}

void write_json(const RunConfig& config, const std::string& name, const json& j) {
    auto f = open_artifact(config, name);
    f << std::setw(2) << j << '\n';
}

json moments_json(const Moments& m, double t_dark) {
    return {{"count", m.count},
            {"mean", m.mean},
            {"stderr", m.stderr_mean},
            {"variance", m.variance},
            {"mean_over_Tdark", m.mean / t_dark}};
}

int run_analytic(const RunConfig& config, std::ostream& out) {
    const auto& p = config.model;
    const auto e = derived_params(p);
    const auto pop = steady_populations(e.x);
    const auto ts = timescales(p);

    const std::vector<std::pair<std::string, double>> rows = {
        {"g_eff", e.g_eff},
        {"delta_l", e.delta_l},
        {"kappa_eff", e.kappa_eff},
        {"x", e.x},
        {"C", e.cooperativity},
        {"P00", pop.p00},
        {"Ps01", pop.ps01},
        {"P11", pop.p11},
        {"T_cav", ts.t_cav},
        {"T_dark", ts.t_dark},
        {"T_light", ts.t_light},
        {"T_cav_over_Tdark", ts.t_cav / ts.t_dark},
        {"T_light_over_Tdark", ts.t_light / ts.t_dark},
        {"ratio_dark_cav", ts.ratio_dark_cav},
        {"ratio_light_dark", ts.ratio_light_dark},
        {"ratio_max", ts.ratio_max},
    };

    json j = json::object();
    std::ostringstream table;
    table << std::setprecision(10);
    for (const auto& [name, value] : rows) {
        table << std::left << std::setw(20) << name << value << '\n';
        j[name] = value;
    }
    out << table.str() << '\n' << std::setw(2) << j << '\n';
    auto f = open_artifact(config, "analytic.txt");
    f << table.str();
    write_json(config, "analytic.json", j);
    return kExitOk;
}

int run_validate(const RunConfig& config, std::ostream& out) {
    const auto checks = run_invariant_suite(config.model);
    const auto regime = validate_regime(config.model);
    json j;
    bool ok = true;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
            << "  tol=" << c.tolerance << '\n';
        j["checks"].push_back(
            {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
        ok = ok && c.passed;
    }
    for (const auto& r : regime.checks) {
        out << "REGIME " << regime_status_name(r.status) << ' ' << r.name << "  ratio=" << r.ratio
            << '\n';
        j["regime"].push_back(
            {{"condition", r.name}, {"ratio", r.ratio}, {"status", regime_status_name(r.status)}});
    }
    j["all_passed"] = ok;
    write_json(config, "validate.json", j);
    return ok ? kExitOk : kExitNumerical;
}

int run_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const auto model = make_system(config.model);
    const auto ts = timescales(config.model);
    const double horizon = config.horizon_tdark * ts.t_dark;
    const auto records = run_ensemble(model, config.n_traj, config.seed, horizon, {}, config.workers);

    auto csv = open_artifact(config, "events.csv");
    write_events_csv(csv, records);

    json j;
    j["n_traj"] = config.n_traj;
    j["seed"] = config.seed;
    j["horizon"] = horizon;
    j["horizon_over_Tdark"] = config.horizon_tdark;
    j["T_dark"] = ts.t_dark;
    std::size_t total = 0;
    for (const auto& r : records) {
        j["events_per_trajectory"].push_back(r.events.size());
        total += r.events.size();
        if (r.demoted) err << "warning: propagator demoted to matrix exponential\n";
    }
    j["total_events"] = total;
    write_json(config, "summary.json", j);
    out << "wrote " << total << " events from " << config.n_traj << " trajectories to "
        << (fs::path(config.out) / "events.csv").string() << '\n';
    return kExitOk;
}

int run_telegraph(const RunConfig& config, std::ostream& out) {
    const auto model = make_system(config.model);
    const auto ts = timescales(config.model);
    const double eta = config.eta.front();
    const double horizon = config.horizon_tdark * ts.t_dark;
    const double threshold = config.gap_factor * ts.t_cav / eta;
    const ChannelMask mask(config.channels);

    const auto records = run_ensemble(model, config.n_traj, config.seed, horizon, {}, config.workers);
    std::vector<PeriodSegmentation> segs;
    std::vector<double> spacings;
    std::vector<Bin> first_bins;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto stream =
            thin_detections(records[i], eta, detection_seed(records[i].seed), mask, static_cast<int>(i));
        if (i == 0) first_bins = bin_counts(stream, config.bin_tdark * ts.t_dark);
        segs.push_back(segment_periods(stream, threshold));
        const auto s = light_click_spacings(stream, segs.back());
        spacings.insert(spacings.end(), s.begin(), s.end());
    }
    auto csv = open_artifact(config, "telegraph.csv");
    write_bins_csv(csv, first_bins);

    json j;
    j["eta"] = eta;
    j["gap_threshold"] = threshold;
    j["bin_width"] = config.bin_tdark * ts.t_dark;
    j["analytic"] = {{"T_cav", ts.t_cav}, {"T_dark", ts.t_dark}, {"T_light", ts.t_light}};
    const auto spacing = moments(spacings);
    j["light_click_spacing"] = moments_json(spacing, ts.t_dark);
    int status = kExitOk;
    try {
        const auto stats = period_stats(segs);
        j["light"] = moments_json(stats.light, ts.t_dark);
        j["dark"] = moments_json(stats.dark, ts.t_dark);
        j["ratio_dark_spacing"] = stats.dark.mean / spacing.mean;
        out << std::setprecision(6) << "interior dark periods: " << stats.dark.count
            << "  mean " << stats.dark.mean << " (" << stats.dark.mean / ts.t_dark << " T_dark)\n"
            << "interior light periods: " << stats.light.count << "  mean " << stats.light.mean
            << " (" << stats.light.mean / ts.t_dark << " T_dark)\n"
            << "mean light click spacing: " << spacing.mean << '\n';
    } catch (const InsufficientData& e) {
        j["error"] = e.what();
        status = kExitInsufficient;
    }
    write_json(config, "periods.json", j);
    return status;
}

int run_fidelity(const RunConfig& config, std::ostream& out) {
    const auto model = make_system(config.model);
    const auto ts = timescales(config.model);
    FidelityOptions options;
    options.horizon = config.horizon_tdark * ts.t_dark;
    options.mask = ChannelMask(config.channels);
    options.workers = config.workers;

    std::vector<FidelityPoint> points;
    for (double eta : config.eta) {
        for (double t : config.t_wait) {
            points.push_back(
                fidelity_protocol(model, eta, t * ts.t_dark, config.n_traj, config.seed, options));
            const auto& p = points.back();
            out << std::setprecision(6) << "eta=" << p.eta << " t=" << p.t_over_tdark
                << " T_dark  F=" << p.fidelity << " +- " << p.stderr_fidelity
                << "  (n=" << p.n_samples << ", dropped " << p.n_dropped << ")\n";
        }
    }
    auto csv = open_artifact(config, "fidelity.csv");
    write_fidelity_csv(csv, points);
    return kExitOk;
}

}  // namespace

int run_experiment(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate_config(config);
        fs::create_directories(config.out);
        {
            auto f = open_artifact(config, "config.ini");
            f << serialize_config(config);
        }
        switch (*config.kind) {
            case ExperimentKind::analytic: return run_analytic(config, out);
            case ExperimentKind::validate: return run_validate(config, out);
            case ExperimentKind::simulate: return run_simulate(config, out, err);
            case ExperimentKind::telegraph: return run_telegraph(config, out);
            case ExperimentKind::fidelity: return run_fidelity(config, out);
        }
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InsufficientData& e) {
        err << "insufficient statistics: " << e.what() << '\n';
        return kExitInsufficient;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace mqj
