// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of failures.

#include "mqj/effective.hpp"
#include "mqj/lindblad.hpp"
#include "mqj/telegraph.hpp"
#include "mqj/trajectory.hpp"
#include "mqj/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace mqj;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail, double seconds) {
    std::printf("[%s] %d %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool six_digits(double value, double expected) {
    return std::abs(value - expected) <= 5e-7 * std::abs(expected);
}

ModelParams params_with_nmax(int n_max) {
    ModelParams p;
    p.n_max = n_max;
    return p;
}

// Criterion 3 ------------------------------------------------------------
constexpr int kConsistencyTraj = 2000;
constexpr double kConsistencyTime = 50.0;
constexpr std::uint64_t kSeed = 20240601;

struct ConsistencyResult {
    double trace_distance;
    Matrix ensemble;
};

ConsistencyResult consistency(int n_max) {
    const auto model = make_system(params_with_nmax(n_max));
    const double t[] = {kConsistencyTime};
    const auto records = run_ensemble(model, kConsistencyTraj, kSeed, kConsistencyTime, t);
    Matrix ens = ensemble_density(records, 0);
    const Vector psi0 = ket(model.basis, 0, 0, 0);
    const Matrix rho = evolve_density(psi0 * psi0.adjoint(), kConsistencyTime,
                                      model.hamiltonian.matrix, model.channels);
    return {trace_distance(ens, rho), std::move(ens)};
}

// Criterion 4 ------------------------------------------------------------
constexpr int kTelegraphTraj = 40;
constexpr double kTelegraphHorizonTdark = 60.0;
constexpr double kGapFactor = 10.0;

struct TelegraphResult {
    PeriodStats stats;
    Moments spacing;
    double threshold;
};

TelegraphResult telegraph(int n_max) {
    const auto p = params_with_nmax(n_max);
    const auto model = make_system(p);
    const auto ts = timescales(p);
    const double threshold = kGapFactor * ts.t_cav;
    const auto records =
        run_ensemble(model, kTelegraphTraj, kSeed + 1, kTelegraphHorizonTdark * ts.t_dark);
    std::vector<PeriodSegmentation> segs;
    std::vector<double> spacings;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto stream = thin_detections(records[i], 1.0, detection_seed(records[i].seed),
                                            ChannelMask::cavity_only(), static_cast<int>(i));
        segs.push_back(segment_periods(stream, threshold));
        const auto s = light_click_spacings(stream, segs.back());
        spacings.insert(spacings.end(), s.begin(), s.end());
    }
    return {period_stats(segs), moments(spacings), threshold};
}

// Criterion 5 ------------------------------------------------------------
constexpr int kFidelityTraj = 2000;

struct FidelityCase {
    double eta;
    double t_over_tdark;
    double bound;
    bool strict_two_sigma;  // true: F - 2 se > bound; false: F >= bound
};

const FidelityCase kFidelityCases[] = {
    {0.2, 0.7, 0.90, true},
    {0.5, 0.5, 0.95, true},
    {1.0, 1.0, 0.99, false},
};

std::vector<FidelityPoint> fidelities(int n_max) {
    const auto p = params_with_nmax(n_max);
    const auto model = make_system(p);
    const auto ts = timescales(p);
    std::vector<FidelityPoint> out;
    for (const auto& c : kFidelityCases)
        out.push_back(fidelity_protocol(model, c.eta, c.t_over_tdark * ts.t_dark, kFidelityTraj,
                                        kSeed + 2));
    return out;
}

bool reproducible_across_workers() {
    const auto model = make_system(ModelParams{});
    const double snaps[] = {10.0, 5000.0};
    const auto a = run_ensemble(model, 12, 99, 2e5, snaps, 1);
    const auto b = run_ensemble(model, 12, 99, 2e5, snaps, 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].events != b[i].events) return false;
        for (std::size_t k = 0; k < a[i].snapshots.size(); ++k)
            if (a[i].snapshots[k].state != b[i].snapshots[k].state) return false;
    }
    const auto ts = timescales(ModelParams{});
    FidelityOptions o1, o3;
    o1.workers = 1;
    o3.workers = 3;
    const auto f1 = fidelity_protocol(model, 0.5, 0.3 * ts.t_dark, 24, 5, o1);
    const auto f3 = fidelity_protocol(model, 0.5, 0.3 * ts.t_dark, 24, 5, o3);
    return f1.fidelity == f3.fidelity && f1.mean_prep_time == f3.mean_prep_time;
}

}  // namespace

int main() {
    const ModelParams p;
    const auto ts = timescales(p);

    // 1. Analytic values, evaluated by hand at g=1, kappa=1, Gamma=0.1,
    //    Omega_L=1, Omega_M=0.1, Delta=50.
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto e = derived_params(p);
        const auto pop = steady_populations(e.x);
        struct Row {
            const char* name;
            double value;
            double expected;
        };
        const Row rows[] = {
            {"C", e.cooperativity, 10.0},
            {"x", e.x, -0.05},
            {"kappa_eff", e.kappa_eff, 8e-4},
            {"T_cav", ts.t_cav, 3.01 * 2500.0 / 4.0},
            {"T_dark", ts.t_dark, 20000.0 / 0.15},
            {"T_light", ts.t_light, 3.0401 / 0.151 * 20000.0},
            {"dark/cav", ts.ratio_dark_cav, (20000.0 / 0.15) / 1881.25},
            {"light/dark", ts.ratio_light_dark, 3.0401 * 0.15 / 0.151},
            {"P00", pop.p00, 1.0201 / 3.0401},
            {"Ps01", pop.ps01, 1.02 / 3.0401},
            {"P11", pop.p11, 1.0 / 3.0401},
        };
        bool ok = true;
        std::ostringstream bad;
        for (const auto& r : rows)
            if (!six_digits(r.value, r.expected)) {
                ok = false;
                bad << ' ' << r.name << '=' << r.value;
            }
        std::ostringstream d;
        d << "T_cav=" << ts.t_cav << " T_dark=" << ts.t_dark << " T_light=" << ts.t_light
          << " ratios " << ts.ratio_dark_cav << ", " << ts.ratio_light_dark << bad.str();
        report(1, ok, "analytic oracle exactness", d.str(), since(t0));
    }

    // 2. Bare vs collective generators.
    {
        const auto t0 = std::chrono::steady_clock::now();
        const BasisIndex basis(p.n_max);
        const double h_err = hamiltonian_equivalence_error(p, basis);
        const double r_err = reset_equivalence_error(p, basis);
        std::ostringstream d;
        d << "max|U H U^+ - H_coll|=" << h_err << " max|reset diff|=" << r_err << " (tol 1e-12)";
        report(2, h_err < 1e-12 && r_err < 1e-12, "structural equivalence", d.str(), since(t0));
    }

    // 3. Trajectories vs master equation.
    const auto t3 = std::chrono::steady_clock::now();
    const auto c2 = consistency(2);
    {
        std::ostringstream d;
        d << kConsistencyTraj << " trajectories, t=50: trace distance " << c2.trace_distance
          << " (tol 0.02)";
        report(3, c2.trace_distance < 0.02, "trajectory/master-equation consistency", d.str(),
               since(t3));
    }

    // 4. Telegraph statistics.
    const auto t4 = std::chrono::steady_clock::now();
    std::optional<TelegraphResult> tg2;
    try {
        tg2 = telegraph(2);
        const auto& s = tg2->stats;
        const double dark_rel = s.dark.mean / ts.t_dark - 1.0;
        const double light_rel = s.light.mean / ts.t_light - 1.0;
        const double ratio = s.dark.mean / tg2->spacing.mean;
        const bool ok = s.dark.count >= 200 && s.light.count >= 200 && std::abs(dark_rel) < 0.15 &&
                        std::abs(light_rel) < 0.25 && ratio >= 55.0 && ratio <= 90.0;
        std::ostringstream d;
        d.precision(4);
        d << s.dark.count << " dark / " << s.light.count << " light periods; dark "
          << s.dark.mean / ts.t_dark << " T_dark (" << 100 * dark_rel << "%, tol 15%; minus gap "
          << (s.dark.mean - tg2->threshold) / ts.t_dark << "), light " << s.light.mean / ts.t_light
          << " T_light (" << 100 * light_rel << "%, tol 25%), dark/spacing " << ratio
          << " (in [55,90])";
        report(4, ok, "telegraph statistics", d.str(), since(t4));
    } catch (const InsufficientData& e) {
        report(4, false, "telegraph statistics", e.what(), since(t4));
    }

    // 5. Fidelity of the wait-for-darkness protocol.
    const auto t5 = std::chrono::steady_clock::now();
    std::vector<FidelityPoint> f2;
    try {
        f2 = fidelities(2);
        bool ok = true;
        std::ostringstream d;
        d.precision(4);
        for (std::size_t i = 0; i < f2.size(); ++i) {
            const auto& c = kFidelityCases[i];
            const auto& f = f2[i];
            const bool pass = f.n_samples - f.n_dropped >= 500 &&
                              (c.strict_two_sigma ? f.fidelity - 2.0 * f.stderr_fidelity > c.bound
                                                  : f.fidelity >= c.bound);
            ok = ok && pass;
            d << (i ? "; " : "") << "eta=" << c.eta << " t=" << c.t_over_tdark << " T_dark: F="
              << f.fidelity << "+-" << f.stderr_fidelity << (c.strict_two_sigma ? " (F-2se>" : " (F>=")
              << c.bound << (pass ? ")" : " violated)");
        }
        report(5, ok, "fidelity claims", d.str(), since(t5));
    } catch (const std::exception& e) {
        report(5, false, "fidelity claims", e.what(), since(t5));
    }

    // 6. Property suites, truncation insensitivity, reproducibility.
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::ostringstream d;
        d.precision(4);
        bool ok = true;
        for (const auto& c : run_invariant_suite(p))
            if (!c.passed) {
                ok = false;
                d << "invariant failed: " << c.name << " = " << c.value << "; ";
            }

        const auto c3 = consistency(3);
        const double d3 = std::abs(c3.trace_distance - c2.trace_distance);
        ok = ok && d3 < 0.02 && c3.trace_distance < 0.02;
        d << "n_max 3: |d trace distance|=" << d3;
        try {
            const auto tg3 = telegraph(3);
            if (tg2) {
                const double dd = std::abs(tg3.stats.dark.mean - tg2->stats.dark.mean) / ts.t_dark;
                const double dl = std::abs(tg3.stats.light.mean - tg2->stats.light.mean) / ts.t_light;
                ok = ok && dd < 0.15 && dl < 0.25;
                d << ", |d dark|=" << dd << " T_dark, |d light|=" << dl << " T_light";
            } else {
                ok = false;
            }
        } catch (const InsufficientData&) {
            ok = false;
            d << ", telegraph at n_max 3 had no interior periods";
        }
        try {
            const auto f3 = fidelities(3);
            for (std::size_t i = 0; i < f3.size() && i < f2.size(); ++i) {
                const double df = std::abs(f3[i].fidelity - f2[i].fidelity);
                ok = ok && df < 2.0 * f2[i].stderr_fidelity;
                d << ", |dF(eta=" << kFidelityCases[i].eta << ")|=" << df;
            }
            if (f2.empty()) ok = false;
        } catch (const std::exception& e) {
            ok = false;
            d << ", fidelity at n_max 3 failed: " << e.what();
        }
        const bool repro = reproducible_across_workers();
        ok = ok && repro;
        d << "; workers 1 vs 3 " << (repro ? "bit-identical" : "DIFFER");
        report(6, ok, "property suites", d.str(), since(t0));
    }

    return failures;
}
