// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sonicprint/features.hpp"
#include "sonicprint/lsh.hpp"
#include "sonicprint/registry.hpp"
#include "sonicprint/seed.hpp"
#include "sonicprint/simbench.hpp"
#include "sonicprint/stats.hpp"
#include "sonicprint/stimulus.hpp"

using namespace sonicprint;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool within_rel(double x, double target, double rel) { return std::fabs(x - target) <= rel * std::fabs(target); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Desk {
    FleetCalibration cal = FleetCalibration::desk();
    std::vector<SpeakerModel> fleet = generate_fleet(50, cal, 1);
    ExperimentReport silent;
};

void criterion1() {
    const auto t0 = Clock::now();
    const auto model = ErrorModel::reference();
    const double total = total_error(model, 0.69);
    const auto best = optimal_threshold(model);
    const double dt = seconds_since(t0);
    const bool ok = within_rel(total, 1.55e-4, 0.05) && best.alpha >= 0.67 && best.alpha <= 0.71 && dt < 1.0;
    report(1, "analytic error", ok,
           fmt("total(0.69)=%.4e, alpha*=%.4f, error*=%.4e, %.3f s", total, best.alpha, best.error, dt));
}

void criterion2() {
    const auto model = ErrorModel::reference();
    const double e2 = multi_sample_error(model, 0.68, 2);
    const auto k3 = optimal_threshold(model, 3);
    const bool ok = within_rel(e2, 1.41e-8, 0.10) && std::fabs(std::log10(k3.error / 1.23e-12)) <= 1.0;
    report(2, "multi-sample", ok, fmt("k=2 at 0.68: %.4e, k=3 optimum %.4e at %.4f", e2, k3.error, k3.alpha));
}

void criterion3() {
    const auto model = ErrorModel::reference();
    const double targets[] = {12.6, 26.0, 39.6};
    bool ok = true;
    std::string detail;
    for (int k = 1; k <= 3; ++k) {
        const double bits = entropy_bits(optimal_threshold(model, k).error);
        ok = ok && std::fabs(bits - targets[k - 1]) <= 0.2;
        detail += fmt("%sk=%d %.2f bits", k > 1 ? ", " : "", k, bits);
    }
    report(3, "entropy", ok, detail);
}

void criterion4() {
    const auto r = snr_requirement(0.7);
    double worst = 0;
    for (int i = 0; i <= 1400; ++i) {
        const double a = -0.41 + i * 0.001;
        const auto q = snr_requirement(a);
        if (!q.feasible) {
            worst = INFINITY;
            break;
        }
        worst = std::max(worst, std::fabs(similarity_at_snr(q.linear) - a));
    }
    const bool ok = r.feasible && r.db >= 10.0 && r.db <= 10.5 && worst <= 1e-9;
    report(4, "SNR requirement", ok, fmt("SNR_min(0.7)=%.4f dB, round-trip max error %.2e", r.db, worst));
}

void criterion5(Desk& d) {
    const auto t0 = Clock::now();
    ExperimentOptions o;
    o.alpha = 0.7;
    o.seed = 1;
    d.silent = run_experiment(d.fleet, d.cal, o);

    ExperimentOptions office = o;
    office.noise = NoiseProfile::office();
    office.collect_pairs = false;
    office.measurement.path = MeasurementPath::time_domain;
    office.measurement.spec.duration = 0.1;
    const auto noisy = run_experiment(d.fleet, d.cal, office);
    const double dt = seconds_since(t0);

    const auto& s = d.silent;
    const bool ok = s.fp_count == 0 && s.fn_count == 0 && noisy.fp_count == 0 && noisy.fn_count == 0 &&
                    s.self_similarities.size() == 88500 && s.cross_similarities.size() == 4410000 && dt < 120.0;
    report(5, "zero-error desk experiment", ok,
           fmt("silent FP %zu FN %zu, office FP %zu FN %zu over %zu queries each; pairs %zu self / %zu cross; "
               "%.1f s",
               s.fp_count, s.fn_count, noisy.fp_count, noisy.fn_count, s.query_count, s.self_similarities.size(),
               s.cross_similarities.size(), dt));
}

void criterion6(const Desk& d) {
    const auto self = fit_similarities(d.silent.self_similarities);
    const auto corr = fit_similarities(d.silent.cross_similarities.values);
    const auto ref = ErrorModel::reference();
    const bool ok = within_rel(self.mu, ref.self.mu, 0.15) && within_rel(self.sigma, ref.self.sigma, 0.15) &&
                    within_rel(corr.mu, ref.corr.mu, 0.15) && within_rel(corr.sigma, ref.corr.sigma, 0.15);
    report(6, "calibration fidelity", ok,
           fmt("self mu %.4f sigma %.4f, corr mu %.4f sigma %.4f", self.mu, self.sigma, corr.mu, corr.sigma));
}

void criterion7() {
    StimulusSpec spec;
    const std::size_t n = spec.tone_count();
    std::vector<double> gains(n);
    for (std::size_t i = 0; i < n; ++i)
        gains[i] = std::pow(10.0, -0.5 * i / (n - 1.0)) * (1.0 + 0.2 * std::sin(0.37 * i));
    const auto shaped = extract(synthesize(spec, gains), spec);
    const auto expected = make_feature(gains, spec.id());
    double cosine = 0;
    for (std::size_t i = 0; i < n; ++i) cosine += shaped.values[i] * expected.values[i];

    const auto flat = extract(synthesize(spec), spec);
    double flat_err = 0;
    for (double v : flat.values) flat_err = std::max(flat_err, std::fabs(v - 1.0 / std::sqrt(double(n))));
    const bool ok = cosine >= 0.9999 && flat_err <= 1e-6;
    report(7, "DSP oracle", ok, fmt("cosine %.9f, flat max deviation %.2e", cosine, flat_err));
}

void criterion8(const Desk& d) {
    Registry reg;
    for (std::size_t k = 0; k < d.fleet.size(); ++k)
        reg.enroll(simulate_measurement(d.fleet[k], d.cal, NoiseProfile::silent(), derive_seed(808, {k, 0})),
                   d.fleet[k].device_label);
    const auto idx = LshIndex::build(reg);
    int agree = 0;
    for (std::size_t q = 0; q < 500; ++q) {
        const std::size_t k = q % d.fleet.size();
        const auto probe =
            simulate_measurement(d.fleet[k], d.cal, NoiseProfile::silent(), derive_seed(808, {k, 1 + q / 50}));
        const auto a = idx.query(probe, 0.7), b = reg.identify(probe, 0.7);
        if (a.outcome == b.outcome && a.device_id == b.device_id) ++agree;
    }
    report(8, "LSH vs brute force", agree >= 495, fmt("%d/500 decisions agree", agree));
}

void criterion9() {
    std::mt19937_64 rng(derive_seed(9, {}));
    std::lognormal_distribution<double> dist(-1.0, 0.2);
    std::vector<double> x(100000);
    for (double& v : x) v = dist(rng);
    const auto f = fit_lognormal(x);
    const bool ok = std::fabs(f.mu + 1.0) <= 0.01 && std::fabs(f.sigma - 0.2) <= 0.01;
    report(9, "fit round trip", ok, fmt("mu %.5f sigma %.5f", f.mu, f.sigma));
}

void criterion10(const Desk& d) {
    MeasurementOptions td;
    td.path = MeasurementPath::time_domain;
    double worst = 0;
    for (std::size_t k = 0; k < 10; ++k) {
        const auto seed = derive_seed(1010, {k});
        const auto quiet = simulate_measurement(d.fleet[k], d.cal, NoiseProfile::silent(), seed, td);
        const auto loud = simulate_measurement(d.fleet[k], d.cal, NoiseProfile::office(), seed, td);
        worst = std::max(worst, distance(quiet, loud));
    }

    ExperimentOptions o;
    o.samples_per_device = 10;
    o.noise = NoiseProfile::metro(0.0);
    o.collect_pairs = false;
    const auto metro = run_experiment(d.fleet, d.cal, o);
    const double failure = static_cast<double>(metro.fp_count + metro.fn_count) / metro.query_count;
    const bool ok = worst <= 1e-3 && failure >= 0.9;
    report(10, "noise behavior", ok,
           fmt("office max feature distance %.2e; metro 0 dB failure rate %.3f (FP %zu FN %zu of %zu)", worst,
               failure, metro.fp_count, metro.fn_count, metro.query_count));
}

}  // namespace

int main() {
    Desk desk;
    const std::vector<std::function<void()>> steps{
        criterion1, criterion2, criterion3, criterion4, [&] { criterion5(desk); }, [&] { criterion6(desk); },
        criterion7, [&] { criterion8(desk); }, criterion9, [&] { criterion10(desk); }};
    for (std::size_t i = 0; i < steps.size(); ++i) {
        try {
            steps[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "exception", false, e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, steps.size());
    return failures == 0 ? 0 : 1;
}
