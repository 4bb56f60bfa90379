#include "sonicprint/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "sonicprint/error.hpp"
#include "sonicprint/registry.hpp"
#include "sonicprint/seed.hpp"

namespace sonicprint {

void FleetCalibration::validate() const {
    if (baseline.empty()) throw Error("calibration baseline is empty");
    for (double b : baseline)
        if (!(b > 0) || !std::isfinite(b)) throw Error("calibration baseline must be positive");
    if (!(deviation_sigma >= 0) || !(noise_sigma >= 0) || !(noise_spread >= 0))
        throw Error("calibration sigmas must be non-negative");
}

FleetCalibration FleetCalibration::desk(std::size_t tones) {
    if (tones == 0) throw Error("tone count must be positive");
    FleetCalibration cal;
    cal.baseline.resize(tones);
    for (std::size_t i = 0; i < tones; ++i) {
        const double frac = tones > 1 ? static_cast<double>(i) / static_cast<double>(tones - 1) : 0.0;
        cal.baseline[i] = std::pow(10.0, -40.0 * frac / 20.0);
    }
    cal.deviation_sigma = 0.53;
    cal.noise_sigma = 0.028;
    cal.noise_spread = 1.15;
    return cal;
}

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::silent: return "silent";
        case NoiseKind::white: return "white";
        case NoiseKind::office: return "office";
        case NoiseKind::street: return "street";
        case NoiseKind::metro: return "metro";
    }
    return "unknown";
}

NoiseKind noise_kind_from_string(const std::string& name) {
    if (name == "silent") return NoiseKind::silent;
    if (name == "white") return NoiseKind::white;
    if (name == "office") return NoiseKind::office;
    if (name == "street") return NoiseKind::street;
    if (name == "metro") return NoiseKind::metro;
    throw Error("unknown noise profile '" + name + "'");
}

std::vector<SpeakerModel> generate_fleet(std::size_t n, const FleetCalibration& cal, std::uint64_t seed) {
    if (n == 0) throw Error("fleet size must be at least 1");
    cal.validate();
    const int width = std::max(3, static_cast<int>(std::to_string(n - 1).size()));
    std::vector<SpeakerModel> fleet;
    fleet.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        SpeakerModel m;
        const auto digits = std::to_string(k);
        m.device_label = "dev" + std::string(static_cast<std::size_t>(width) - std::min(digits.size(), static_cast<std::size_t>(width)), '0') + digits;
        m.seed = derive_seed(seed, {k});
        std::mt19937_64 rng(m.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        m.gains.resize(cal.baseline.size());
        for (std::size_t i = 0; i < m.gains.size(); ++i) m.gains[i] = cal.baseline[i] * std::exp(cal.deviation_sigma * normal(rng));
        fleet.push_back(std::move(m));
    }
    return fleet;
}

namespace {

double mean_square(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

// Sum of sinusoids confined to [f_lo, f_hi] carrying `power` (mean square).
void add_band_tones(std::vector<double>& out, int sample_rate, double f_lo, double f_hi, std::size_t count, double power,
                    std::mt19937_64& rng) {
    if (power <= 0 || out.empty()) return;
    std::uniform_real_distribution<double> freq(f_lo, f_hi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> f(count), a(count), p(count);
    double sum_a2 = 0;
    for (std::size_t c = 0; c < count; ++c) {
        f[c] = freq(rng);
        p[c] = phase(rng);
        a[c] = std::hypot(normal(rng), normal(rng));
        sum_a2 += a[c] * a[c];
    }
    // A sinusoid of amplitude a has mean square a^2 / 2.
    const double scale = std::sqrt(2.0 * power / sum_a2);
    for (std::size_t c = 0; c < count; ++c) {
        const double w = 2.0 * std::numbers::pi * f[c] / sample_rate;
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += scale * a[c] * std::cos(w * static_cast<double>(n) + p[c]);
    }
}

double snr_linear(const NoiseProfile& noise) { return std::pow(10.0, noise.in_band_snr_db / 10.0); }

// Per-capture tone magnitudes before any additive noise.
std::vector<double> jittered_gains(const SpeakerModel& model, const FleetCalibration& cal, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double level = cal.noise_sigma * std::exp(cal.noise_spread * unit(rng));
    std::vector<double> o(model.gains.size());
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = model.gains[i] * std::exp(level * normal(rng));
    return o;
}

}  // namespace

AudioBuffer noise_waveform(const NoiseProfile& noise, const StimulusSpec& spec, std::span<const double> tone_amplitudes,
                           std::uint64_t seed) {
    spec.validate();
    AudioBuffer out;
    out.sample_rate = spec.sample_rate;
    out.samples.assign(spec.sample_count(), 0.0);
    if (noise.kind == NoiseKind::silent) return out;

    std::mt19937_64 rng(seed);
    // Mean square of the clean stimulus: each tone of amplitude A adds A^2 / 2.
    const double stimulus_power = 0.5 * mean_square(tone_amplitudes) * static_cast<double>(tone_amplitudes.size());

    switch (noise.kind) {
        case NoiseKind::office:
            add_band_tones(out.samples, spec.sample_rate, 100.0, 8000.0, 48, stimulus_power, rng);
            break;
        case NoiseKind::street:
            add_band_tones(out.samples, spec.sample_rate, 20.0, 6000.0, 48, 4.0 * stimulus_power, rng);
            break;
        case NoiseKind::metro:
            add_band_tones(out.samples, spec.sample_rate, 20.0, 1000.0, 24, 4.0 * stimulus_power, rng);
            [[fallthrough]];
        case NoiseKind::white:
            if (noise.has_in_band_noise()) {
                // A white sample variance v puts 4 v / L of complex power on each
                // coherent bin of an L-sample window.
                const std::size_t period = spec.coherent_period();
                const std::size_t window = out.samples.size() / period * period;
                if (window == 0) throw Error("stimulus shorter than one coherent period");
                const double bin_power = mean_square(tone_amplitudes) / snr_linear(noise);
                const double sd = std::sqrt(bin_power * static_cast<double>(window) / 4.0);
                std::normal_distribution<double> normal(0.0, sd);
                for (auto& v : out.samples) v += normal(rng);
            }
            break;
        case NoiseKind::silent:
            break;
    }
    return out;
}

FeatureVector simulate_measurement(const SpeakerModel& model, const FleetCalibration& cal, const NoiseProfile& noise,
                                   std::uint64_t seed, const MeasurementOptions& options) {
    if (model.gains.size() != cal.baseline.size()) throw Error("speaker model does not match the calibration tone count");
    std::mt19937_64 rng(seed);
    auto tones = jittered_gains(model, cal, rng);

    FeatureVector feature;
    if (options.path == MeasurementPath::spectral) {
        if (noise.has_in_band_noise()) {
            const double bin_power = mean_square(tones) / snr_linear(noise);
            std::normal_distribution<double> normal(0.0, std::sqrt(bin_power / 2.0));
            for (auto& t : tones) t = std::abs(std::complex<double>(t + normal(rng), normal(rng)));
        }
        feature = make_feature(tones, options.spec.id());
    } else {
        const auto& spec = options.spec;
        if (spec.tone_count() != tones.size()) throw Error("stimulus tone count does not match the speaker model");
        AudioBuffer rec = synthesize(spec, tones);
        const auto clean = band_amplitudes(rec, spec);
        const auto n = noise_waveform(noise, spec, clean, derive_seed(seed, {1}));
        double peak = 0;
        for (std::size_t i = 0; i < rec.samples.size(); ++i) {
            rec.samples[i] += n.samples[i];
            peak = std::max(peak, std::fabs(rec.samples[i]));
        }
        if (peak > 1.0)
            for (auto& v : rec.samples) v /= peak;
        feature = extract(rec, spec);
    }
    feature.device_label = model.device_label;
    return feature;
}

ExperimentReport run_experiment(std::span<const SpeakerModel> fleet, const FleetCalibration& cal,
                                const ExperimentOptions& options) {
    if (fleet.empty()) throw Error("fleet is empty");
    const std::size_t s = options.samples_per_device;
    if (s < 2) throw Error("need at least two samples per device");
    if (options.enrolled_per_device < 1 || options.enrolled_per_device >= s)
        throw Error("enrolled samples per device must lie in [1, samples_per_device)");
    validate_alpha(options.alpha);

    ExperimentReport rep;
    rep.seed = options.seed;
    rep.devices = fleet.size();
    rep.samples_per_device = s;
    rep.alpha = options.alpha;

    rep.features.reserve(fleet.size() * s);
    for (std::size_t k = 0; k < fleet.size(); ++k)
        for (std::size_t j = 0; j < s; ++j)
            rep.features.push_back(
                simulate_measurement(fleet[k], cal, options.noise, derive_seed(options.seed, {k, j}), options.measurement));

    Registry registry;
    for (std::size_t k = 0; k < fleet.size(); ++k)
        for (std::size_t j = 0; j < options.enrolled_per_device; ++j)
            registry.enroll(rep.features[k * s + j], fleet[k].device_label);

    struct QueryResult {
        bool correct_device;
        double best;
    };
    std::vector<QueryResult> outcomes;
    for (std::size_t k = 0; k < fleet.size(); ++k) {
        for (std::size_t j = options.enrolled_per_device; j < s; ++j) {
            const auto n = registry.nearest_bruteforce(rep.features[k * s + j]);
            outcomes.push_back({n.device_id == fleet[k].device_label, n.similarity});
        }
    }
    rep.query_count = outcomes.size();

    auto count = [&](double alpha, std::size_t& fp, std::size_t& fn) {
        fp = fn = 0;
        for (const auto& o : outcomes) {
            if (o.best < alpha)
                ++fn;
            else if (!o.correct_device)
                ++fp;
        }
    };
    count(options.alpha, rep.fp_count, rep.fn_count);

    const auto& g = options.table_grid;
    const auto steps = static_cast<std::size_t>(std::floor((g.hi - g.lo) / g.step + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) {
        ErrorTableRow row;
        row.alpha = std::round((g.lo + static_cast<double>(i) * g.step) * 1e9) / 1e9;
        count(row.alpha, row.fp, row.fn);
        rep.error_table.push_back(row);
    }

    if (options.collect_pairs) {
        const std::size_t n = fleet.size();
        rep.self_similarities.reserve(n * s * (s - 1) / 2);
        rep.cross_similarities.values.reserve(s * s * n * (n - 1) / 2);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t i = 0; i < s; ++i) {
                const auto& fi = rep.features[a * s + i].values;
                for (std::size_t j = i + 1; j < s; ++j) rep.self_similarities.push_back(similarity(fi, rep.features[a * s + j].values));
                for (std::size_t b = a + 1; b < n; ++b)
                    for (std::size_t j = 0; j < s; ++j)
                        rep.cross_similarities.add(similarity(fi, rep.features[b * s + j].values), static_cast<std::uint32_t>(a),
                                                   static_cast<std::uint32_t>(b));
            }
        }
    }
    return rep;
}

SimilarityMatrix stability_matrix(std::span<const FeatureVector> features) {
    SimilarityMatrix m;
    m.n = features.size();
    m.values.assign(m.n * m.n, 1.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        if (features[i].spec_id != features.front().spec_id) throw Error("features come from different stimuli");
        for (std::size_t j = i + 1; j < m.n; ++j) {
            const double s = similarity(features[i], features[j]);
            m.values[i * m.n + j] = s;
            m.values[j * m.n + i] = s;
        }
    }
    return m;
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& m) {
    char buf[32];
    for (std::size_t j = 0; j < m.n; ++j) out << (j ? "," : "") << 's' << (j + 1);
    out << '\n';
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j) {
            std::snprintf(buf, sizeof buf, "%.9f", m.at(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

double band_snr(std::span<const double> clean, std::span<const double> noise) {
    if (clean.size() != noise.size()) throw Error("band SNR needs equal-length spectra");
    double xs = 0, ns = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        xs += clean[i] * clean[i];
        ns += noise[i] * noise[i];
    }
    if (ns == 0) return std::numeric_limits<double>::infinity();
    if (xs == 0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(xs / ns);
}

}  // namespace sonicprint
