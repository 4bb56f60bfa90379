#include "sonicprint/features.hpp"

#include <cmath>
#include <numbers>

#include "sonicprint/error.hpp"

namespace sonicprint {

std::vector<std::complex<double>> tone_coefficients(const AudioBuffer& recording, const StimulusSpec& spec) {
    spec.validate();
    if (recording.sample_rate != spec.sample_rate)
        throw Error("recording sample rate " + std::to_string(recording.sample_rate) + " does not match stimulus rate " +
                    std::to_string(spec.sample_rate));
    const std::size_t period = spec.coherent_period();
    const std::size_t windows = recording.samples.size() / period;
    if (windows == 0)
        throw Error("recording shorter than one coherent period (" + std::to_string(period) + " samples)");

    // Folding the windows onto one period is the coherent average of the
    // per-window DFT coefficients at every tone.
    std::vector<double> folded(period, 0.0);
    for (std::size_t w = 0; w < windows; ++w)
        for (std::size_t n = 0; n < period; ++n) folded[n] += recording.samples[w * period + n];

    const long long sr = spec.sample_rate;
    const double norm = 2.0 / static_cast<double>(windows * period);
    const auto freqs = spec.frequencies();
    std::vector<std::complex<double>> coeffs(freqs.size());
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        const auto f = std::llround(freqs[k]);
        double re = 0, im = 0;
        for (std::size_t n = 0; n < period; ++n) {
            const long long idx = (f * static_cast<long long>(n)) % sr;
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(sr);
            re += folded[n] * std::cos(angle);
            im -= folded[n] * std::sin(angle);
        }
        coeffs[k] = {re * norm, im * norm};
    }
    return coeffs;
}

std::vector<double> band_amplitudes(const AudioBuffer& recording, const StimulusSpec& spec) {
    const auto coeffs = tone_coefficients(recording, spec);
    std::vector<double> amps(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) amps[k] = std::abs(coeffs[k]);
    return amps;
}

FeatureVector make_feature(std::span<const double> amplitudes, std::string spec_id) {
    if (amplitudes.empty()) throw Error("empty amplitude vector");
    double sq = 0;
    for (double a : amplitudes) {
        if (!(a >= 0) || !std::isfinite(a)) throw Error("amplitudes must be finite and non-negative");
        sq += a * a;
    }
    const double norm = std::sqrt(sq);
    if (norm < kMinBandNorm) throw Error("no stimulus energy in the effective band");

    FeatureVector f;
    f.spec_id = std::move(spec_id);
    f.values.reserve(amplitudes.size());
    for (double a : amplitudes) f.values.push_back(a / norm);
    return f;
}

FeatureVector extract(const AudioBuffer& recording, const StimulusSpec& spec) {
    return make_feature(band_amplitudes(recording, spec), spec.id());
}

void validate_feature(const FeatureVector& feature) {
    if (feature.values.empty()) throw Error("feature vector is empty");
    double sq = 0;
    for (double v : feature.values) {
        if (!(v >= 0) || !std::isfinite(v)) throw Error("feature entries must be finite and non-negative");
        sq += v * v;
    }
    if (std::fabs(std::sqrt(sq) - 1.0) > 1e-9) throw Error("feature vector is not unit norm");
}

double distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw Error("dimension mismatch: " + std::to_string(p.size()) + " vs " + std::to_string(q.size()));
    double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = q[i] - p[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double similarity(std::span<const double> p, std::span<const double> q) { return 1.0 - distance(p, q); }

double distance(const FeatureVector& p, const FeatureVector& q) {
    if (p.spec_id != q.spec_id) throw Error("features come from different stimuli: '" + p.spec_id + "' vs '" + q.spec_id + "'");
    return distance(std::span<const double>(p.values), std::span<const double>(q.values));
}

double similarity(const FeatureVector& p, const FeatureVector& q) { return 1.0 - distance(p, q); }

}  // namespace sonicprint
