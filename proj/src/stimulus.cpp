#include "sonicprint/stimulus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "sonicprint/error.hpp"

namespace sonicprint {

namespace {

bool is_whole(double x) { return std::isfinite(x) && std::fabs(x - std::round(x)) < 1e-9; }

long long whole(double x) { return std::llround(x); }

}  // namespace

std::string to_string(PhaseScheme scheme) {
    switch (scheme) {
        case PhaseScheme::zero: return "zero";
        case PhaseScheme::newman: return "newman";
        case PhaseScheme::random: return "random";
    }
    return "unknown";
}

PhaseScheme phase_scheme_from_string(const std::string& name) {
    if (name == "zero") return PhaseScheme::zero;
    if (name == "newman") return PhaseScheme::newman;
    if (name == "random") return PhaseScheme::random;
    throw Error("unknown phase scheme '" + name + "'");
}

void StimulusSpec::validate() const {
    if (sample_rate <= 0) throw Error("sample rate must be positive");
    if (!(spacing > 0) || !is_whole(spacing)) throw Error("spacing must be a positive whole number of hertz");
    if (!(f_start > 0) || !is_whole(f_start) || !is_whole(f_end))
        throw Error("tone frequencies must be positive whole numbers of hertz");
    if (f_start > f_end) throw Error("f_start exceeds f_end");
    if (whole(f_start) % whole(spacing) != 0) throw Error("f_start is not a multiple of the spacing");
    if ((whole(f_end) - whole(f_start)) % whole(spacing) != 0)
        throw Error("f_end - f_start is not an integer multiple of the spacing");
    if (2.0 * f_end >= sample_rate) throw Error("f_end is at or above the Nyquist frequency");
    if (!(duration > 0) || !std::isfinite(duration)) throw Error("duration must be positive");
    if (!(amplitude > 0) || amplitude > 1) throw Error("amplitude must lie in (0, 1]");
}

std::size_t StimulusSpec::tone_count() const {
    return static_cast<std::size_t>((whole(f_end) - whole(f_start)) / whole(spacing)) + 1;
}

std::vector<double> StimulusSpec::frequencies() const {
    std::vector<double> f(tone_count());
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = static_cast<double>(whole(f_start) + static_cast<long long>(k) * whole(spacing));
    return f;
}

std::vector<double> StimulusSpec::phases() const {
    const std::size_t n = tone_count();
    std::vector<double> phi(n, 0.0);
    switch (phase) {
        case PhaseScheme::zero:
            break;
        case PhaseScheme::newman:
            for (std::size_t k = 0; k < n; ++k) {
                // k^2 mod 2n keeps the argument small without changing the angle.
                const auto kk = static_cast<unsigned long long>(k) * k % (2 * n);
                phi[k] = std::numbers::pi * static_cast<double>(kk) / static_cast<double>(n);
            }
            break;
        case PhaseScheme::random: {
            std::mt19937_64 rng(phase_seed);
            std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
            for (auto& p : phi) p = u(rng);
            break;
        }
    }
    return phi;
}

std::size_t StimulusSpec::coherent_period() const {
    const long long sr = sample_rate;
    return static_cast<std::size_t>(sr / std::gcd(sr, whole(spacing)));
}

std::size_t StimulusSpec::sample_count() const {
    return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

std::string StimulusSpec::id() const {
    return "comb:" + std::to_string(whole(f_start)) + "-" + std::to_string(whole(f_end)) + "/" +
           std::to_string(whole(spacing)) + "@" + std::to_string(sample_rate);
}

AudioBuffer synthesize(const StimulusSpec& spec) {
    spec.validate();
    std::vector<double> ones(spec.tone_count(), 1.0);
    return synthesize(spec, ones);
}

AudioBuffer synthesize(const StimulusSpec& spec, std::span<const double> tone_gains) {
    spec.validate();
    const std::size_t tones = spec.tone_count();
    if (tone_gains.size() != tones) throw Error("tone gain count does not match the tone count");
    for (double g : tone_gains)
        if (!(g >= 0) || !std::isfinite(g)) throw Error("tone gains must be finite and non-negative");

    // The comb repeats every coherent period, so one period is evaluated and tiled.
    const std::size_t period = spec.coherent_period();
    const long long sr = spec.sample_rate;
    const auto freqs = spec.frequencies();
    const auto phi = spec.phases();
    std::vector<double> cycle(period, 0.0);
    for (std::size_t k = 0; k < tones; ++k) {
        if (tone_gains[k] == 0) continue;
        const long long f = whole(freqs[k]);
        for (std::size_t n = 0; n < period; ++n) {
            // Integer phase index keeps the argument exact for long periods.
            const long long idx = (f * static_cast<long long>(n)) % sr;
            cycle[n] += tone_gains[k] *
                        std::cos(2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(sr) + phi[k]);
        }
    }

    const std::size_t count = spec.sample_count();
    double peak = 0;
    for (std::size_t n = 0; n < std::min(period, count); ++n) peak = std::max(peak, std::fabs(cycle[n]));
    if (peak == 0) throw Error("synthesized signal is silent");
    const double scale = spec.amplitude / peak;

    AudioBuffer out;
    out.sample_rate = spec.sample_rate;
    out.samples.resize(count);
    for (std::size_t n = 0; n < out.samples.size(); ++n) out.samples[n] = cycle[n % period] * scale;
    return out;
}

double papr(std::span<const double> samples) {
    if (samples.empty()) throw Error("PAPR of an empty signal is undefined");
    double peak = 0, power = 0;
    for (double v : samples) {
        peak = std::max(peak, v * v);
        power += v * v;
    }
    power /= static_cast<double>(samples.size());
    if (power == 0) throw Error("PAPR of a silent signal is undefined");
    return peak / power;
}

}  // namespace sonicprint
