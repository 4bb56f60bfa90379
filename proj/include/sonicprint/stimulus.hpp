#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sonicprint {

enum class PhaseScheme { zero, newman, random };

std::string to_string(PhaseScheme scheme);
PhaseScheme phase_scheme_from_string(const std::string& name);

/// Multi-tone comb definition. Tone k sits at f_start + k * spacing.
///
/// All frequencies are whole hertz and multiples of the spacing, so every
/// tone completes an integer number of cycles in coherent_period() samples.
struct StimulusSpec {
    double f_start = 14000.0;
    double f_end = 21000.0;
    double spacing = 100.0;
    double duration = 1.0;
    int sample_rate = 44100;
    double amplitude = 0.9;
    PhaseScheme phase = PhaseScheme::newman;
    std::uint64_t phase_seed = 0;

    /// Throws Error when any invariant is violated.
    void validate() const;

    std::size_t tone_count() const;
    std::vector<double> frequencies() const;
    std::vector<double> phases() const;

    /// Smallest sample count holding an integer number of cycles of every tone.
    std::size_t coherent_period() const;
    std::size_t sample_count() const;

    /// Identifies the feature space: two specs with the same id produce
    /// comparable feature vectors. Phases do not enter the id.
    std::string id() const;
};

struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = 44100;

    double seconds() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

/// Equal-amplitude cosine comb, peak-normalized to spec.amplitude.
AudioBuffer synthesize(const StimulusSpec& spec);

/// Same comb with per-tone amplitudes (one positive gain per tone), then
/// peak-normalized. Used to emulate a loudspeaker's response.
AudioBuffer synthesize(const StimulusSpec& spec, std::span<const double> tone_gains);

/// Peak-to-average power ratio (linear) of a sample sequence.
double papr(std::span<const double> samples);

}  // namespace sonicprint
