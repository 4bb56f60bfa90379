#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sonicprint/stimulus.hpp"

namespace sonicprint {

/// Unit-norm, non-negative response magnitudes at the stimulus tones.
struct FeatureVector {
    std::vector<double> values;
    std::string spec_id;
    std::optional<std::string> captured_at;
    std::optional<std::string> device_label;

    std::size_t size() const { return values.size(); }
};

/// Band energy below this (in full-scale amplitude units) is treated as silence.
inline constexpr double kMinBandNorm = 1e-9;

/// Complex amplitude of every tone, measured with a rectangular window over the
/// largest whole number of coherent periods in the recording. Scaled so a tone
/// A*cos(2*pi*f*t + phi) yields A*exp(i*phi).
std::vector<std::complex<double>> tone_coefficients(const AudioBuffer& recording, const StimulusSpec& spec);

/// Magnitudes of tone_coefficients().
std::vector<double> band_amplitudes(const AudioBuffer& recording, const StimulusSpec& spec);

/// L2-normalizes raw magnitudes into a feature. Rejects negative entries and
/// sub-threshold energy.
FeatureVector make_feature(std::span<const double> amplitudes, std::string spec_id);

FeatureVector extract(const AudioBuffer& recording, const StimulusSpec& spec);

/// Throws unless entries are non-negative and the norm is 1 within 1e-9.
void validate_feature(const FeatureVector& feature);

double distance(const FeatureVector& p, const FeatureVector& q);

/// 1 - distance(p, q).
double similarity(const FeatureVector& p, const FeatureVector& q);

double distance(std::span<const double> p, std::span<const double> q);
double similarity(std::span<const double> p, std::span<const double> q);

}  // namespace sonicprint
