#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sonicprint/features.hpp"
#include "sonicprint/stats.hpp"
#include "sonicprint/stimulus.hpp"

namespace sonicprint {

/// Statistical speaker-fleet model.
///
/// Device k has per-tone gains baseline_i * exp(deviation_sigma * z_ki).
/// Each capture multiplies those by exp(s * z_i), where the capture's jitter
/// level s is noise_sigma * exp(noise_spread * u) with u uniform in [-1, 1].
struct FleetCalibration {
    std::vector<double> baseline;
    double deviation_sigma = 0;
    double noise_sigma = 0;
    double noise_spread = 0;

    void validate() const;

    /// Tuned so the desk experiment (50 devices x 60 captures) reproduces the
    /// reference similarity populations. The baseline rolls off 40 dB across
    /// the band.
    static FleetCalibration desk(std::size_t tones = 71);
};

struct SpeakerModel {
    std::string device_label;
    std::vector<double> gains;
    std::uint64_t seed = 0;
};

enum class NoiseKind { silent, white, office, street, metro };

/// office/street put all their power below 10 kHz. white and metro spread
/// power over the whole band; in_band_snr_db fixes the in-band level
/// relative to the captured stimulus.
struct NoiseProfile {
    NoiseKind kind = NoiseKind::silent;
    double in_band_snr_db = std::numeric_limits<double>::infinity();

    static NoiseProfile silent() { return {}; }
    static NoiseProfile office() { return {NoiseKind::office}; }
    static NoiseProfile street() { return {NoiseKind::street}; }
    static NoiseProfile white(double snr_db) { return {NoiseKind::white, snr_db}; }
    static NoiseProfile metro(double snr_db = 0.0) { return {NoiseKind::metro, snr_db}; }

    bool has_in_band_noise() const {
        return (kind == NoiseKind::white || kind == NoiseKind::metro) && std::isfinite(in_band_snr_db);
    }
};

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

std::vector<SpeakerModel> generate_fleet(std::size_t n, const FleetCalibration& cal, std::uint64_t seed);

enum class MeasurementPath {
    spectral,     // perturb the tone magnitudes directly
    time_domain,  // render audio, add a noise waveform, run extract()
};

struct MeasurementOptions {
    MeasurementPath path = MeasurementPath::spectral;
    StimulusSpec spec{};
};

/// One capture of `model`. Deterministic in seed.
FeatureVector simulate_measurement(const SpeakerModel& model, const FleetCalibration& cal, const NoiseProfile& noise,
                                   std::uint64_t seed, const MeasurementOptions& options = {});

/// Noise-only waveform as the time-domain path would add it, for a capture
/// whose clean tone amplitudes are `tone_amplitudes`.
AudioBuffer noise_waveform(const NoiseProfile& noise, const StimulusSpec& spec,
                           std::span<const double> tone_amplitudes, std::uint64_t seed);

struct ErrorTableRow {
    double alpha = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

struct ExperimentOptions {
    std::size_t samples_per_device = 60;
    std::size_t enrolled_per_device = 1;
    double alpha = 0.7;
    NoiseProfile noise{};
    std::uint64_t seed = 1;
    MeasurementOptions measurement{};
    bool collect_pairs = true;
    ThresholdSearch table_grid{0.50, 0.95, 0.01, 1e-4};
};

struct ExperimentReport {
    std::uint64_t seed = 0;
    std::size_t devices = 0;
    std::size_t samples_per_device = 0;
    double alpha = 0;
    std::size_t fp_count = 0;
    std::size_t fn_count = 0;
    std::size_t query_count = 0;
    std::vector<double> self_similarities;  // n * C(s, 2)
    PairSimilarities cross_similarities;    // s^2 * C(n, 2)
    std::vector<ErrorTableRow> error_table;
    std::vector<FeatureVector> features;    // device-major order
};

/// Captures samples_per_device features per device, enrolls the first
/// enrolled_per_device of each, queries the rest and counts errors:
/// FP = matched to a different device, FN = declared new.
ExperimentReport run_experiment(std::span<const SpeakerModel> fleet, const FleetCalibration& cal,
                                const ExperimentOptions& options);

struct SimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // row-major n x n

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

SimilarityMatrix stability_matrix(std::span<const FeatureVector> features);
void write_matrix_csv(std::ostream& out, const SimilarityMatrix& m);

/// 10 log10(sum |X_i|^2 / sum |N_i|^2) over the effective bins. +infinity
/// when the noise is zero.
double band_snr(std::span<const double> clean, std::span<const double> noise);

}  // namespace sonicprint
