#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sonicprint {

// Similarity populations are modeled through their gap 1 - similarity,
// which is lognormal: ln(1 - sim) ~ N(mu, sigma^2).

struct LognormalFit {
    double mu = 0;
    double sigma = 0;
    std::size_t n = 0;
    std::size_t excluded = 0;    // inputs dropped before fitting (similarity >= 1)
    double log_likelihood = 0;   // at the MLE; 0 when degenerate
    double ks_statistic = 0;     // sup |empirical CDF - fitted CDF|

    bool degenerate() const { return sigma == 0; }
};

/// Closed-form MLE on logs (population standard deviation). Throws on empty
/// input or any non-positive sample.
LognormalFit fit_lognormal(std::span<const double> samples);

/// Fits 1 - s over the similarities, excluding s >= 1 with a count.
LognormalFit fit_similarities(std::span<const double> similarities);

double normal_cdf(double z);
/// Upper tail 1 - normal_cdf(z), accurate far into the tail.
double normal_sf(double z);

double lognormal_pdf(double x, double mu, double sigma);
double lognormal_cdf(double x, double mu, double sigma);

struct ErrorModel {
    LognormalFit self;  // same-device similarities
    LognormalFit corr;  // cross-device similarities

    /// Fitted parameters from the 50-speaker desk experiment.
    static ErrorModel reference();
};

/// P(cross-device similarity >= alpha). 0 for alpha >= 1.
double false_positive_rate(const ErrorModel& model, double alpha);
/// P(same-device similarity < alpha). 1 for alpha >= 1.
double false_negative_rate(const ErrorModel& model, double alpha);
double total_error(const ErrorModel& model, double alpha);

/// FP^k + FN^k: k independent samples must all err the same way.
double multi_sample_error(const ErrorModel& model, double alpha, int k);

struct ThresholdSearch {
    double lo = 0.50;
    double hi = 0.95;
    double step = 1e-3;
    double tolerance = 1e-4;
};

struct OptimalThreshold {
    double alpha = 0;
    double error = 0;
};

/// Grid scan then golden-section refinement of multi_sample_error(., k).
OptimalThreshold optimal_threshold(const ErrorModel& model, int k = 1, const ThresholdSearch& search = {});

/// -log2(error_rate): the heuristic "1/error_rate distinguishable devices".
double entropy_bits(double error_rate);

struct SnrRequirement {
    bool feasible = false;
    double linear = 0;
    double db = 0;
};

/// Minimum in-band SNR for which a noisy copy of a unit feature keeps
/// similarity above alpha, assuming noise orthogonal to the signal.
SnrRequirement snr_requirement(double alpha);

/// Similarity between X/|X| and (X+N)/|X+N| for orthogonal N at the given
/// linear SNR |X|^2/|N|^2.
double similarity_at_snr(double snr_linear);

/// Integral over x in [alpha, 1] of f_corr(x) * F_self(x): a cross-device
/// feature beating the query's own-device similarity above threshold.
double neglected_fp_term(const ErrorModel& model, double alpha);

/// Similarities tagged with the (first, second) device index of each pair.
struct PairSimilarities {
    std::vector<double> values;
    std::vector<std::uint32_t> first;
    std::vector<std::uint32_t> second;

    void add(double s, std::uint32_t a, std::uint32_t b) {
        values.push_back(s);
        first.push_back(a);
        second.push_back(b);
    }
    std::size_t size() const { return values.size(); }
};

struct ScalePoint {
    std::size_t devices = 0;
    LognormalFit fit;
};

/// Refits the cross-device population restricted to pairs among the first m
/// devices, for each m in sizes. Device order is shuffled by seed; seed 0
/// keeps the natural order.
std::vector<ScalePoint> scale_convergence(const PairSimilarities& cross, std::span<const std::size_t> sizes,
                                          std::uint64_t seed = 0);

}  // namespace sonicprint
