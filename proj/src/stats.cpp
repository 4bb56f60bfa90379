#include "sonicprint/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sonicprint/error.hpp"

namespace sonicprint {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double lognormal_pdf(double x, double mu, double sigma) {
    if (x <= 0) return 0;
    const double z = (std::log(x) - mu) / sigma;
    return std::exp(-0.5 * z * z) / (x * sigma * std::sqrt(2.0 * std::numbers::pi));
}

double lognormal_cdf(double x, double mu, double sigma) {
    if (x <= 0) return 0;
    if (sigma == 0) return std::log(x) >= mu ? 1.0 : 0.0;
    return normal_cdf((std::log(x) - mu) / sigma);
}

LognormalFit fit_lognormal(std::span<const double> samples) {
    if (samples.empty()) throw Error("cannot fit an empty sample");
    std::vector<double> logs;
    logs.reserve(samples.size());
    for (double x : samples) {
        if (!(x > 0) || !std::isfinite(x)) throw Error("lognormal samples must be positive and finite");
        logs.push_back(std::log(x));
    }
    const double n = static_cast<double>(logs.size());
    const double mu = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
    double ss = 0;
    for (double l : logs) ss += (l - mu) * (l - mu);

    LognormalFit fit;
    fit.mu = mu;
    fit.sigma = std::sqrt(ss / n);
    fit.n = logs.size();
    // Identical inputs can leave rounding noise in the variance.
    if (fit.sigma < 1e-12 * std::max(1.0, std::fabs(mu))) fit.sigma = 0;
    if (fit.degenerate()) return fit;

    const double sum_log = std::accumulate(logs.begin(), logs.end(), 0.0);
    fit.log_likelihood = -sum_log - n * std::log(fit.sigma) - 0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * n;

    std::sort(logs.begin(), logs.end());
    double d = 0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double cdf = normal_cdf((logs[i] - mu) / fit.sigma);
        d = std::max({d, cdf - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf});
    }
    fit.ks_statistic = d;
    return fit;
}

LognormalFit fit_similarities(std::span<const double> similarities) {
    std::vector<double> gaps;
    gaps.reserve(similarities.size());
    std::size_t excluded = 0;
    for (double s : similarities) {
        if (s >= 1.0)
            ++excluded;
        else
            gaps.push_back(1.0 - s);
    }
    auto fit = fit_lognormal(gaps);
    fit.excluded = excluded;
    return fit;
}

ErrorModel ErrorModel::reference() {
    ErrorModel m;
    m.self.mu = -3.17698;
    m.self.sigma = 0.546804;
    m.self.n = 50 * 60 * 59 / 2;
    m.corr.mu = -0.457726;
    m.corr.sigma = 0.178714;
    m.corr.n = 3600 * 50 * 49 / 2;
    return m;
}

namespace {

// P(ln(1 - sim) <= ln(1 - alpha)), i.e. P(sim >= alpha).
double prob_at_least(const LognormalFit& fit, double alpha) {
    if (alpha >= 1.0) return 0.0;
    const double t = std::log(1.0 - alpha);
    if (fit.sigma == 0) return fit.mu <= t ? 1.0 : 0.0;
    return normal_cdf((t - fit.mu) / fit.sigma);
}

double prob_below(const LognormalFit& fit, double alpha) {
    if (alpha >= 1.0) return 1.0;
    const double t = std::log(1.0 - alpha);
    if (fit.sigma == 0) return fit.mu > t ? 1.0 : 0.0;
    return normal_sf((t - fit.mu) / fit.sigma);
}

}  // namespace

double false_positive_rate(const ErrorModel& model, double alpha) { return prob_at_least(model.corr, alpha); }

double false_negative_rate(const ErrorModel& model, double alpha) { return prob_below(model.self, alpha); }

double total_error(const ErrorModel& model, double alpha) {
    return false_positive_rate(model, alpha) + false_negative_rate(model, alpha);
}

double multi_sample_error(const ErrorModel& model, double alpha, int k) {
    if (k < 1) throw Error("sample count must be at least 1");
    return std::pow(false_positive_rate(model, alpha), k) + std::pow(false_negative_rate(model, alpha), k);
}

OptimalThreshold optimal_threshold(const ErrorModel& model, int k, const ThresholdSearch& search) {
    if (!(search.lo < search.hi) || !(search.step > 0) || !(search.tolerance > 0))
        throw Error("invalid threshold search range");
    if (search.lo <= -1.0 || search.hi >= 1.0) throw Error("threshold search range must lie within (-1, 1)");
    auto err = [&](double a) { return multi_sample_error(model, a, k); };

    const auto steps = static_cast<std::size_t>(std::floor((search.hi - search.lo) / search.step + 1e-9));
    std::size_t best_i = 0;
    double best = err(search.lo);
    for (std::size_t i = 1; i <= steps; ++i) {
        const double e = err(search.lo + static_cast<double>(i) * search.step);
        if (e < best) {
            best = e;
            best_i = i;
        }
    }

    double a = search.lo + static_cast<double>(best_i == 0 ? 0 : best_i - 1) * search.step;
    double b = std::min(search.hi, search.lo + static_cast<double>(best_i + 1) * search.step);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = err(c), fd = err(d);
    while (b - a > search.tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = err(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = err(d);
        }
    }
    OptimalThreshold out{0.5 * (a + b), 0};
    out.error = err(out.alpha);
    // The grid point can beat the refined one on a flat or degenerate curve.
    if (best < out.error) out = {search.lo + static_cast<double>(best_i) * search.step, best};
    return out;
}

double entropy_bits(double error_rate) {
    if (!(error_rate > 0) || error_rate > 1) throw Error("error rate must lie in (0, 1]");
    return -std::log2(error_rate);
}

SnrRequirement snr_requirement(double alpha) {
    const double a2 = alpha * alpha, a3 = a2 * alpha, a4 = a3 * alpha;
    const double num = 1 + 4 * alpha + 2 * a2 - 4 * a3 + a4;
    const double den = 3 - 4 * alpha - 2 * a2 + 4 * a3 - a4;
    SnrRequirement r;
    if (!(alpha < 1.0) || !(den > 0)) return r;
    r.feasible = true;
    // Similarity never drops below 1 - sqrt(2), so any SNR will do.
    if (alpha <= 1.0 - std::sqrt(2.0)) {
        r.linear = 0.0;
        r.db = -std::numeric_limits<double>::infinity();
        return r;
    }
    r.linear = num / den;
    r.db = 10.0 * std::log10(r.linear);
    return r;
}

double similarity_at_snr(double snr_linear) {
    if (!(snr_linear >= 0)) throw Error("SNR must be non-negative");
    if (std::isinf(snr_linear)) return 1.0;
    const double ratio = std::sqrt(snr_linear / (snr_linear + 1.0));  // |X| / |X + N|
    return 1.0 - std::sqrt(std::max(0.0, 2.0 - 2.0 * ratio));
}

double neglected_fp_term(const ErrorModel& model, double alpha) {
    if (alpha >= 1.0) return 0.0;
    const auto& c = model.corr;
    const auto& s = model.self;
    if (c.sigma == 0 || s.sigma == 0) throw Error("neglected term needs non-degenerate fits");

    // With u = ln(1 - x): f_corr(x) dx -> N(u; mu_c, sigma_c) du and
    // F_self(x) -> P(ln gap_self >= u).
    const double upper = std::log(1.0 - std::max(alpha, -1.0));
    const double lower = c.mu - 40.0 * c.sigma;
    if (upper <= lower) return 0.0;
    auto integrand = [&](double u) {
        const double zc = (u - c.mu) / c.sigma;
        return std::exp(-0.5 * zc * zc) / (c.sigma * std::sqrt(2.0 * std::numbers::pi)) * normal_sf((u - s.mu) / s.sigma);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lower, upper, 20, 1e-12);
}

std::vector<ScalePoint> scale_convergence(const PairSimilarities& cross, std::span<const std::size_t> sizes,
                                          std::uint64_t seed) {
    if (cross.values.empty()) throw Error("no cross-device similarities");
    std::uint32_t devices = 0;
    for (std::size_t i = 0; i < cross.size(); ++i) devices = std::max({devices, cross.first[i] + 1, cross.second[i] + 1});

    std::vector<std::uint32_t> rank(devices);
    std::iota(rank.begin(), rank.end(), 0u);
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::shuffle(rank.begin(), rank.end(), rng);
    }

    std::vector<ScalePoint> out;
    std::vector<double> subset;
    for (std::size_t m : sizes) {
        if (m < 2) throw Error("scale convergence needs at least two devices");
        if (m > devices) throw Error("requested " + std::to_string(m) + " devices but only " + std::to_string(devices) + " present");
        subset.clear();
        for (std::size_t i = 0; i < cross.size(); ++i)
            if (rank[cross.first[i]] < m && rank[cross.second[i]] < m) subset.push_back(cross.values[i]);
        if (subset.empty()) throw Error("no pairs among the first " + std::to_string(m) + " devices");
        out.push_back({m, fit_similarities(subset)});
    }
    return out;
}

}  // namespace sonicprint
