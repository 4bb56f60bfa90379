#include "sonicprint/lsh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "sonicprint/error.hpp"

namespace sonicprint {

LshIndex LshIndex::build(const Registry& registry, std::size_t planes, std::size_t tables, std::uint64_t seed) {
    if (planes > 64) throw Error("at most 64 hyperplanes per table");
    if (tables == 0) throw Error("at least one hash table is required");

    LshIndex idx;
    for (const auto& [id, profile] : registry.profiles()) {
        for (const auto& f : profile.enrolled) {
            idx.ids_.push_back(id);
            idx.features_.push_back(f.values);
        }
    }
    if (idx.ids_.empty()) throw Error("cannot index an empty registry");

    idx.planes_ = planes;
    idx.tables_ = tables;
    idx.dim_ = idx.features_.front().size();
    idx.spec_id_ = registry.spec_id().value_or("");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    idx.hyperplanes_.resize(tables * planes * idx.dim_);
    for (auto& h : idx.hyperplanes_) h = normal(rng);

    idx.buckets_.resize(tables);
    for (std::size_t t = 0; t < tables; ++t)
        for (std::size_t i = 0; i < idx.features_.size(); ++i) idx.buckets_[t][idx.signature(t, idx.features_[i])].push_back(i);
    return idx;
}

std::uint64_t LshIndex::signature(std::size_t table, const std::vector<double>& x) const {
    std::uint64_t sig = 0;
    const double* plane = hyperplanes_.data() + table * planes_ * dim_;
    for (std::size_t p = 0; p < planes_; ++p, plane += dim_) {
        double dot = 0;
        for (std::size_t i = 0; i < dim_; ++i) dot += plane[i] * x[i];
        sig = (sig << 1) | (dot >= 0 ? 1u : 0u);
    }
    return sig;
}

std::vector<std::size_t> LshIndex::candidates(const FeatureVector& query) const {
    if (ids_.empty()) throw Error("LSH index is empty");
    if (query.size() != dim_)
        throw Error("query dimension " + std::to_string(query.size()) + " does not match index dimension " +
                    std::to_string(dim_));
    if (!spec_id_.empty() && query.spec_id != spec_id_)
        throw Error("query spec '" + query.spec_id + "' does not match index spec '" + spec_id_ + "'");

    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < tables_; ++t) {
        auto it = buckets_[t].find(signature(t, query.values));
        if (it != buckets_[t].end()) out.insert(out.end(), it->second.begin(), it->second.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MatchDecision LshIndex::query(const FeatureVector& query, double alpha) const {
    validate_alpha(alpha);
    const auto cand = candidates(query);

    MatchDecision d;
    d.threshold = alpha;
    d.outcome = Outcome::new_device;
    d.best_similarity = -std::numeric_limits<double>::infinity();
    if (cand.empty()) return d;

    std::map<std::string, double> per_device;
    for (std::size_t i : cand) {
        const double s = similarity(query.values, features_[i]);
        auto [it, fresh] = per_device.try_emplace(ids_[i], s);
        if (!fresh) it->second = std::max(it->second, s);
    }
    double second = -std::numeric_limits<double>::infinity();
    for (const auto& [id, s] : per_device) {
        if (d.device_id.empty() || s > d.best_similarity) {
            if (!d.device_id.empty()) second = d.best_similarity;
            d.device_id = id;
            d.best_similarity = s;
        } else {
            second = std::max(second, s);
        }
    }
    if (per_device.size() > 1) d.runner_up_similarity = second;
    d.outcome = d.best_similarity >= alpha ? Outcome::matched : Outcome::new_device;
    return d;
}

}  // namespace sonicprint
