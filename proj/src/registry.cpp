#include "sonicprint/registry.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>

#include "sonicprint/error.hpp"
#include "sonicprint/feature_io.hpp"

namespace sonicprint {

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::matched: return "matched";
        case Outcome::new_device: return "new_device";
        case Outcome::inconclusive: return "inconclusive";
    }
    return "unknown";
}

void validate_alpha(double alpha) {
    if (!(alpha > -1.0 && alpha < 1.0)) throw Error("threshold alpha must lie in (-1, 1)");
}

Registry::Registry() : mutex_(std::make_unique<std::shared_mutex>()) {}

Registry::Registry(std::filesystem::path journal) : Registry() { journal_ = std::move(journal); }

Registry::Registry(Registry&&) noexcept = default;
Registry& Registry::operator=(Registry&&) noexcept = default;
Registry::~Registry() = default;

Registry Registry::load(const std::filesystem::path& journal) {
    Registry reg(journal);
    std::ifstream in(journal);
    if (!in) return reg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            reg.insert(feature_from_json(j), j.at("device_id").get<std::string>(), j.value("created_at", std::string{}));
        } catch (const nlohmann::json::exception& e) {
            throw Error(journal.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(journal.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return reg;
}

void Registry::insert(const FeatureVector& feature, const std::string& device_id, const std::string& created_at) {
    if (device_id.empty()) throw Error("device id must not be empty");
    validate_feature(feature);
    if (spec_id_ && feature.spec_id != *spec_id_)
        throw Error("feature spec '" + feature.spec_id + "' does not match registry spec '" + *spec_id_ + "'");
    if (dimension_ != 0 && feature.size() != dimension_)
        throw Error("feature dimension " + std::to_string(feature.size()) + " does not match registry dimension " +
                    std::to_string(dimension_));
    spec_id_ = feature.spec_id;
    dimension_ = feature.size();
    auto [it, fresh] = profiles_.try_emplace(device_id);
    if (fresh) {
        it->second.device_id = device_id;
        it->second.created_at = created_at;
    }
    it->second.enrolled.push_back(feature);
}

void Registry::enroll(const FeatureVector& feature, const std::string& device_id, const std::string& created_at) {
    std::unique_lock lock(*mutex_);
    insert(feature, device_id, created_at);
    if (journal_) {
        auto j = feature_to_json(feature);
        j["device_id"] = device_id;
        j["created_at"] = created_at;
        std::ofstream out(*journal_, std::ios::app);
        if (!out) throw Error("cannot append to '" + journal_->string() + "'");
        out << j.dump() << '\n';
        if (!out) throw Error("failed writing '" + journal_->string() + "'");
    }
}

bool Registry::empty() const {
    std::shared_lock lock(*mutex_);
    return profiles_.empty();
}

std::size_t Registry::size() const {
    std::shared_lock lock(*mutex_);
    return profiles_.size();
}

std::size_t Registry::feature_count() const {
    std::shared_lock lock(*mutex_);
    std::size_t n = 0;
    for (const auto& [id, p] : profiles_) n += p.enrolled.size();
    return n;
}

void Registry::check_query(const FeatureVector& query) const {
    if (spec_id_ && query.spec_id != *spec_id_)
        throw Error("query spec '" + query.spec_id + "' does not match registry spec '" + *spec_id_ + "'");
    if (dimension_ != 0 && query.size() != dimension_)
        throw Error("query dimension " + std::to_string(query.size()) + " does not match registry dimension " +
                    std::to_string(dimension_));
}

FeatureVector Registry::centroid(const DeviceProfile& profile) {
    std::vector<double> sum(profile.enrolled.front().size(), 0.0);
    for (const auto& f : profile.enrolled)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += f.values[i];
    return make_feature(sum, profile.enrolled.front().spec_id);
}

Neighbor Registry::nearest_bruteforce(const FeatureVector& query) const {
    std::shared_lock lock(*mutex_);
    return nearest_unlocked(query);
}

Neighbor Registry::nearest_unlocked(const FeatureVector& query) const {
    if (profiles_.empty()) throw Error("registry is empty");
    check_query(query);

    // profiles_ iterates in id order; strict comparisons keep the smallest id on ties.
    const double none = -std::numeric_limits<double>::infinity();
    std::string best_id;
    double best = none;
    double second = none;
    for (const auto& [id, profile] : profiles_) {
        double score = none;
        if (target_ == MatchTarget::centroid) {
            score = similarity(query, centroid(profile));
        } else {
            for (const auto& f : profile.enrolled) score = std::max(score, similarity(query, f));
        }
        if (best_id.empty() || score > best) {
            if (!best_id.empty()) second = best;
            best = score;
            best_id = id;
        } else {
            second = std::max(second, score);
        }
    }
    Neighbor n{best_id, best, std::nullopt};
    if (profiles_.size() > 1) n.runner_up_similarity = second;
    return n;
}

MatchDecision Registry::identify(const FeatureVector& query, double alpha) const {
    validate_alpha(alpha);
    MatchDecision d;
    d.threshold = alpha;
    std::shared_lock lock(*mutex_);
    if (profiles_.empty()) {
        d.outcome = Outcome::new_device;
        d.best_similarity = -std::numeric_limits<double>::infinity();
        return d;
    }
    const auto n = nearest_unlocked(query);
    d.device_id = n.device_id;
    d.best_similarity = n.similarity;
    d.runner_up_similarity = n.runner_up_similarity;
    d.outcome = n.similarity >= alpha ? Outcome::matched : Outcome::new_device;
    return d;
}

MatchDecision Registry::identify_multisample(std::span<const FeatureVector> queries, double alpha) const {
    if (queries.empty()) throw Error("multi-sample identification needs at least one sample");
    for (const auto& q : queries)
        if (q.spec_id != queries.front().spec_id) throw Error("samples come from different stimuli");
    if (queries.size() == 1) return identify(queries.front(), alpha);

    std::vector<MatchDecision> each;
    each.reserve(queries.size());
    for (const auto& q : queries) each.push_back(identify(q, alpha));

    bool all_matched_same = true;
    bool all_new = true;
    for (const auto& d : each) {
        if (d.outcome != Outcome::matched || d.device_id != each.front().device_id) all_matched_same = false;
        if (d.outcome != Outcome::new_device) all_new = false;
    }

    // Reported score: the weakest sample for matched / inconclusive, the
    // strongest for new_device, so the threshold relation stays visible.
    MatchDecision out = each.front();
    for (const auto& d : each) {
        const bool take = all_new ? d.best_similarity > out.best_similarity : d.best_similarity < out.best_similarity;
        if (take) out = d;
    }
    out.outcome = all_matched_same ? Outcome::matched : all_new ? Outcome::new_device : Outcome::inconclusive;
    if (out.outcome == Outcome::inconclusive) out.device_id.clear();
    return out;
}

}  // namespace sonicprint
