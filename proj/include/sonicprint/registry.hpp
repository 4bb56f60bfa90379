#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "sonicprint/features.hpp"

namespace sonicprint {

struct DeviceProfile {
    std::string device_id;
    std::vector<FeatureVector> enrolled;
    std::string created_at;
};

enum class Outcome { matched, new_device, inconclusive };

std::string to_string(Outcome outcome);

/// outcome == matched exactly when best_similarity >= threshold. With an
/// empty registry best_similarity is -infinity and the outcome is new_device.
struct MatchDecision {
    Outcome outcome = Outcome::new_device;
    std::string device_id;  // best candidate; empty when nothing was compared
    double best_similarity = 0;
    double threshold = 0;
    std::optional<double> runner_up_similarity;  // best score of any other device
};

struct Neighbor {
    std::string device_id;
    double similarity = 0;
    std::optional<double> runner_up_similarity;
};

/// What a query is compared against.
enum class MatchTarget {
    nearest_feature,  // every enrolled feature
    centroid,         // normalized mean of each profile
};

/// Profile store keyed by device id.
///
/// Reads may run concurrently; enroll() takes an exclusive lock. When a
/// journal path is attached, every enrollment is appended to it as one
/// JSON line and load() replays the journal.
class Registry {
public:
    Registry();
    explicit Registry(std::filesystem::path journal);
    Registry(Registry&&) noexcept;
    Registry& operator=(Registry&&) noexcept;
    ~Registry();

    /// Replays a journal. A missing file yields an empty registry bound to it.
    static Registry load(const std::filesystem::path& journal);

    void enroll(const FeatureVector& feature, const std::string& device_id, const std::string& created_at = {});

    /// Throws Error on an empty registry. Ties go to the lexicographically
    /// smallest device id.
    Neighbor nearest_bruteforce(const FeatureVector& query) const;

    /// Never mutates the registry.
    MatchDecision identify(const FeatureVector& query, double alpha) const;

    /// Unanimity rule over k samples: matched when every sample matches the
    /// same device, new_device when every sample fails, inconclusive otherwise.
    MatchDecision identify_multisample(std::span<const FeatureVector> queries, double alpha) const;

    void set_match_target(MatchTarget target) { target_ = target; }
    MatchTarget match_target() const { return target_; }

    bool empty() const;
    std::size_t size() const;
    std::size_t feature_count() const;
    const std::optional<std::string>& spec_id() const { return spec_id_; }
    const std::map<std::string, DeviceProfile>& profiles() const { return profiles_; }
    const std::optional<std::filesystem::path>& journal() const { return journal_; }

private:
    void insert(const FeatureVector& feature, const std::string& device_id, const std::string& created_at);
    void check_query(const FeatureVector& query) const;
    Neighbor nearest_unlocked(const FeatureVector& query) const;
    static FeatureVector centroid(const DeviceProfile& profile);

    std::map<std::string, DeviceProfile> profiles_;
    std::optional<std::string> spec_id_;
    std::size_t dimension_ = 0;
    std::optional<std::filesystem::path> journal_;
    MatchTarget target_ = MatchTarget::nearest_feature;
    std::unique_ptr<std::shared_mutex> mutex_;
};

void validate_alpha(double alpha);

}  // namespace sonicprint
