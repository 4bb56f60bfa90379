#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sonicprint/registry.hpp"

namespace sonicprint {

inline constexpr std::size_t kDefaultLshPlanes = 12;
inline constexpr std::size_t kDefaultLshTables = 8;

/// Random-hyperplane (sign of projection) index over a registry snapshot.
///
/// Each table hashes a feature to the sign pattern of `planes` Gaussian
/// projections. A query collects every feature sharing a bucket with it in any
/// table and re-ranks those candidates by exact similarity. The index is
/// immutable; rebuild and swap to pick up new enrollments.
class LshIndex {
public:
    static LshIndex build(const Registry& registry, std::size_t planes = kDefaultLshPlanes,
                          std::size_t tables = kDefaultLshTables, std::uint64_t seed = 0x5eed);

    /// Indices of the stored features colliding with the query, ascending.
    std::vector<std::size_t> candidates(const FeatureVector& query) const;

    /// Same decision rule as Registry::identify, restricted to the candidates.
    /// No candidates yields new_device with best_similarity = -infinity.
    MatchDecision query(const FeatureVector& query, double alpha) const;

    std::size_t size() const { return ids_.size(); }
    std::size_t planes() const { return planes_; }
    std::size_t tables() const { return tables_; }

private:
    std::uint64_t signature(std::size_t table, const std::vector<double>& x) const;

    std::size_t planes_ = 0;
    std::size_t tables_ = 0;
    std::size_t dim_ = 0;
    std::string spec_id_;
    std::vector<std::string> ids_;
    std::vector<std::vector<double>> features_;
    std::vector<double> hyperplanes_;  // [table][plane][dim]
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> buckets_;
};

}  // namespace sonicprint
