#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <atomic>
#include <thread>

#include "sonicprint/error.hpp"
#include "sonicprint/lsh.hpp"
#include "sonicprint/registry.hpp"
#include "sonicprint/seed.hpp"
#include "sonicprint/simbench.hpp"

using namespace sonicprint;

namespace {

FeatureVector basis(std::size_t i, std::size_t n = 71) {
    std::vector<double> v(n, 0.0);
    v[i] = 1;
    return make_feature(v, "t");
}

FeatureVector random_feature(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(71);
    for (auto& x : v) x = u(rng);
    return make_feature(v, "t");
}

std::filesystem::path journal_path(const char* name) {
    auto p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove(p);
    return p;
}

struct Fleet {
    FleetCalibration cal = FleetCalibration::desk();
    std::vector<SpeakerModel> models = generate_fleet(50, cal, 11);

    FeatureVector capture(std::size_t k, std::size_t j) const {
        return simulate_measurement(models[k], cal, NoiseProfile::silent(), derive_seed(11, {k, j}));
    }
};

}  // namespace

TEST_CASE("enrollment grows profiles") {
    Registry reg;
    CHECK(reg.empty());
    reg.enroll(basis(0), "a");
    CHECK(reg.size() == 1);
    for (int i = 1; i < 60; ++i) reg.enroll(basis(0), "b");
    CHECK(reg.profiles().at("b").enrolled.size() == 59);
    reg.enroll(basis(3), "b");
    CHECK(reg.profiles().at("b").enrolled.size() == 60);
    CHECK(reg.feature_count() == 61);

    CHECK_THROWS_AS(reg.enroll(basis(0, 12), "c"), Error);
    auto foreign = basis(0);
    foreign.spec_id = "other";
    CHECK_THROWS_AS(reg.enroll(foreign, "a"), Error);
    CHECK_THROWS_AS(reg.enroll(basis(0), ""), Error);
}

TEST_CASE("brute-force nearest neighbour") {
    Registry reg;
    CHECK_THROWS_AS(reg.nearest_bruteforce(basis(0)), Error);
    reg.enroll(basis(0), "first");
    reg.enroll(basis(1), "second");
    const auto n = reg.nearest_bruteforce(basis(0));
    CHECK(n.device_id == "first");
    CHECK(n.similarity == 1.0);
    REQUIRE(n.runner_up_similarity);
    CHECK(*n.runner_up_similarity == doctest::Approx(1 - std::sqrt(2.0)));

    // Equal scores resolve to the smallest id.
    Registry tie;
    tie.enroll(basis(0), "zeta");
    tie.enroll(basis(0), "alpha");
    CHECK(tie.nearest_bruteforce(basis(0)).device_id == "alpha");
}

TEST_CASE("identify thresholds the best similarity") {
    Registry reg;
    const auto empty = reg.identify(basis(0), 0.7);
    CHECK(empty.outcome == Outcome::new_device);
    CHECK(std::isinf(empty.best_similarity));

    reg.enroll(basis(0), "a");
    CHECK(reg.identify(basis(0), 0.7).outcome == Outcome::matched);
    CHECK(reg.identify(basis(0), 0.7).device_id == "a");
    CHECK(reg.identify(basis(5), 0.7).outcome == Outcome::new_device);
    CHECK(reg.feature_count() == 1);
    CHECK_THROWS_AS(reg.identify(basis(0), 1.0), Error);
    CHECK_THROWS_AS(reg.identify(basis(0), -1.0), Error);
}

TEST_CASE("identify is monotone in alpha (property)") {
    std::mt19937_64 rng(5);
    Registry reg;
    for (int i = 0; i < 30; ++i) reg.enroll(random_feature(rng), "d" + std::to_string(i % 7));
    for (int q = 0; q < 50; ++q) {
        const auto query = random_feature(rng);
        bool seen_new = false;
        for (double a = -0.95; a < 0.999; a += 0.01) {
            const auto d = reg.identify(query, a);
            CHECK((d.outcome == Outcome::matched) == (d.best_similarity >= a));
            if (seen_new) CHECK(d.outcome == Outcome::new_device);
            seen_new = seen_new || d.outcome == Outcome::new_device;
        }
    }
}

TEST_CASE("multi-sample unanimity") {
    Registry reg;
    reg.enroll(basis(0), "a");
    reg.enroll(basis(1), "b");
    const std::vector<FeatureVector> one{basis(0)};
    const auto single = reg.identify_multisample(one, 0.7);
    const auto plain = reg.identify(basis(0), 0.7);
    CHECK(single.outcome == plain.outcome);
    CHECK(single.device_id == plain.device_id);
    CHECK(single.best_similarity == plain.best_similarity);

    const std::vector<FeatureVector> same{basis(0), basis(0)};
    CHECK(reg.identify_multisample(same, 0.7).outcome == Outcome::matched);
    const std::vector<FeatureVector> split{basis(0), basis(1)};
    CHECK(reg.identify_multisample(split, 0.7).outcome == Outcome::inconclusive);
    const std::vector<FeatureVector> half{basis(0), basis(9)};
    CHECK(reg.identify_multisample(half, 0.7).outcome == Outcome::inconclusive);
    const std::vector<FeatureVector> none{basis(8), basis(9)};
    CHECK(reg.identify_multisample(none, 0.7).outcome == Outcome::new_device);
    CHECK_THROWS_AS(reg.identify_multisample(std::span<const FeatureVector>{}, 0.7), Error);
}

TEST_CASE("centroid matching is available") {
    Registry reg;
    reg.set_match_target(MatchTarget::centroid);
    reg.enroll(make_feature(std::vector<double>{1, 0, 0}, "t"), "a");
    reg.enroll(make_feature(std::vector<double>{0, 1, 0}, "t"), "a");
    const auto d = reg.identify(make_feature(std::vector<double>{1, 1, 0}, "t"), 0.9);
    CHECK(d.outcome == Outcome::matched);
    CHECK(d.best_similarity == doctest::Approx(1.0));
}

TEST_CASE("journal round trip preserves decisions") {
    const auto path = journal_path("sonicprint_registry.jsonl");
    std::mt19937_64 rng(8);
    std::vector<FeatureVector> queries;
    {
        Registry reg(path);
        for (int i = 0; i < 40; ++i) reg.enroll(random_feature(rng), "dev" + std::to_string(i % 9), "2026-01-01T00:00:00Z");
        for (int i = 0; i < 40; ++i) queries.push_back(random_feature(rng));
    }
    const auto loaded = Registry::load(path);
    CHECK(loaded.feature_count() == 40);
    CHECK(loaded.size() == 9);
    CHECK(loaded.profiles().at("dev0").created_at == "2026-01-01T00:00:00Z");

    // Rebuild an in-memory copy from the same draws and compare decisions.
    std::mt19937_64 again(8);
    Registry memory;
    for (int i = 0; i < 40; ++i) memory.enroll(random_feature(again), "dev" + std::to_string(i % 9));
    for (const auto& q : queries) {
        const auto a = loaded.identify(q, 0.6), b = memory.identify(q, 0.6);
        CHECK(a.outcome == b.outcome);
        CHECK(a.device_id == b.device_id);
        CHECK(a.best_similarity == b.best_similarity);
    }
    CHECK(Registry::load(journal_path("sonicprint_missing.jsonl")).empty());
    std::filesystem::remove(path);
}

TEST_CASE("concurrent readers see consistent answers") {
    std::mt19937_64 rng(3);
    Registry reg;
    for (int i = 0; i < 100; ++i) reg.enroll(random_feature(rng), "d" + std::to_string(i));
    const auto q = random_feature(rng);
    const auto expected = reg.identify(q, 0.5);
    std::vector<std::thread> pool;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 4; ++t)
        pool.emplace_back([&] {
            for (int i = 0; i < 50; ++i)
                if (reg.identify(q, 0.5).device_id != expected.device_id) ++mismatches;
        });
    for (auto& t : pool) t.join();
    CHECK(mismatches == 0);
}

TEST_CASE("LSH degenerate and trivial cases") {
    Registry empty;
    CHECK_THROWS_AS(LshIndex::build(empty), Error);

    Registry one;
    const auto f = basis(4);
    one.enroll(f, "only");
    const auto idx = LshIndex::build(one);
    const auto a = idx.query(f, 0.7), b = one.identify(f, 0.7);
    CHECK(a.outcome == b.outcome);
    CHECK(a.device_id == b.device_id);
    CHECK(a.best_similarity == b.best_similarity);

    std::mt19937_64 rng(12);
    Registry many;
    for (int i = 0; i < 60; ++i) many.enroll(random_feature(rng), "d" + std::to_string(i % 13));
    const auto flat = LshIndex::build(many, 0, 1);
    for (int i = 0; i < 30; ++i) {
        const auto q = random_feature(rng);
        CHECK(flat.candidates(q).size() == 60);
        const auto x = flat.query(q, 0.5), y = many.identify(q, 0.5);
        CHECK(x.device_id == y.device_id);
        CHECK(x.best_similarity == y.best_similarity);
        REQUIRE(x.runner_up_similarity);
        CHECK(*x.runner_up_similarity == *y.runner_up_similarity);
    }
    CHECK_THROWS_AS(LshIndex::build(many, 65, 1), Error);
}

TEST_CASE("LSH agrees with brute force on the simulated fleet") {
    Fleet fleet;
    Registry reg;
    for (std::size_t k = 0; k < 50; ++k) reg.enroll(fleet.capture(k, 0), fleet.models[k].device_label);
    const auto idx = LshIndex::build(reg);
    CHECK(idx.planes() == 12);
    CHECK(idx.tables() == 8);
    int agree = 0;
    for (std::size_t q = 0; q < 500; ++q) {
        const auto probe = fleet.capture(q % 50, 1 + q / 50);
        const auto a = idx.query(probe, 0.7), b = reg.identify(probe, 0.7);
        if (a.outcome == b.outcome && (a.outcome != Outcome::matched || a.device_id == b.device_id)) ++agree;
    }
    CHECK(agree >= 495);
}
