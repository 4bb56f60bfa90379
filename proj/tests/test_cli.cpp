#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "sonicprint/cli.hpp"

using namespace sonicprint;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"sonicprint"};
    storage.insert(storage.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("sonicprint-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("synth, extract, enroll, match") {
    TempDir dir;
    const auto wav = dir / "stim.wav", feat = dir / "f.jsonl", reg = dir / "reg.jsonl";

    auto r = cli({"synth", "-o", wav, "--dur", "0.5", "--json"});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out)["output"] == wav);
    CHECK(fs::file_size(wav) == 44 + 2 * 22050);

    r = cli({"extract", "-i", wav, "-o", feat, "--label", "desk"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.find("71-point") != std::string::npos);

    r = cli({"match", "-r", reg, "-i", feat});
    REQUIRE(r.code == kExitOk);
    auto d = json::parse(r.out);
    CHECK(d["outcome"] == "new_device");
    CHECK(d["best_similarity"].is_null());
    CHECK(d["device_id"].is_null());

    r = cli({"enroll", "-r", reg, "-i", feat, "--id", "spk-1"});
    REQUIRE(r.code == kExitOk);

    for (const char* method : {"", "--lsh"}) {
        std::string m = method;
        r = m.empty() ? cli({"match", "-r", reg, "-i", feat, "--alpha", "0.7"})
                      : cli({"match", "-r", reg, "-i", feat, "--alpha", "0.7", "--lsh"});
        REQUIRE(r.code == kExitOk);
        d = json::parse(r.out);
        CHECK(d["outcome"] == "matched");
        CHECK(d["device_id"] == "spk-1");
        CHECK(d["best_similarity"].get<double>() == doctest::Approx(1.0));
        CHECK(d["threshold"].get<double>() == doctest::Approx(0.7));
    }

    r = cli({"match", "-r", reg, "-i", feat, "--samples", "2"});
    CHECK(r.code == kExitDomainError);
    CHECK(json::parse(r.err).contains("error"));
}

TEST_CASE("analyze reproduces the reference error curve") {
    auto r = cli({"analyze", "--alpha-grid", "0.68:0.70:0.01"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    std::string header, row0, row1, row2;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    std::getline(in, row2);
    CHECK(header == "alpha,fp,fn,total");
    CHECK(row1.rfind("0.6900,", 0) == 0);
    const double total = std::stod(row1.substr(row1.rfind(',') + 1));
    CHECK(total == doctest::Approx(1.5486e-4).epsilon(1e-3));
    CHECK(row2.rfind("0.7000,1.48569", 0) == 0);

    TempDir dir;
    r = cli({"analyze", "--samples", "2", "-o", dir / "curve.csv", "--json"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["optimal_alpha"].get<double>() == doctest::Approx(0.6824).epsilon(1e-3));
    CHECK(j["entropy_bits"].get<double>() == doctest::Approx(26.107).epsilon(1e-3));
    CHECK(slurp(dir / "curve.csv").rfind("alpha,fp,fn,total,multi_k2\n0.5000,", 0) == 0);

    CHECK(cli({"analyze", "--alpha-grid", "0.5:oops"}).code == kExitDomainError);
}

TEST_CASE("snr") {
    auto r = cli({"snr", "--alpha", "0.7", "--json"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["feasible"] == true);
    CHECK(j["linear"].get<double>() == doctest::Approx(10.366865586814425));
    CHECK(j["db"].get<double>() == doctest::Approx(10.15647467660263));

    r = cli({"snr", "--alpha", "0.7"});
    CHECK(r.out == "alpha 0.7: SNR >= 10.3669 (10.16 dB)\n");

    r = cli({"snr", "--alpha", "1.5", "--json"});
    CHECK(r.code == kExitOk);
    CHECK(json::parse(r.out)["feasible"] == false);
}

TEST_CASE("simulate, fit, analyze chain") {
    TempDir dir;
    const auto csv = dir / "sims.csv";
    auto r = cli({"simulate", "--devices", "8", "--samples", "10", "--seed", "3", "--sims-csv", csv, "-o",
                  dir / "report.json"});
    REQUIRE(r.code == kExitOk);
    const auto rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep["query_count"] == 8 * 9);
    CHECK(rep["self_pairs"] == 8 * 45);
    CHECK(rep["cross_pairs"] == 28 * 100);
    CHECK(slurp(csv).rfind("self,cross\n", 0) == 0);

    REQUIRE(cli({"fit", "-i", csv, "--column", "self", "-o", dir / "self.json"}).code == kExitOk);
    REQUIRE(cli({"fit", "-i", csv, "--column", "cross", "-o", dir / "corr.json"}).code == kExitOk);
    const auto fs_ = json::parse(slurp(dir / "self.json"));
    CHECK(fs_["mu"].get<double>() < -2.5);
    r = cli({"analyze", "--fit-self", dir / "self.json", "--fit-corr", dir / "corr.json", "-o", dir / "c.csv",
             "--json"});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out)["optimal_alpha"].get<double>() > 0.5);

    CHECK(cli({"fit", "-i", csv, "--column", "nope"}).code == kExitDomainError);
}

TEST_CASE("outputs are byte-identical across runs") {
    TempDir dir;
    for (int k = 0; k < 2; ++k) {
        const auto tag = std::to_string(k);
        REQUIRE(cli({"synth", "-o", dir / ("s" + tag + ".wav"), "--dur", "0.2"}).code == kExitOk);
        REQUIRE(cli({"simulate", "--devices", "4", "--samples", "5", "--seed", "9", "--features",
                     dir / ("f" + tag + ".jsonl"), "-o", dir / ("r" + tag + ".json")})
                    .code == kExitOk);
        REQUIRE(cli({"stability", "--samples", "4", "--seed", "9", "-o", dir / ("m" + tag + ".csv")}).code ==
                kExitOk);
    }
    for (const char* stem : {"s%.wav", "f%.jsonl", "r%.json", "m%.csv"}) {
        std::string a = stem, b = stem;
        a.replace(a.find('%'), 1, "0");
        b.replace(b.find('%'), 1, "1");
        CHECK(slurp(dir / a) == slurp(dir / b));
        CHECK(!slurp(dir / a).empty());
    }
}

TEST_CASE("exit codes") {
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"synth"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
    CHECK(cli({"synth", "-o", "x.wav", "--phase", "square"}).code == kExitUsage);

    auto r = cli({"extract", "-i", "/nonexistent/rec.wav", "-o", "/nonexistent/f.jsonl"});
    CHECK(r.code == kExitDomainError);
    CHECK(json::parse(r.err)["error"].is_string());

    TempDir dir;
    r = cli({"synth", "-o", dir / "bad.wav", "--start", "14050"});
    CHECK(r.code == kExitDomainError);
    CHECK(!fs::exists(dir / "bad.wav"));
}
