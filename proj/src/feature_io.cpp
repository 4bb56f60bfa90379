#include "sonicprint/feature_io.hpp"

#include <fstream>
#include <string>

#include "sonicprint/error.hpp"

namespace sonicprint {

namespace {

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

nlohmann::json feature_to_json(const FeatureVector& feature) {
    nlohmann::json j;
    j["spec_id"] = feature.spec_id;
    j["device_label"] = feature.device_label ? nlohmann::json(*feature.device_label) : nlohmann::json(nullptr);
    j["captured_at"] = feature.captured_at ? nlohmann::json(*feature.captured_at) : nlohmann::json(nullptr);
    j["values"] = feature.values;
    return j;
}

FeatureVector feature_from_json(const nlohmann::json& j) {
    try {
        FeatureVector f;
        f.spec_id = j.at("spec_id").get<std::string>();
        f.values = j.at("values").get<std::vector<double>>();
        f.device_label = optional_string(j, "device_label");
        f.captured_at = optional_string(j, "captured_at");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed feature record: ") + e.what());
    }
}

void write_features(const std::filesystem::path& path, std::span<const FeatureVector> features) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    for (const auto& f : features) out << feature_to_json(f).dump() << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<FeatureVector> read_features(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<FeatureVector> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(feature_from_json(j));
    }
    return out;
}

nlohmann::json spec_to_json(const StimulusSpec& spec) {
    return {{"f_start", spec.f_start},       {"f_end", spec.f_end},
            {"spacing", spec.spacing},       {"duration", spec.duration},
            {"sample_rate", spec.sample_rate}, {"amplitude", spec.amplitude},
            {"phase", to_string(spec.phase)}, {"phase_seed", spec.phase_seed}};
}

StimulusSpec spec_from_json(const nlohmann::json& j) {
    StimulusSpec s;
    try {
        s.f_start = j.value("f_start", s.f_start);
        s.f_end = j.value("f_end", s.f_end);
        s.spacing = j.value("spacing", s.spacing);
        s.duration = j.value("duration", s.duration);
        s.sample_rate = j.value("sample_rate", s.sample_rate);
        s.amplitude = j.value("amplitude", s.amplitude);
        s.phase = phase_scheme_from_string(j.value("phase", to_string(s.phase)));
        s.phase_seed = j.value("phase_seed", s.phase_seed);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed stimulus spec: ") + e.what());
    }
    s.validate();
    return s;
}

StimulusSpec read_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        return spec_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace sonicprint
