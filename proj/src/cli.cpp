#include "sonicprint/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sonicprint/error.hpp"
#include "sonicprint/feature_io.hpp"
#include "sonicprint/features.hpp"
#include "sonicprint/lsh.hpp"
#include "sonicprint/registry.hpp"
#include "sonicprint/seed.hpp"
#include "sonicprint/simbench.hpp"
#include "sonicprint/stats.hpp"
#include "sonicprint/stimulus.hpp"
#include "sonicprint/wav.hpp"

namespace sonicprint {

namespace {

using nlohmann::json;

constexpr std::uint64_t kFallbackSeed = 1;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SONICPRINT_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw Error(std::string("SONICPRINT_SEED is not an unsigned integer: '") + env + "'");
        }
    }
    return kFallbackSeed;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// JSON has no infinities; they become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
}

json fit_to_json(const LognormalFit& f) {
    return {{"mu", f.mu},
            {"sigma", f.sigma},
            {"n", f.n},
            {"excluded", f.excluded},
            {"degenerate", f.degenerate()},
            {"log_likelihood", f.log_likelihood},
            {"ks_statistic", f.ks_statistic}};
}

LognormalFit fit_from_json(const json& j) {
    try {
        LognormalFit f;
        f.mu = j.at("mu").get<double>();
        f.sigma = j.at("sigma").get<double>();
        f.n = j.value("n", std::size_t{0});
        f.excluded = j.value("excluded", std::size_t{0});
        f.log_likelihood = j.value("log_likelihood", 0.0);
        f.ks_statistic = j.value("ks_statistic", 0.0);
        if (!(f.sigma >= 0)) throw Error("fit sigma must be non-negative");
        return f;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed fit: ") + e.what());
    }
}

json decision_to_json(const MatchDecision& d) {
    json j;
    j["outcome"] = to_string(d.outcome);
    j["device_id"] = d.device_id.empty() ? json(nullptr) : json(d.device_id);
    j["best_similarity"] = finite_or_null(d.best_similarity);
    j["threshold"] = d.threshold;
    j["runner_up_similarity"] = d.runner_up_similarity ? finite_or_null(*d.runner_up_similarity) : json(nullptr);
    return j;
}

ThresholdSearch parse_grid(const std::string& text) {
    ThresholdSearch g;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
        throw Error("alpha grid must look like start:stop:step, got '" + text + "'");
    if (!(g.lo < g.hi) || !(g.step > 0)) throw Error("alpha grid needs start < stop and step > 0");
    return g;
}

// Reads one column of a CSV with a header line; empty cells are skipped.
std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": missing header");
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            cells.push_back(cell);
        }
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    const auto header = split(line);
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column) col = i;
    if (col == header.size()) throw Error(path + ": no column named '" + column + "'");

    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cells = split(line);
        if (col >= cells.size() || cells[col].empty()) continue;
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cells[col], &used));
            if (used != cells[col].size()) throw std::invalid_argument("trailing text");
        } catch (const std::exception&) {
            throw Error(path + ":" + std::to_string(lineno) + ": not a number: '" + cells[col] + "'");
        }
    }
    return values;
}

void write_similarity_csv(const std::string& path, const std::vector<double>& self, const std::vector<double>& cross) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "self,cross\n";
    const std::size_t rows = std::max(self.size(), cross.size());
    char buf[32];
    for (std::size_t i = 0; i < rows; ++i) {
        if (i < self.size()) {
            std::snprintf(buf, sizeof buf, "%.12g", self[i]);
            out << buf;
        }
        out << ',';
        if (i < cross.size()) {
            std::snprintf(buf, sizeof buf, "%.12g", cross[i]);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

struct Options {
    bool json_out = false;

    // synth
    StimulusSpec spec;
    std::string phase = "newman";
    std::string output;
    std::string spec_out;

    // extract
    std::string input;
    std::string spec_path;
    std::string label;
    std::string captured_at;

    // enroll / match
    std::string registry;
    std::string device_id;
    double alpha = 0.7;
    int samples = 1;
    bool lsh = false;
    bool centroid = false;
    std::size_t planes = kDefaultLshPlanes;
    std::size_t tables = kDefaultLshTables;

    // simulate / stability
    std::size_t devices = 50;
    std::size_t per_device = 60;
    std::size_t enrolled = 1;
    std::string noise = "silent";
    std::optional<double> snr_db;
    std::optional<std::uint64_t> seed;
    std::string path = "spectral";
    std::string sims_csv;
    std::string features_out;

    // fit / analyze
    std::string column = "self";
    std::string fit_self;
    std::string fit_corr;
    std::string grid = "0.5:0.95:0.001";
};

NoiseProfile make_noise(const Options& o) {
    NoiseProfile n;
    n.kind = noise_kind_from_string(o.noise);
    if (n.kind == NoiseKind::white || n.kind == NoiseKind::metro)
        n.in_band_snr_db = o.snr_db.value_or(n.kind == NoiseKind::metro ? 0.0 : 20.0);
    else if (o.snr_db)
        throw Error("--snr-db only applies to the white and metro profiles");
    return n;
}

int cmd_synth(Options& o, std::ostream& out) {
    o.spec.phase = phase_scheme_from_string(o.phase);
    const auto buf = synthesize(o.spec);
    write_wav(buf, o.output);
    if (!o.spec_out.empty()) write_text(o.spec_out, spec_to_json(o.spec).dump(2) + "\n");
    if (o.json_out) {
        out << json{{"output", o.output},
                    {"spec_id", o.spec.id()},
                    {"tones", o.spec.tone_count()},
                    {"samples", buf.samples.size()},
                    {"papr", papr(buf.samples)}}
                   .dump()
            << '\n';
    } else {
        out << "wrote " << o.output << ": " << o.spec.tone_count() << " tones, " << buf.samples.size() << " samples\n";
    }
    return kExitOk;
}

int cmd_extract(Options& o, std::ostream& out) {
    const StimulusSpec spec = o.spec_path.empty() ? StimulusSpec{} : read_spec(o.spec_path);
    auto f = extract(read_wav(o.input), spec);
    if (!o.label.empty()) f.device_label = o.label;
    if (!o.captured_at.empty()) f.captured_at = o.captured_at;
    std::vector<FeatureVector> fs{f};
    write_features(o.output, fs);
    if (o.json_out)
        out << json{{"output", o.output}, {"spec_id", f.spec_id}, {"dimension", f.size()}}.dump() << '\n';
    else
        out << "wrote " << f.size() << "-point feature to " << o.output << '\n';
    return kExitOk;
}

int cmd_enroll(Options& o, std::ostream& out) {
    auto reg = Registry::load(o.registry);
    const auto feats = read_features(o.input);
    if (feats.empty()) throw Error("no features in '" + o.input + "'");
    const std::string stamp = utc_now();
    for (const auto& f : feats) reg.enroll(f, o.device_id, stamp);
    const auto& profile = reg.profiles().at(o.device_id);
    if (o.json_out)
        out << json{{"device_id", o.device_id},
                    {"enrolled", feats.size()},
                    {"profile_size", profile.enrolled.size()},
                    {"registry_devices", reg.size()}}
                   .dump()
            << '\n';
    else
        out << "enrolled " << feats.size() << " feature(s) under " << o.device_id << " (" << profile.enrolled.size()
            << " total)\n";
    return kExitOk;
}

int cmd_match(Options& o, std::ostream& out) {
    auto reg = Registry::load(o.registry);
    if (o.centroid) reg.set_match_target(MatchTarget::centroid);
    const auto probes = read_features(o.input);
    if (o.samples < 1) throw Error("--samples must be at least 1");
    if (probes.size() < static_cast<std::size_t>(o.samples))
        throw Error("probe file holds " + std::to_string(probes.size()) + " feature(s), " + std::to_string(o.samples) +
                    " requested");
    const std::span<const FeatureVector> qs(probes.data(), static_cast<std::size_t>(o.samples));

    MatchDecision d;
    std::string method = "bruteforce";
    if (o.lsh && !reg.empty()) {
        if (o.centroid) throw Error("--lsh and --centroid cannot be combined");
        method = "lsh";
        const auto index = LshIndex::build(reg, o.planes, o.tables, o.seed.value_or(default_seed()));
        // Same unanimity rule as Registry::identify_multisample.
        std::vector<MatchDecision> each;
        for (const auto& q : qs) each.push_back(index.query(q, o.alpha));
        bool same = true, none = true;
        for (const auto& e : each) {
            same = same && e.outcome == Outcome::matched && e.device_id == each.front().device_id;
            none = none && e.outcome == Outcome::new_device;
        }
        d = each.front();
        for (const auto& e : each)
            if (none ? e.best_similarity > d.best_similarity : e.best_similarity < d.best_similarity) d = e;
        d.outcome = same ? Outcome::matched : none ? Outcome::new_device : Outcome::inconclusive;
        if (d.outcome == Outcome::inconclusive) d.device_id.clear();
    } else {
        d = reg.identify_multisample(qs, o.alpha);
    }
    auto j = decision_to_json(d);
    j["samples"] = o.samples;
    j["method"] = method;
    out << j.dump() << '\n';
    return kExitOk;
}

int cmd_simulate(Options& o, std::ostream& out) {
    const std::uint64_t seed = o.seed.value_or(default_seed());
    ExperimentOptions eo;
    eo.samples_per_device = o.per_device;
    eo.enrolled_per_device = o.enrolled;
    eo.alpha = o.alpha;
    eo.noise = make_noise(o);
    eo.seed = seed;
    if (o.path == "time")
        eo.measurement.path = MeasurementPath::time_domain;
    else if (o.path != "spectral")
        throw Error("--path must be spectral or time");

    const auto cal = FleetCalibration::desk(eo.measurement.spec.tone_count());
    const auto fleet = generate_fleet(o.devices, cal, seed);
    const auto rep = run_experiment(fleet, cal, eo);

    json j;
    j["seed"] = seed;
    j["devices"] = rep.devices;
    j["samples_per_device"] = rep.samples_per_device;
    j["enrolled_per_device"] = o.enrolled;
    j["alpha"] = rep.alpha;
    j["noise"] = {{"kind", to_string(eo.noise.kind)}, {"in_band_snr_db", finite_or_null(eo.noise.in_band_snr_db)}};
    j["path"] = o.path;
    j["query_count"] = rep.query_count;
    j["fp_count"] = rep.fp_count;
    j["fn_count"] = rep.fn_count;
    j["self_pairs"] = rep.self_similarities.size();
    j["cross_pairs"] = rep.cross_similarities.size();
    if (!rep.self_similarities.empty()) j["fit_self"] = fit_to_json(fit_similarities(rep.self_similarities));
    if (rep.cross_similarities.size() > 0) j["fit_corr"] = fit_to_json(fit_similarities(rep.cross_similarities.values));
    j["error_table"] = json::array();
    for (const auto& r : rep.error_table)
        j["error_table"].push_back({{"alpha", r.alpha}, {"fp", r.fp}, {"fn", r.fn}});

    if (!o.output.empty()) write_text(o.output, j.dump(2) + "\n");
    if (!o.sims_csv.empty()) write_similarity_csv(o.sims_csv, rep.self_similarities, rep.cross_similarities.values);
    if (!o.features_out.empty()) write_features(o.features_out, rep.features);

    if (o.json_out || o.output.empty()) {
        json brief = j;
        brief.erase("error_table");
        out << brief.dump() << '\n';
    } else {
        out << "queries " << rep.query_count << ", FP " << rep.fp_count << ", FN " << rep.fn_count << " at alpha "
            << rep.alpha << " (seed " << seed << ")\n";
    }
    return kExitOk;
}

int cmd_fit(Options& o, std::ostream& out) {
    if (o.column != "self" && o.column != "cross") throw Error("--column must be self or cross");
    const auto sims = read_csv_column(o.input, o.column);
    const auto fit = fit_similarities(sims);
    const auto j = fit_to_json(fit);
    if (!o.output.empty()) write_text(o.output, j.dump(2) + "\n");
    if (o.json_out || o.output.empty())
        out << j.dump() << '\n';
    else
        out << o.column << ": mu " << fit.mu << ", sigma " << fit.sigma << " over " << fit.n << " samples ("
            << fit.excluded << " excluded)\n";
    return kExitOk;
}

int cmd_analyze(Options& o, std::ostream& out) {
    auto model = ErrorModel::reference();
    if (!o.fit_self.empty()) model.self = fit_from_json(read_json_file(o.fit_self));
    if (!o.fit_corr.empty()) model.corr = fit_from_json(read_json_file(o.fit_corr));
    if (o.samples < 1) throw Error("--samples must be at least 1");
    auto grid = parse_grid(o.grid);
    if (grid.lo <= -1 || grid.hi >= 1) throw Error("alpha grid must lie within (-1, 1)");

    std::ostringstream csv;
    csv << "alpha,fp,fn,total";
    if (o.samples > 1) csv << ",multi_k" << o.samples;
    csv << '\n';
    const auto steps = static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) {
        const double a = std::round((grid.lo + static_cast<double>(i) * grid.step) * 1e9) / 1e9;
        const double fp = false_positive_rate(model, a), fn = false_negative_rate(model, a);
        csv << fmt("%.4f", a) << ',' << fmt("%.6e", fp) << ',' << fmt("%.6e", fn) << ',' << fmt("%.6e", fp + fn);
        if (o.samples > 1) csv << ',' << fmt("%.6e", multi_sample_error(model, a, o.samples));
        csv << '\n';
    }
    if (!o.output.empty()) write_text(o.output, csv.str());

    const auto best = optimal_threshold(model, o.samples, grid);
    json j{{"samples", o.samples},
           {"optimal_alpha", best.alpha},
           {"optimal_error", best.error},
           {"entropy_bits", best.error > 0 ? json(entropy_bits(best.error)) : json(nullptr)}};
    if (o.output.empty())
        out << csv.str();
    else if (o.json_out)
        out << j.dump() << '\n';
    else
        out << "optimal alpha " << fmt("%.4f", best.alpha) << ", error " << fmt("%.3e", best.error) << '\n';
    return kExitOk;
}

int cmd_snr(Options& o, std::ostream& out) {
    const auto r = snr_requirement(o.alpha);
    if (o.json_out) {
        out << json{{"alpha", o.alpha},
                    {"feasible", r.feasible},
                    {"linear", r.feasible ? json(r.linear) : json(nullptr)},
                    {"db", r.feasible ? finite_or_null(r.db) : json(nullptr)}}
                   .dump()
            << '\n';
    } else if (r.feasible) {
        out << "alpha " << o.alpha << ": SNR >= " << fmt("%.4f", r.linear) << " (" << fmt("%.2f", r.db) << " dB)\n";
    } else {
        out << "alpha " << o.alpha << ": infeasible\n";
    }
    return kExitOk;
}

int cmd_stability(Options& o, std::ostream& out) {
    std::vector<FeatureVector> feats;
    if (!o.input.empty()) {
        feats = read_features(o.input);
    } else {
        const auto cal = FleetCalibration::desk();
        const std::uint64_t seed = o.seed.value_or(default_seed());
        const auto fleet = generate_fleet(2, cal, seed);
        for (std::size_t k = 0; k < fleet.size(); ++k)
            for (std::size_t j = 0; j < o.per_device; ++j)
                feats.push_back(simulate_measurement(fleet[k], cal, make_noise(o), derive_seed(seed, {k, j})));
    }
    if (feats.empty()) throw Error("no features for the stability matrix");
    const auto m = stability_matrix(feats);
    if (o.output.empty()) {
        write_matrix_csv(out, m);
    } else {
        std::ofstream f(o.output);
        if (!f) throw Error("cannot open '" + o.output + "' for writing");
        write_matrix_csv(f, m);
        out << "wrote " << m.n << "x" << m.n << " matrix to " << o.output << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Loudspeaker fingerprinting with an inaudible multi-tone stimulus"};
    app.require_subcommand(1);
    Options o;
    app.add_flag("--json", o.json_out, "Machine-readable output on stdout");

    auto* synth = app.add_subcommand("synth", "Synthesize the multi-tone stimulus as a WAV file");
    synth->add_option("--start", o.spec.f_start, "First tone (Hz)");
    synth->add_option("--end", o.spec.f_end, "Last tone (Hz)");
    synth->add_option("--step", o.spec.spacing, "Tone spacing (Hz)");
    synth->add_option("--dur", o.spec.duration, "Duration (s)");
    synth->add_option("--rate", o.spec.sample_rate, "Sample rate (Hz)");
    synth->add_option("--amp", o.spec.amplitude, "Peak amplitude, fraction of full scale");
    synth->add_option("--phase", o.phase, "zero | newman | random")->check(CLI::IsMember({"zero", "newman", "random"}));
    synth->add_option("--phase-seed", o.spec.phase_seed, "Seed for random phases");
    synth->add_option("-o,--output", o.output, "Output WAV")->required();
    synth->add_option("--spec-out", o.spec_out, "Also write the stimulus spec as JSON");

    auto* ext = app.add_subcommand("extract", "Extract a feature vector from a recording");
    ext->add_option("-i,--input", o.input, "Recording (WAV)")->required();
    ext->add_option("--spec", o.spec_path, "Stimulus spec JSON (default comb when omitted)");
    ext->add_option("-o,--output", o.output, "Feature JSON-lines output")->required();
    ext->add_option("--label", o.label, "Device label stored with the feature");
    ext->add_option("--captured-at", o.captured_at, "Capture timestamp stored with the feature");

    auto* enroll = app.add_subcommand("enroll", "Append features to a device profile");
    enroll->add_option("-r,--registry", o.registry, "Registry journal (JSON lines)")->required();
    enroll->add_option("-i,--input", o.input, "Feature JSON-lines file")->required();
    enroll->add_option("--id", o.device_id, "Device id")->required();

    auto* match = app.add_subcommand("match", "Identify a probe feature against the registry");
    match->add_option("-r,--registry", o.registry, "Registry journal (JSON lines)")->required();
    match->add_option("-i,--input", o.input, "Probe feature JSON-lines file")->required();
    match->add_option("--alpha", o.alpha, "Similarity threshold");
    match->add_option("--samples", o.samples, "Number of probe samples (unanimity rule)");
    match->add_flag("--lsh", o.lsh, "Search with the LSH index");
    match->add_option("--planes", o.planes, "LSH hyperplanes per table");
    match->add_option("--tables", o.tables, "LSH tables");
    match->add_option("--seed", o.seed, "LSH seed");
    match->add_flag("--centroid", o.centroid, "Match against profile centroids");

    auto* sim = app.add_subcommand("simulate", "Run the simulated fleet experiment");
    sim->add_option("--devices", o.devices, "Number of simulated speakers");
    sim->add_option("--samples", o.per_device, "Captures per speaker");
    sim->add_option("--enrolled", o.enrolled, "Enrolled captures per speaker");
    sim->add_option("--alpha", o.alpha, "Similarity threshold");
    sim->add_option("--noise", o.noise, "silent | white | office | street | metro");
    sim->add_option("--snr-db", o.snr_db, "In-band SNR for white / metro noise");
    sim->add_option("--seed", o.seed, "Master seed (default: $SONICPRINT_SEED or 1)");
    sim->add_option("--path", o.path, "spectral | time");
    sim->add_option("-o,--output", o.output, "Report JSON");
    sim->add_option("--sims-csv", o.sims_csv, "Write self/cross similarities as CSV");
    sim->add_option("--features", o.features_out, "Write all simulated features as JSON lines");

    auto* fit = app.add_subcommand("fit", "Fit a lognormal to 1 - similarity");
    fit->add_option("-i,--input", o.input, "Similarity CSV")->required();
    fit->add_option("--column", o.column, "self | cross");
    fit->add_option("-o,--output", o.output, "Fit JSON");

    auto* analyze = app.add_subcommand("analyze", "Error-rate curve from two lognormal fits");
    analyze->add_option("--fit-self", o.fit_self, "Same-device fit JSON (default: reference fit)");
    analyze->add_option("--fit-corr", o.fit_corr, "Cross-device fit JSON (default: reference fit)");
    analyze->add_option("--alpha-grid", o.grid, "start:stop:step");
    analyze->add_option("--samples", o.samples, "Samples per identification");
    analyze->add_option("-o,--output", o.output, "Error curve CSV");

    auto* snr = app.add_subcommand("snr", "Minimum in-band SNR for a threshold");
    snr->add_option("--alpha", o.alpha, "Similarity threshold");

    auto* stab = app.add_subcommand("stability", "Pairwise similarity matrix as CSV");
    stab->add_option("-i,--input", o.input, "Features (default: simulate two speakers)");
    stab->add_option("--samples", o.per_device, "Captures per simulated speaker");
    stab->add_option("--noise", o.noise, "Noise profile for simulated captures");
    stab->add_option("--snr-db", o.snr_db, "In-band SNR for white / metro noise");
    stab->add_option("--seed", o.seed, "Master seed");
    stab->add_option("-o,--output", o.output, "Matrix CSV");

    for (auto* sub : app.get_subcommands({})) sub->add_flag("--json", o.json_out, "Machine-readable output on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(o, out);
        if (ext->parsed()) return cmd_extract(o, out);
        if (enroll->parsed()) return cmd_enroll(o, out);
        if (match->parsed()) return cmd_match(o, out);
        if (sim->parsed()) return cmd_simulate(o, out);
        if (fit->parsed()) return cmd_fit(o, out);
        if (analyze->parsed()) return cmd_analyze(o, out);
        if (snr->parsed()) return cmd_snr(o, out);
        if (stab->parsed()) return cmd_stability(o, out);
    } catch (const std::exception& e) {
        err << json{{"error", e.what()}}.dump() << '\n';
        return kExitDomainError;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace sonicprint
