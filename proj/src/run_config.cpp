#include "afcsim/run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "afcsim/table_io.hpp"

namespace afcsim {

using nlohmann::json;

void RunConfig::validate() const {
    source.validate();
    comb.validate();
    chirp.validate();
    memory.validate();
    analyzer_795.validate();
    analyzer_1532.validate();
    detectors.validate();
    if (resamples < 100) throw ConfigError("config: resamples must be >= 100");
    if (integration_in_s <= 0.0 || integration_out_s <= 0.0)
        throw ConfigError("config: integration times must be > 0");
}

namespace {

double need_number(const json& j, const std::string& section, const char* key) {
    if (!j.contains(key)) throw ConfigError("config: missing " + section + "." + key);
    if (!j.at(key).is_number())
        throw ConfigError("config: " + section + "." + key + " must be a number");
    return j.at(key).get<double>();
}

ToothShape parse_shape(const std::string& s) {
    if (s == "sinusoidal") return ToothShape::sinusoidal;
    if (s == "gaussian") return ToothShape::gaussian;
    if (s == "square") return ToothShape::square;
    throw ConfigError("config: unknown tooth_shape '" + s + "'");
}

const char* shape_name(ToothShape s) {
    switch (s) {
        case ToothShape::sinusoidal: return "sinusoidal";
        case ToothShape::gaussian: return "gaussian";
        case ToothShape::square: return "square";
    }
    return "?";
}

AnalyzerKind parse_kind(const std::string& s) {
    if (s == "delay_line") return AnalyzerKind::delay_line;
    if (s == "interferometer") return AnalyzerKind::interferometer;
    throw ConfigError("config: unknown analyzer kind '" + s + "'");
}

const char* kind_name(AnalyzerKind k) {
    return k == AnalyzerKind::delay_line ? "delay_line" : "interferometer";
}

AnalyzerConfig analyzer_from_json(const json& j, const std::string& section) {
    AnalyzerConfig a;
    if (j.contains("kind")) a.kind = parse_kind(j.at("kind").get<std::string>());
    a.interferometer_phase_rad = need_number(j, section, "interferometer_phase_rad");
    a.bin_separation_s = need_number(j, section, "bin_separation_s");
    a.timing_jitter_sigma_s = need_number(j, section, "timing_jitter_sigma_s");
    a.window_half_width_s = need_number(j, section, "window_half_width_s");
    return a;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }

    RunConfig c;
    if (!j.contains("seed") || !j.at("seed").is_number_unsigned())
        throw ConfigError("config: seed is mandatory (unsigned integer)");
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("resamples")) c.resamples = j.at("resamples").get<int>();

    const json& src = j.value("source", json::object());
    c.source.p_deph = need_number(src, "source", "p_deph");
    c.source.p_white = need_number(src, "source", "p_white");
    c.source.rep_rate_hz = need_number(src, "source", "rep_rate_hz");
    c.source.bin_separation_s = need_number(src, "source", "bin_separation_s");
    c.source.pair_rate_hz = need_number(src, "source", "pair_rate_hz");

    const json& comb = j.value("comb", json::object());
    c.comb.delta_hz = need_number(comb, "comb", "delta_hz");
    c.comb.gamma_hz = need_number(comb, "comb", "gamma_hz");
    c.comb.bandwidth_hz = need_number(comb, "comb", "bandwidth_hz");
    c.comb.d1 = need_number(comb, "comb", "d1");
    c.comb.d0 = need_number(comb, "comb", "d0");
    if (comb.contains("tooth_shape"))
        c.comb.tooth_shape = parse_shape(comb.at("tooth_shape").get<std::string>());

    const json& chirp = j.value("chirp", json::object());
    c.chirp.delta_beat_hz = need_number(chirp, "chirp", "delta_beat_hz");
    c.chirp.alpha_hz_per_s = need_number(chirp, "chirp", "alpha_hz_per_s");
    c.chirp.sweep_start_hz = need_number(chirp, "chirp", "sweep_start_hz");
    c.chirp.sweep_end_hz = need_number(chirp, "chirp", "sweep_end_hz");
    c.chirp.cycles = static_cast<int>(need_number(chirp, "chirp", "cycles"));
    c.chirp.prepare_ms = need_number(chirp, "chirp", "prepare_ms");
    c.chirp.wait_ms = need_number(chirp, "chirp", "wait_ms");
    c.chirp.store_ms = need_number(chirp, "chirp", "store_ms");

    const json& mem = j.value("memory", json::object());
    c.memory.eta_system = need_number(mem, "memory", "eta_system");
    c.memory.phase_error_rad = need_number(mem, "memory", "phase_error_rad");
    c.memory.noise_floor = need_number(mem, "memory", "noise_floor");

    const json& an = j.value("analyzers", json::object());
    if (!an.contains("a_795") || !an.contains("b_1532"))
        throw ConfigError("config: analyzers needs a_795 and b_1532 sections");
    c.analyzer_795 = analyzer_from_json(an.at("a_795"), "analyzers.a_795");
    c.analyzer_1532 = analyzer_from_json(an.at("b_1532"), "analyzers.b_1532");

    const json& det = j.value("detectors", json::object());
    c.detectors.eta_795 = need_number(det, "detectors", "eta_795");
    c.detectors.eta_1532 = need_number(det, "detectors", "eta_1532");
    c.detectors.accidental_rate_hz = need_number(det, "detectors", "accidental_rate_hz");

    const json& acq = j.value("acquisition", json::object());
    c.integration_in_s = need_number(acq, "acquisition", "integration_in_s");
    c.integration_out_s = need_number(acq, "acquisition", "integration_out_s");

    c.validate();
    return c;
}

void write_run_config(const std::string& path, const RunConfig& c) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config " + path);
    json j;
    j["seed"] = c.seed;
    j["resamples"] = c.resamples;
    j["source"] = {{"p_deph", c.source.p_deph},
                   {"p_white", c.source.p_white},
                   {"rep_rate_hz", c.source.rep_rate_hz},
                   {"bin_separation_s", c.source.bin_separation_s},
                   {"pair_rate_hz", c.source.pair_rate_hz}};
    j["comb"] = {{"delta_hz", c.comb.delta_hz},
                 {"gamma_hz", c.comb.gamma_hz},
                 {"bandwidth_hz", c.comb.bandwidth_hz},
                 {"d1", c.comb.d1},
                 {"d0", c.comb.d0},
                 {"tooth_shape", shape_name(c.comb.tooth_shape)}};
    j["chirp"] = {{"delta_beat_hz", c.chirp.delta_beat_hz},
                  {"alpha_hz_per_s", c.chirp.alpha_hz_per_s},
                  {"sweep_start_hz", c.chirp.sweep_start_hz},
                  {"sweep_end_hz", c.chirp.sweep_end_hz},
                  {"cycles", c.chirp.cycles},
                  {"prepare_ms", c.chirp.prepare_ms},
                  {"wait_ms", c.chirp.wait_ms},
                  {"store_ms", c.chirp.store_ms}};
    j["memory"] = {{"eta_system", c.memory.eta_system},
                   {"phase_error_rad", c.memory.phase_error_rad},
                   {"noise_floor", c.memory.noise_floor}};
    auto analyzer_json = [](const AnalyzerConfig& a) {
        return json{{"kind", kind_name(a.kind)},
                    {"interferometer_phase_rad", a.interferometer_phase_rad},
                    {"bin_separation_s", a.bin_separation_s},
                    {"timing_jitter_sigma_s", a.timing_jitter_sigma_s},
                    {"window_half_width_s", a.window_half_width_s}};
    };
    j["analyzers"] = {{"a_795", analyzer_json(c.analyzer_795)},
                      {"b_1532", analyzer_json(c.analyzer_1532)}};
    j["detectors"] = {{"eta_795", c.detectors.eta_795},
                      {"eta_1532", c.detectors.eta_1532},
                      {"accidental_rate_hz", c.detectors.accidental_rate_hz}};
    j["acquisition"] = {{"integration_in_s", c.integration_in_s},
                        {"integration_out_s", c.integration_out_s}};
    out << j.dump(2) << '\n';
}

} // namespace afcsim
