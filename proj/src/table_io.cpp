#include "afcsim/table_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace afcsim {

using nlohmann::json;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    return in;
}

json load_json(const std::string& path) {
    std::ifstream in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return j;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
            field.erase(field.begin());
        while (!field.empty() && (field.back() == ' ' || field.back() == '\r' ||
                                  field.back() == '\t'))
            field.pop_back();
        out.push_back(field);
    }
    return out;
}

double parse_double(const std::string& text, long line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad number '" + text + "'", line);
    }
}

} // namespace

void write_density_record(const std::string& path, const Matrix4& rho) {
    std::ofstream out = open_out(path);
    auto emit_array = [&](const char* name, bool imag) {
        out << "  \"" << name << "\": [\n";
        for (std::size_t i = 0; i < 4; ++i) {
            out << "    [";
            for (std::size_t j = 0; j < 4; ++j) {
                const cplx v = rho(i, j);
                out << format_g17(imag ? v.imag() : v.real());
                if (j != 3) out << ", ";
            }
            out << (i == 3 ? "]\n" : "],\n");
        }
        out << "  ]";
    };
    out << "{\n";
    emit_array("re", false);
    out << ",\n";
    emit_array("im", true);
    out << "\n}\n";
}

DensityMatrix4 read_density_record(const std::string& path) {
    const json j = load_json(path);
    if (!j.contains("re") || !j.contains("im"))
        throw ParseError("density record " + path + " needs 're' and 'im' arrays");
    Matrix4 m;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 4; ++k)
            m(i, k) = cplx(j.at("re").at(i).at(k).get<double>(),
                           j.at("im").at(i).at(k).get<double>());
    return DensityMatrix4(m);  // validates on load
}

void write_probability_table(const std::string& path, const MeasurementDataset& dataset) {
    std::ofstream out = open_out(path);
    out << "setting_a,setting_b,probability,sigma\n";
    for (const DatasetEntry& e : dataset.entries)
        out << format_setting(e.setting_a) << ',' << format_setting(e.setting_b) << ','
            << format_g17(e.value) << ',' << format_g17(e.sigma) << '\n';
}

MeasurementDataset read_probability_table(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty file " + path);
    ++lineno;
    if (split_csv(line) != std::vector<std::string>{"setting_a", "setting_b", "probability",
                                                    "sigma"})
        throw ParseError("expected header setting_a,setting_b,probability,sigma", lineno);
    MeasurementDataset ds;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw ParseError("expected 4 fields", lineno);
        DatasetEntry e;
        try {
            e.setting_a = parse_setting(f[0]);
            e.setting_b = parse_setting(f[1]);
        } catch (const ParseError& pe) {
            throw ParseError(pe.what(), lineno);
        }
        e.value = parse_double(f[2], lineno);
        e.sigma = parse_double(f[3], lineno);
        ds.entries.push_back(e);
    }
    ds.validate();
    return ds;
}

void write_counts_table(const std::string& path, const std::vector<CoincidenceRecord>& records) {
    std::ofstream out = open_out(path);
    out << "setting_a,setting_b,counts,integration_s\n";
    for (const CoincidenceRecord& r : records)
        out << format_setting(r.setting_a) << ',' << format_setting(r.setting_b) << ','
            << r.counts << ',' << format_g17(r.integration_s) << '\n';
}

std::vector<CoincidenceRecord> read_counts_table(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty file " + path);
    ++lineno;
    if (split_csv(line) !=
        std::vector<std::string>{"setting_a", "setting_b", "counts", "integration_s"})
        throw ParseError("expected header setting_a,setting_b,counts,integration_s", lineno);
    std::vector<CoincidenceRecord> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 4) throw ParseError("expected 4 fields", lineno);
        CoincidenceRecord r;
        try {
            r.setting_a = parse_setting(f[0]);
            r.setting_b = parse_setting(f[1]);
        } catch (const ParseError& pe) {
            throw ParseError(pe.what(), lineno);
        }
        const double counts = parse_double(f[2], lineno);
        if (counts < 0.0 || counts != std::floor(counts))
            throw ParseError("counts must be a non-negative integer", lineno);
        r.counts = static_cast<long long>(counts);
        r.integration_s = parse_double(f[3], lineno);
        out.push_back(r);
    }
    return out;
}

MeasurementDataset read_dataset(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty file " + path);
    in.close();
    const auto fields = split_csv(header);
    if (fields.size() == 4 && fields[2] == "probability") return read_probability_table(path);
    if (fields.size() == 4 && fields[2] == "counts")
        return dataset_from_counts(read_counts_table(path));
    throw ParseError("unrecognized table header in " + path, 1);
}

void write_metrics_record(const std::string& path, const MetricsReport& report,
                          const std::map<std::string, double>& sigmas) {
    std::ofstream out = open_out(path);
    out << "{\n";
    const std::vector<std::pair<std::string, double>> values = {
        {"purity", report.purity},
        {"concurrence", report.concurrence},
        {"eof_normalized", report.eof_normalized},
        {"s_max", report.s_max},
        {"fidelity_phi_plus", report.fidelity_phi_plus},
    };
    bool first = true;
    for (const auto& [name, value] : values) {
        if (!first) out << ",\n";
        first = false;
        out << "  \"" << name << "\": " << format_g17(value);
        const auto it = sigmas.find(name);
        if (it != sigmas.end())
            out << ",\n  \"" << name << "_sigma\": " << format_g17(it->second);
    }
    out << "\n}\n";
}

std::pair<MetricsReport, std::map<std::string, double>> read_metrics_record(
    const std::string& path) {
    const json j = load_json(path);
    MetricsReport r;
    auto need = [&](const char* name) {
        if (!j.contains(name))
            throw ParseError("metrics record " + path + " missing field " + name);
        return j.at(name).get<double>();
    };
    r.purity = need("purity");
    r.concurrence = need("concurrence");
    r.eof_normalized = need("eof_normalized");
    r.s_max = need("s_max");
    r.fidelity_phi_plus = need("fidelity_phi_plus");
    std::map<std::string, double> sigmas;
    for (const auto& [key, value] : j.items())
        if (key.size() > 6 && key.substr(key.size() - 6) == "_sigma")
            sigmas[key.substr(0, key.size() - 6)] = value.get<double>();
    return {r, sigmas};
}

void write_diagnostics_record(const std::string& path, const TomographyResult& result) {
    std::ofstream out = open_out(path);
    out << "{\n";
    out << "  \"objective\": " << format_g17(result.objective_value) << ",\n";
    out << "  \"iterations\": " << result.iterations << ",\n";
    out << "  \"converged\": " << (result.converged ? "true" : "false") << ",\n";
    out << "  \"hessian_condition\": " << format_g17(result.hessian_condition) << ",\n";
    out << "  \"residuals\": [";
    for (std::size_t i = 0; i < result.residuals.size(); ++i)
        out << (i ? ", " : "") << format_g17(result.residuals[i]);
    out << "],\n  \"start_objectives\": [";
    for (std::size_t i = 0; i < result.start_objectives.size(); ++i)
        out << (i ? ", " : "") << format_g17(result.start_objectives[i]);
    out << "]\n}\n";
}

void write_comb_profile_tsv(const std::string& path, const std::vector<double>& detuning_hz,
                            const std::vector<double>& optical_depth) {
    if (detuning_hz.size() != optical_depth.size())
        throw ConfigError("comb profile: column length mismatch");
    std::ofstream out = open_out(path);
    out << "detuning_Hz\toptical_depth\n";
    for (std::size_t i = 0; i < detuning_hz.size(); ++i)
        out << format_g17(detuning_hz[i]) << '\t' << format_g17(optical_depth[i]) << '\n';
}

void write_echo_table_tsv(const std::string& path,
                          const std::vector<std::pair<double, double>>& time_intensity) {
    std::ofstream out = open_out(path);
    out << "time_s\tintensity_fraction\n";
    for (const auto& [t, e] : time_intensity)
        out << format_g17(t) << '\t' << format_g17(e) << '\n';
}

void write_histogram_tsv(const std::string& path, const TimeHistogram& hist) {
    std::ofstream out = open_out(path);
    out << "time_s\tcounts\n";
    for (std::size_t i = 0; i < hist.bins(); ++i)
        out << format_g17(hist.bin_center(i)) << '\t' << hist.counts[i] << '\n';
}

namespace {

MeasurementDataset dataset_from_json(const json& rows, const std::string& which) {
    MeasurementDataset ds;
    for (const auto& row : rows) {
        DatasetEntry e;
        e.setting_a = parse_setting(row.at("a").get<std::string>());
        e.setting_b = parse_setting(row.at("b").get<std::string>());
        e.value = row.at("value").get<double>();
        e.sigma = row.at("sigma").get<double>();
        ds.entries.push_back(e);
    }
    if (ds.entries.empty()) throw ParseError("baseline table " + which + " is empty");
    ds.validate();
    return ds;
}

Table2Row table2_row_from_json(const json& j) {
    Table2Row r;
    auto pair = [&](const char* name, double scale, double& value, double& sigma) {
        const auto& arr = j.at(name);
        value = arr.at(0).get<double>() * scale;
        sigma = arr.at(1).get<double>() * scale;
    };
    pair("purity_percent", 0.01, r.purity, r.purity_sigma);
    pair("concurrence_percent", 0.01, r.concurrence, r.concurrence_sigma);
    pair("eof_percent", 0.01, r.eof, r.eof_sigma);
    pair("s_max", 1.0, r.s_max, r.s_max_sigma);
    pair("fidelity_phi_plus_percent", 0.01, r.fidelity_phi_plus, r.fidelity_phi_plus_sigma);
    return r;
}

} // namespace

PaperBaseline read_paper_baseline(const std::string& path) {
    const json j = load_json(path);
    PaperBaseline b;
    b.pin = dataset_from_json(j.at("table1").at("pin"), "pin");
    b.pout = dataset_from_json(j.at("table1").at("pout"), "pout");
    b.rho_in = table2_row_from_json(j.at("table2").at("rho_in"));
    b.rho_out = table2_row_from_json(j.at("table2").at("rho_out"));
    b.io_fidelity = j.at("table2").at("io_fidelity_percent").at(0).get<double>() * 0.01;
    b.io_fidelity_sigma = j.at("table2").at("io_fidelity_percent").at(1).get<double>() * 0.01;
    return b;
}

std::string data_dir() {
    if (const char* env = std::getenv("AFCSIM_DATA_DIR")) return env;
    if (std::filesystem::exists("data/paper_baseline.json")) return "data";
#ifdef AFCSIM_SOURCE_DATA_DIR
    return AFCSIM_SOURCE_DATA_DIR;
#else
    return "data";
#endif
}

} // namespace afcsim
