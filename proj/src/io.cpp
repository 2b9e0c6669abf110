#include "ppg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace ppg::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) { return fmt::format("{}", v); }

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open for reading: " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open for writing: " + path.string());
    return out;
}

double parse_double(const std::string& field, const fs::path& path) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        fail(ErrorCode::io, "bad number '" + field + "' in " + path.string());
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

void expect_header(std::ifstream& in, const std::string& expected, const fs::path& path) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::io, "empty file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) {
        fail(ErrorCode::io, "expected header '" + expected + "' in " + path.string());
    }
}

} // namespace

UniformSeries read_ppg_csv(const fs::path& path) {
    auto in = open_in(path);
    expect_header(in, "time_s,value", path);
    std::vector<double> times, values;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2) fail(ErrorCode::io, "bad row in " + path.string());
        times.push_back(parse_double(fields[0], path));
        values.push_back(parse_double(fields[1], path));
    }
    if (times.size() < 2) fail(ErrorCode::io, "too few samples in " + path.string());
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) fail(ErrorCode::io, "non-increasing times in " + path.string());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = times.front() + dt * static_cast<double>(i);
        if (std::abs(times[i] - expected) > 1e-6 * std::max(1.0, std::abs(expected))) {
            fail(ErrorCode::io, "non-uniform sampling in " + path.string());
        }
    }
    return UniformSeries::create(times.front(), 1.0 / dt, std::move(values));
}

void write_ppg_csv(const fs::path& path, const UniformSeries& s) {
    auto out = open_out(path);
    out << "time_s,value\n";
    for (std::size_t j = 0; j < s.size(); ++j) {
        out << format_double(s.time_at(j)) << ',' << format_double(s.values[j]) << '\n';
    }
}

EventTrain read_rpeaks_csv(const fs::path& path) {
    auto in = open_in(path);
    expect_header(in, "time_s", path);
    std::vector<double> times;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        times.push_back(parse_double(line, path));
    }
    return EventTrain::create(std::move(times));
}

void write_rpeaks_csv(const fs::path& path, const EventTrain& t) {
    auto out = open_out(path);
    out << "time_s\n";
    for (double v : t.times) out << format_double(v) << '\n';
}

std::vector<Epoch> read_epochs_csv(const fs::path& path) {
    auto in = open_in(path);
    expect_header(in, "start_s,end_s,label", path);
    std::vector<Epoch> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) fail(ErrorCode::io, "bad row in " + path.string());
        out.push_back({parse_double(fields[0], path), parse_double(fields[1], path),
                       fields[2]});
    }
    return out;
}

void write_epochs_csv(const fs::path& path, const std::vector<Epoch>& epochs) {
    auto out = open_out(path);
    out << "start_s,end_s,label\n";
    for (const auto& e : epochs) {
        out << format_double(e.start) << ',' << format_double(e.end) << ',' << e.label
            << '\n';
    }
}

std::string method_name(SegmentationMethod m) {
    return m == SegmentationMethod::ecg_based ? "ecg_based" : "ppg_blind";
}

SegmentationMethod method_from_name(const std::string& name) {
    if (name == "ecg_based") return SegmentationMethod::ecg_based;
    if (name == "ppg_blind") return SegmentationMethod::ppg_blind;
    fail(ErrorCode::config, "unknown segmentation method: " + name);
}

json prototype_to_json(const Prototype& p, const std::string& subject) {
    return json{{"subject", subject},
                {"grid_size", p.grid_size},
                {"waveform", p.waveform},
                {"iqr", p.iqr},
                {"n_cycles", p.n_cycles},
                {"median_ibi_s", p.median_ibi},
                {"method", method_name(p.method)},
                {"labels", p.labels}};
}

Prototype prototype_from_json(const json& j, std::string* subject) {
    try {
        Prototype p;
        p.grid_size = j.at("grid_size").get<int>();
        p.waveform = j.at("waveform").get<std::vector<double>>();
        p.iqr = j.at("iqr").get<std::vector<double>>();
        p.n_cycles = j.at("n_cycles").get<std::size_t>();
        p.median_ibi = j.at("median_ibi_s").get<double>();
        p.method = method_from_name(j.at("method").get<std::string>());
        p.labels = j.at("labels").get<std::vector<std::string>>();
        if (subject) *subject = j.value("subject", std::string{});
        return p;
    } catch (const json::exception& e) {
        fail(ErrorCode::io, std::string("bad prototype JSON: ") + e.what());
    }
}

json fit_to_json(const HarmonicFit& fit) {
    return json{{"order", fit.order},
                {"amplitudes", fit.amplitudes},
                {"phases_rad", fit.phases},
                {"unmodeled_energy_db", fit.unmodeled_energy_db}};
}

json markers_to_json(const MarkerSet& m, const std::string& subject,
                     SegmentationMethod method, double median_ibi, bool deviant) {
    return json{{"subject", subject},
                {"method", method_name(method)},
                {"median_ibi_s", median_ibi},
                {"m_pos_s", m.m_pos},
                {"f_pos_s", m.f_pos},
                {"d_pos_s", m.d_pos},
                {"z_pos_s", m.z_pos},
                {"amplitude", m.amplitude},
                {"d_zm_s", m.d_zm},
                {"deviant", deviant}};
}

json evaluation_to_json(const EvaluationReport& rep) {
    json cdf = json::array();
    for (const auto& [e, frac] : rep.cdf) cdf.push_back({e, frac});
    return json{{"sigma_s", rep.sigma},
                {"ci90_s", rep.ci90_width},
                {"mu_d_s", rep.mu_d},
                {"n", rep.errors.size()},
                {"cdf", std::move(cdf)}};
}

json boxplot_to_json(const BoxplotSummary& s) {
    return json{{"q1", s.q1},
                {"median", s.median},
                {"q3", s.q3},
                {"whisker_low", s.whisker_low},
                {"whisker_high", s.whisker_high},
                {"whisker_rule", "1.5_iqr"},
                {"outliers", s.outliers}};
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
    auto in = open_in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::io, "bad JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_cohort(const fs::path& dir, const synth::Cohort& cohort) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    json truth;
    truth["seed"] = cohort.spec.seed;
    truth["k1_s"] = cohort.spec.k1;
    truth["k2"] = cohort.spec.k2;
    truth["d_noise_sigma_s"] = cohort.spec.d_noise_sigma;
    truth["subjects"] = json::array();
    for (const auto& s : cohort.subjects) {
        write_ppg_csv(dir / s.id / "ppg.csv", s.ppg);
        write_rpeaks_csv(dir / s.id / "rpeaks.csv", s.rpeaks);
        write_epochs_csv(dir / s.id / "epochs.csv", s.epochs);
        truth["subjects"].push_back(
            json{{"id", s.id},
                 {"planted_d_s", s.truth.planted_d},
                 {"d_zm_s", s.truth.d_zm},
                 {"f_from_r_s", s.truth.f_from_r},
                 {"d_from_r_s", s.truth.d_from_r},
                 {"markers_frac",
                  {{"m", s.truth.markers.m},
                   {"f", s.truth.markers.f},
                   {"d", s.truth.markers.d},
                   {"z", s.truth.markers.z}}},
                 {"ibis_s", s.truth.ibis}});
    }
    write_json(dir / "truth.json", truth);
}

} // namespace ppg::io
