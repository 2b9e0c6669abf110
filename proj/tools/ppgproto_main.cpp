// ppgproto: PPG prototype analysis pipeline.
// Subcommands: synth, prototype, harmonics, features, predict.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ppg/harmonics.hpp"
#include "ppg/ibi_analysis.hpp"
#include "ppg/io.hpp"
#include "ppg/pipeline.hpp"
#include "ppg/predictor.hpp"
#include "ppg/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ppg;

namespace {

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::insufficient_events:
        case ErrorCode::empty_result:
            return 3;
        case ErrorCode::io:
            return 4;
        default:
            return 2;
    }
}

fs::path resolve_out(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("PPGPROTO_OUT")) return env;
    return ".";
}

std::ofstream open_csv(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open for writing: " + path.string());
    return out;
}

// ---------------------------------------------------------------- synth ----

synth::CohortSpec cohort_spec_from_config(const json& cfg) {
    synth::CohortSpec spec;
    spec.n_subjects = cfg.value("n_subjects", spec.n_subjects);
    spec.seed = cfg.value("seed", spec.seed);
    spec.duration = cfg.value("duration_s", spec.duration);
    spec.sample_rate = cfg.value("sample_rate_hz", spec.sample_rate);
    spec.k1 = cfg.value("k1_s", spec.k1);
    spec.k2 = cfg.value("k2", spec.k2);
    spec.d_noise_sigma = cfg.value("d_noise_sigma_s", spec.d_noise_sigma);
    spec.ibi_jitter = cfg.value("ibi_jitter", spec.ibi_jitter);
    spec.noise_sigma = cfg.value("noise_sigma", spec.noise_sigma);
    spec.breath_hold_epochs = cfg.value("breath_hold_epochs", spec.breath_hold_epochs);
    spec.plant_ibi_warp = cfg.value("plant_ibi_warp", spec.plant_ibi_warp);
    spec.high_ibi_offset = cfg.value("high_ibi_offset_s", spec.high_ibi_offset);
    spec.warp_d_shift = cfg.value("warp_d_shift_s", spec.warp_d_shift);
    if (spec.n_subjects < 2) {
        fail(ErrorCode::config, "config: n_subjects must be at least 2");
    }
    return spec;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    json cfg = json::object();
    if (!config_path.empty()) cfg = io::read_json(config_path);
    const synth::CohortSpec spec = cohort_spec_from_config(cfg);
    const synth::Cohort cohort = synth::generate_cohort(spec);
    io::write_cohort(resolve_out(out_dir), cohort);
    std::cout << "wrote " << cohort.subjects.size() << " subjects to "
              << resolve_out(out_dir).string() << "\n";
    return 0;
}

// ------------------------------------------------------------ prototype ----

void write_prototype_outputs(const fs::path& dir, const std::string& stem,
                             const std::string& subject, const CycleSet& cycles,
                             SegmentationMethod method, bool normalize) {
    Prototype proto = build_prototype(cycles, method);
    // Recompute the band quartiles for the plot file.
    std::vector<std::vector<double>> waves;
    for (const auto& c : cycles.cycles) waves.push_back(c.waveform);
    const MedianIqr stats = pointwise_median_iqr(waves);

    if (normalize) {
        double peak = 0.0;
        for (double v : proto.waveform) peak = std::max(peak, std::abs(v));
        if (peak > 0.0) {
            for (double& v : proto.waveform) v /= peak;
            for (double& v : proto.iqr) v /= peak;
        }
    }

    json j = io::prototype_to_json(proto, subject);
    if (method == SegmentationMethod::ecg_based) {
        const DeviantVerdict verdict = detect_deviant(proto);
        j["deviant"] = verdict.deviant;
        if (verdict.deviant) j["deviant_reason"] = verdict.reason;
        std::cout << stem << ": " << (verdict.deviant ? "DEVIANT" : "typical") << " ("
                  << proto.n_cycles << " cycles)\n";
    } else {
        std::cout << stem << ": " << proto.n_cycles << " cycles\n";
    }
    io::write_json(dir / (stem + ".json"), j);

    auto csv = open_csv(dir / (stem + ".csv"));
    csv << "k,median,q1,q3\n";
    for (std::size_t k = 0; k < proto.waveform.size(); ++k) {
        csv << k << ',' << io::format_double(proto.waveform[k]) << ','
            << io::format_double(stats.q1[k]) << ',' << io::format_double(stats.q3[k])
            << '\n';
    }
}

int cmd_prototype(const std::string& ppg_path, const std::string& rpeaks_path,
                  const std::string& epochs_path, const std::string& subject,
                  const std::string& method_name, int grid, double rej_low,
                  double rej_high, const std::string& label, bool ibi_bins,
                  bool normalize, const std::string& out_dir) {
    const UniformSeries series = io::read_ppg_csv(ppg_path);
    const SegmentationMethod method =
        method_name == "ecg" ? SegmentationMethod::ecg_based
                             : SegmentationMethod::ppg_blind;

    CycleSet cycles;
    if (method == SegmentationMethod::ecg_based) {
        if (rpeaks_path.empty()) fail(ErrorCode::config, "--rpeaks required for method ecg");
        cycles = segment_by_ecg(series, io::read_rpeaks_csv(rpeaks_path), grid);
    } else {
        cycles = segment_by_ppg(series, grid);
    }
    if (!epochs_path.empty()) {
        cycles = label_cycles(cycles, io::read_epochs_csv(epochs_path));
    }
    const RejectionResult rej = reject_outlier_cycles(cycles, rej_low, rej_high);
    std::cout << "discarded " << rej.discarded << " outlier cycles\n";

    const fs::path dir = resolve_out(out_dir);
    const std::string tag = method == SegmentationMethod::ecg_based ? "ecg" : "blind";
    const std::string base = "prototype_" + subject + "_" + tag;

    if (!label.empty()) {
        const auto [with, without] = partition_by_label(rej.kept, label);
        if (!with.cycles.empty()) {
            write_prototype_outputs(dir, base + "_" + label, subject, with, method,
                                    normalize);
        }
        if (!without.cycles.empty()) {
            write_prototype_outputs(dir, base + "_no_" + label, subject, without, method,
                                    normalize);
        }
    } else if (ibi_bins) {
        const IbiBins bins = bin_by_ibi(rej.kept);
        write_prototype_outputs(dir, base + "_ibi_d", subject, bins.q1, method, normalize);
        write_prototype_outputs(dir, base + "_ibi_n", subject, bins.mid, method, normalize);
        write_prototype_outputs(dir, base + "_ibi_i", subject, bins.q4, method, normalize);
    } else {
        write_prototype_outputs(dir, base, subject, rej.kept, method, normalize);
    }
    return 0;
}

// ------------------------------------------------------------ harmonics ----

int cmd_harmonics(const std::vector<std::string>& proto_paths, int m_max,
                  bool ibi_split, const std::string& out_dir) {
    const fs::path dir = resolve_out(out_dir);
    struct Entry {
        std::string subject;
        Prototype proto;
        std::vector<double> curve;
    };
    std::vector<Entry> entries;
    std::vector<std::vector<double>> waveforms;
    for (const auto& path : proto_paths) {
        Entry e;
        e.proto = io::prototype_from_json(io::read_json(path), &e.subject);
        waveforms.push_back(e.proto.waveform);
        entries.push_back(std::move(e));
    }
    const auto curves = unmodeled_energy_curves(waveforms, m_max);
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].curve = curves[i];

    for (std::size_t i = 0; i < entries.size(); ++i) {
        const fs::path src(proto_paths[i]);
        auto csv = open_csv(dir / ("energy_" + src.stem().string() + ".csv"));
        csv << "order,unmodeled_db\n";
        for (std::size_t m = 0; m < entries[i].curve.size(); ++m) {
            csv << m << ',' << io::format_double(entries[i].curve[m]) << '\n';
        }
    }

    json summary;
    summary["orders"] = json::array();
    for (int m = 0; m <= m_max; ++m) {
        std::vector<double> values;
        for (const auto& e : entries) values.push_back(e.curve[static_cast<std::size_t>(m)]);
        json row{{"order", m}, {"boxplot", io::boxplot_to_json(boxplot_summary(values))}};
        summary["orders"].push_back(std::move(row));
    }

    if (ibi_split) {
        // Outer thirds by median IBI (floor(n/3) lowest and highest).
        std::vector<std::size_t> idx(entries.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return entries[a].proto.median_ibi < entries[b].proto.median_ibi;
        });
        const std::size_t outer = entries.size() / 3;
        if (outer == 0) fail(ErrorCode::insufficient_events, "--ibi-split needs >= 3 prototypes");
        std::vector<std::pair<Prototype, IbiBinTag>> tagged;
        for (std::size_t i = 0; i < outer; ++i) {
            tagged.emplace_back(entries[idx[i]].proto, IbiBinTag::low_ibi);
            tagged.emplace_back(entries[idx[idx.size() - 1 - i]].proto, IbiBinTag::high_ibi);
        }
        std::vector<int> orders;
        for (int m = 0; m <= m_max; ++m) orders.push_back(m);
        const BinnedEnergy binned = energy_by_ibi_bins(tagged, orders);
        json split;
        for (const auto& [m, values] : binned.low) {
            split["low_ibi"][std::to_string(m)] = io::boxplot_to_json(boxplot_summary(values));
        }
        for (const auto& [m, values] : binned.high) {
            split["high_ibi"][std::to_string(m)] = io::boxplot_to_json(boxplot_summary(values));
        }
        summary["ibi_split"] = std::move(split);
    }
    io::write_json(dir / "harmonics_summary.json", summary);
    return 0;
}

// ------------------------------------------------------------- features ----

int cmd_features(const std::vector<std::string>& proto_paths, const std::string& out_dir) {
    const fs::path dir = resolve_out(out_dir);
    auto scatter = open_csv(dir / "features_scatter.csv");
    scatter << "subject,method,ibi_s,m_pos_s,f_pos_s,d_pos_s,z_pos_s,amplitude,d_zm_s,flag\n";
    for (const auto& path : proto_paths) {
        std::string subject;
        const json pj = io::read_json(path);
        const Prototype proto = io::prototype_from_json(pj, &subject);
        const Prototype sm = smoothed(proto);
        const bool deviant = pj.value("deviant", false);
        const fs::path src(path);
        try {
            const MarkerSet m = extract_markers(sm);
            json mj = io::markers_to_json(m, subject, proto.method, proto.median_ibi,
                                          deviant);
            mj["max_slope_pos_s"] = max_slope_position(sm);
            io::write_json(dir / ("markers_" + src.stem().string() + ".json"), mj);
            scatter << subject << ',' << io::method_name(proto.method) << ','
                    << io::format_double(proto.median_ibi) << ','
                    << io::format_double(m.m_pos) << ',' << io::format_double(m.f_pos)
                    << ',' << io::format_double(m.d_pos) << ','
                    << io::format_double(m.z_pos) << ','
                    << io::format_double(m.amplitude) << ','
                    << io::format_double(m.d_zm) << ','
                    << (deviant ? "deviant" : "ok") << '\n';
        } catch (const Error& e) {
            if (e.code() != ErrorCode::undeterminable) throw;
            // Row flagged, not dropped.
            scatter << subject << ',' << io::method_name(proto.method) << ','
                    << io::format_double(proto.median_ibi)
                    << ",,,,,,,undeterminable\n";
            std::cerr << "warning: " << path << ": " << e.what() << "\n";
        }
    }
    return 0;
}

// -------------------------------------------------------------- predict ----

int cmd_predict(const std::vector<std::string>& marker_paths, const std::string& out_dir) {
    const fs::path dir = resolve_out(out_dir);
    struct Row {
        std::optional<double> d;
        std::optional<double> d_zm;
    };
    std::map<std::string, Row> rows;
    for (const auto& path : marker_paths) {
        const json j = io::read_json(path);
        const std::string subject = j.value("subject", std::string{});
        const std::string method = j.value("method", std::string{});
        if (method == "ecg_based") {
            rows[subject].d = j.at("m_pos_s").get<double>();
        } else if (method == "ppg_blind") {
            rows[subject].d_zm = j.at("d_zm_s").get<double>();
        }
    }
    std::vector<PredictorSample> samples;
    for (const auto& [subject, row] : rows) {
        if (row.d && row.d_zm) samples.push_back({subject, *row.d, *row.d_zm, {}});
    }
    if (samples.size() < 2) {
        fail(ErrorCode::insufficient_events,
             "predict: need d and d_zm for at least 2 subjects");
    }

    const EvaluationReport baseline = evaluate(std::nullopt, samples);
    json report;
    report["n"] = samples.size();
    report["baseline"] = io::evaluation_to_json(baseline);
    bool has_model = false;
    try {
        const LinearPredictor model = fit_predictor(samples);
        const EvaluationReport rep = evaluate(model, samples);
        report["k1_s"] = model.k1;
        report["k2"] = model.k2;
        report["model"] = io::evaluation_to_json(rep);
        has_model = true;

        auto csv = open_csv(dir / "cdf_model.csv");
        csv << "error_s,fraction\n";
        for (const auto& [e, f] : rep.cdf) {
            csv << io::format_double(e) << ',' << io::format_double(f) << '\n';
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::rank_deficient) throw;
        std::cerr << "warning: " << e.what() << "; reporting the constant baseline only\n";
        report["warning"] = "rank-deficient fit; baseline only";
    }
    auto csv = open_csv(dir / "cdf_baseline.csv");
    csv << "error_s,fraction\n";
    for (const auto& [e, f] : baseline.cdf) {
        csv << io::format_double(e) << ',' << io::format_double(f) << '\n';
    }
    io::write_json(dir / "predictor_report.json", report);
    if (has_model) {
        std::cout << "model sigma " << report["model"]["sigma_s"].get<double>()
                  << " s, baseline sigma " << report["baseline"]["sigma_s"].get<double>()
                  << " s\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PPG waveform prototype analysis"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic cohort");
    synth_cmd->add_option("--config", config_path, "cohort config JSON");
    synth_cmd->add_option("--out", out_dir, "output directory");

    std::string ppg_path, rpeaks_path, epochs_path, subject = "subject",
                method = "ecg", label;
    int grid = 100;
    double rej_low = 0.7, rej_high = 1.3;
    bool ibi_bins = false, normalize = false;
    auto* proto_cmd = app.add_subcommand("prototype", "build prototype waveforms");
    proto_cmd->add_option("--ppg", ppg_path, "ppg.csv path")->required();
    proto_cmd->add_option("--rpeaks", rpeaks_path, "rpeaks.csv path");
    proto_cmd->add_option("--epochs", epochs_path, "epochs.csv path");
    proto_cmd->add_option("--subject", subject, "subject id");
    proto_cmd->add_option("--method", method, "ecg | blind")
        ->check(CLI::IsMember({"ecg", "blind"}));
    proto_cmd->add_option("--grid", grid, "samples per cycle (N_s)");
    proto_cmd->add_option("--reject-low", rej_low, "low IBI rejection ratio");
    proto_cmd->add_option("--reject-high", rej_high, "high IBI rejection ratio");
    proto_cmd->add_option("--labels", label, "partition by this condition label");
    proto_cmd->add_flag("--bins", ibi_bins, "emit D/N/I prototypes by IBI quartile");
    proto_cmd->add_flag("--normalize", normalize, "amplitude-normalize outputs");
    proto_cmd->add_option("--out", out_dir, "output directory");

    std::vector<std::string> proto_paths;
    int m_max = 10;
    bool ibi_split = false;
    auto* harm_cmd = app.add_subcommand("harmonics", "unmodeled-energy analysis");
    harm_cmd->add_option("prototypes", proto_paths, "prototype JSON files")->required();
    harm_cmd->add_option("--m-max", m_max, "maximum harmonic order");
    harm_cmd->add_flag("--ibi-split", ibi_split, "split outer IBI thirds");
    harm_cmd->add_option("--out", out_dir, "output directory");

    std::vector<std::string> feat_paths;
    auto* feat_cmd = app.add_subcommand("features", "extract prototype markers");
    feat_cmd->add_option("prototypes", feat_paths, "prototype JSON files")->required();
    feat_cmd->add_option("--out", out_dir, "output directory");

    std::vector<std::string> marker_paths;
    auto* pred_cmd = app.add_subcommand("predict", "fit the R-peak position predictor");
    pred_cmd->add_option("markers", marker_paths, "marker JSON files")->required();
    pred_cmd->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) return cmd_synth(config_path, out_dir);
        if (proto_cmd->parsed()) {
            return cmd_prototype(ppg_path, rpeaks_path, epochs_path, subject, method,
                                 grid, rej_low, rej_high, label, ibi_bins, normalize,
                                 out_dir);
        }
        if (harm_cmd->parsed()) return cmd_harmonics(proto_paths, m_max, ibi_split, out_dir);
        if (feat_cmd->parsed()) return cmd_features(feat_paths, out_dir);
        if (pred_cmd->parsed()) return cmd_predict(marker_paths, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
