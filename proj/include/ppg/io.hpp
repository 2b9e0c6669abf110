#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ppg/features.hpp"
#include "ppg/harmonics.hpp"
#include "ppg/ibi_analysis.hpp"
#include "ppg/predictor.hpp"
#include "ppg/prototype.hpp"
#include "ppg/segmentation.hpp"
#include "ppg/synth.hpp"
#include "ppg/timeseries.hpp"

namespace ppg::io {

// ppg.csv: header "time_s,value". Sampling must be uniform.
UniformSeries read_ppg_csv(const std::filesystem::path& path);
void write_ppg_csv(const std::filesystem::path& path, const UniformSeries& s);

// rpeaks.csv: header "time_s".
EventTrain read_rpeaks_csv(const std::filesystem::path& path);
void write_rpeaks_csv(const std::filesystem::path& path, const EventTrain& t);

// epochs.csv: header "start_s,end_s,label".
std::vector<Epoch> read_epochs_csv(const std::filesystem::path& path);
void write_epochs_csv(const std::filesystem::path& path, const std::vector<Epoch>& epochs);

nlohmann::json prototype_to_json(const Prototype& p, const std::string& subject);
Prototype prototype_from_json(const nlohmann::json& j, std::string* subject = nullptr);

nlohmann::json fit_to_json(const HarmonicFit& fit);
nlohmann::json markers_to_json(const MarkerSet& m, const std::string& subject,
                               SegmentationMethod method, double median_ibi,
                               bool deviant);
nlohmann::json evaluation_to_json(const EvaluationReport& rep);
nlohmann::json boxplot_to_json(const BoxplotSummary& s);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Round-trip-safe decimal formatting.
std::string format_double(double v);

std::string method_name(SegmentationMethod m);
SegmentationMethod method_from_name(const std::string& name);

// Writes per-subject ppg.csv / rpeaks.csv / epochs.csv under dir/<id>/ plus a
// cohort-level truth.json.
void write_cohort(const std::filesystem::path& dir, const synth::Cohort& cohort);

} // namespace ppg::io
