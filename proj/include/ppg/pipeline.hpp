#pragma once

#include <string>
#include <vector>

#include "ppg/features.hpp"
#include "ppg/predictor.hpp"
#include "ppg/prototype.hpp"

namespace ppg {

struct PipelineOptions {
    int grid_size = 100;
    double reject_low = 0.7;
    double reject_high = 1.3;
};

// Both prototype routes for one subject, plus smoothed markers.
struct SubjectResult {
    std::string subject;
    Prototype ecg_prototype;    // raw median (zero-mean), ECG segmentation
    Prototype blind_prototype;  // raw median, crossing segmentation
    Prototype ecg_smoothed;
    Prototype blind_smoothed;
    MarkerSet ecg_markers;      // from the smoothed ECG prototype
    MarkerSet blind_markers;    // from the smoothed blind prototype
    DeviantVerdict deviant;
};

SubjectResult process_subject(const std::string& subject, const UniformSeries& ppg,
                              const EventTrain& rpeaks,
                              const PipelineOptions& opts = {});

// Cross-method pairing for the R-peak predictor: d from the ECG route,
// d_zm from the blind route.
PredictorSample predictor_sample(const SubjectResult& r);

// Returns a copy with the order-4-harmonic smoothed waveform.
Prototype smoothed(const Prototype& p);

} // namespace ppg
