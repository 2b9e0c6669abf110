#include "ppg/pipeline.hpp"

#include "ppg/harmonics.hpp"
#include "ppg/segmentation.hpp"

namespace ppg {

Prototype smoothed(const Prototype& p) {
    Prototype out = p;
    out.waveform = smooth(p.waveform);
    return out;
}

SubjectResult process_subject(const std::string& subject, const UniformSeries& ppg,
                              const EventTrain& rpeaks, const PipelineOptions& opts) {
    SubjectResult r;
    r.subject = subject;

    const CycleSet ecg_cycles =
        reject_outlier_cycles(segment_by_ecg(ppg, rpeaks, opts.grid_size),
                              opts.reject_low, opts.reject_high)
            .kept;
    const CycleSet blind_cycles =
        reject_outlier_cycles(segment_by_ppg(ppg, opts.grid_size), opts.reject_low,
                              opts.reject_high)
            .kept;

    r.ecg_prototype = build_prototype(ecg_cycles, SegmentationMethod::ecg_based);
    r.blind_prototype = build_prototype(blind_cycles, SegmentationMethod::ppg_blind);
    r.ecg_smoothed = smoothed(r.ecg_prototype);
    r.blind_smoothed = smoothed(r.blind_prototype);
    r.ecg_markers = extract_markers(r.ecg_smoothed);
    r.blind_markers = extract_markers(r.blind_smoothed);
    r.deviant = detect_deviant(r.ecg_prototype);
    return r;
}

PredictorSample predictor_sample(const SubjectResult& r) {
    PredictorSample s;
    s.subject = r.subject;
    s.d = r.ecg_markers.m_pos;
    s.d_zm = r.blind_markers.d_zm;
    s.extras["f_minus_m"] = r.blind_markers.f_pos - r.blind_markers.m_pos;
    s.extras["d_minus_f"] = r.blind_markers.d_pos - r.blind_markers.f_pos;
    s.extras["max_slope_pos"] =
        max_slope_position(r.blind_smoothed) - r.blind_markers.m_pos;
    return s;
}

} // namespace ppg
