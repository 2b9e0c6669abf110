#pragma once

#include <string>
#include <vector>

#include "ppg/segmentation.hpp"

namespace ppg {

// Per-subject median cycle waveform with its IQR variability band.
struct Prototype {
    int grid_size = 100;
    std::vector<double> waveform; // zero-mean median
    std::vector<double> iqr;      // >= 0 everywhere
    std::size_t n_cycles = 0;
    SegmentationMethod method = SegmentationMethod::ecg_based;
    double median_ibi = 0.0;      // seconds
    std::vector<std::string> labels;
};

Prototype build_prototype(const CycleSet& cs, SegmentationMethod method);

struct ComparisonReport {
    double max_abs_diff = 0.0;
    double rms_diff = 0.0;
    // Fraction of grid positions with |a - b| <= a.iqr (a's band).
    double in_band_fraction = 0.0;
};

ComparisonReport compare_prototypes(const Prototype& a, const Prototype& b);

struct DeviantVerdict {
    bool deviant = false;
    std::string reason;
    double peak_width = 0.0;   // samples, at half prominence of the smoothed waveform
    double valley_width = 0.0; // samples
    int argmax_index = 0;      // grid index of the smoothed maximum
};

// Deviant iff the smoothed peak is at least width_ratio times as wide as the
// valley AND the maximum sits at grid index 0 (i.e. at the R-peak).
// Requires an ecg_based prototype.
DeviantVerdict detect_deviant(const Prototype& p, double width_ratio = 1.0);

// Fractional circular shift via the DFT phase ramp.
std::vector<double> circular_shift(std::span<const double> waveform, double shift_samples);

// Circularly shifts p so its waveform best matches ref (max cross-correlation,
// parabolic sub-sample refinement). The IQR band is shifted by the nearest
// integer number of samples.
Prototype align_to(const Prototype& ref, const Prototype& p);

} // namespace ppg
