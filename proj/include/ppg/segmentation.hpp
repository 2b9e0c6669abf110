#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ppg/timeseries.hpp"

namespace ppg {

enum class SegmentationMethod { ecg_based, ppg_blind };

struct Epoch {
    double start = 0.0;
    double end = 0.0;
    std::string label;
};

struct Cycle {
    std::vector<double> waveform; // length grid_size
    double start = 0.0;           // seconds; cycle time zero (R-peak or crossing)
    double ibi = 0.0;             // seconds
    std::vector<std::string> labels;

    bool has_label(const std::string& label) const;
};

struct CycleSet {
    int grid_size = 100;
    std::vector<Cycle> cycles;

    std::size_t size() const noexcept { return cycles.size(); }
    std::vector<double> ibis() const;
};

// Method 1: one cycle per consecutive R-peak pair, resampled to grid_size samples.
CycleSet segment_by_ecg(const UniformSeries& ppg, const EventTrain& rpeaks,
                        int grid_size = 100);

// Method 2: ECG-blind. Detrends the zero-mean signal, takes consecutive downgoing
// zero-crossings as cycle boundaries (with a refractory rule against spurious
// crossings), and resamples each cycle.
CycleSet segment_by_ppg(const UniformSeries& ppg, int grid_size = 100);

// The boundary train segment_by_ppg would cut at; exposed for tests.
EventTrain ppg_cycle_boundaries(const UniformSeries& ppg);

struct RejectionResult {
    CycleSet kept;
    std::size_t discarded = 0;
};

// Keeps cycles with ibi in [low, high] x median ibi of the input.
RejectionResult reject_outlier_cycles(const CycleSet& cs, double low = 0.7,
                                      double high = 1.3);

// Tags each cycle whose start falls inside an epoch with the epoch's label.
CycleSet label_cycles(const CycleSet& cs, const std::vector<Epoch>& epochs);

std::pair<CycleSet, CycleSet> partition_by_label(const CycleSet& cs,
                                                 const std::string& label);

struct IbiBins {
    CycleSet q1;  // lowest ~25% of IBIs
    CycleSet mid;
    CycleSet q4;  // highest ~25% of IBIs
};

// Outer bins hold round(n/4) cycles each; ties on IBI go to the outer bin in
// cycle start order.
IbiBins bin_by_ibi(const CycleSet& cs);

} // namespace ppg
