#include "ppg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ppg {

bool Cycle::has_label(const std::string& label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::vector<double> CycleSet::ibis() const {
    std::vector<double> out;
    out.reserve(cycles.size());
    for (const auto& c : cycles) out.push_back(c.ibi);
    return out;
}

namespace {

CycleSet cut_cycles(const UniformSeries& ppg, const std::vector<double>& boundaries,
                    int grid_size) {
    CycleSet cs;
    cs.grid_size = grid_size;
    const std::size_t n_cycles = boundaries.size() - 1;
    cs.cycles.resize(n_cycles);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(n_cycles); ++j) {
        const auto i = static_cast<std::size_t>(j);
        Cycle& c = cs.cycles[i];
        c.start = boundaries[i];
        c.ibi = boundaries[i + 1] - boundaries[i];
        c.waveform = resample_to_grid(ppg, boundaries[i], boundaries[i + 1], grid_size);
    }
    return cs;
}

// Zero-phase moving average with a symmetric window; endpoints shrink the window.
std::vector<double> moving_average(const std::vector<double>& v, int half_width) {
    if (half_width <= 0) return v;
    std::vector<double> out(v.size());
    const auto n = static_cast<long long>(v.size());
    for (long long i = 0; i < n; ++i) {
        const long long lo = std::max(0LL, i - half_width);
        const long long hi = std::min(n - 1, i + half_width);
        double acc = 0.0;
        for (long long k = lo; k <= hi; ++k) acc += v[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(i)] = acc / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> down_crossing_times(const UniformSeries& s) {
    std::vector<double> times;
    for (const auto& zc : find_zero_crossings(s, CrossingQuery::down)) {
        times.push_back(zc.time);
    }
    return times;
}

// Pulse period via the autocorrelation maximum inside [lo_s, hi_s]. For a
// periodic pulse train the ACF peaks at the full period, never at the half
// period, so this cannot lock onto the dicrotic notch the way a crossing
// spacing estimate can.
double autocorr_period(const std::vector<double>& v, double fs, double lo_s, double hi_s) {
    const auto n = static_cast<long long>(v.size());
    const long long lo = std::max(1LL, static_cast<long long>(std::lround(lo_s * fs)));
    const long long hi =
        std::min(n / 2, static_cast<long long>(std::lround(hi_s * fs)));
    if (hi <= lo) return 0.0;
    double best = -1e300;
    long long best_lag = lo;
    for (long long lag = lo; lag <= hi; ++lag) {
        double acc = 0.0;
        for (long long i = 0; i + lag < n; ++i) {
            acc += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i + lag)];
        }
        acc /= static_cast<double>(n - lag);
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    return static_cast<double>(best_lag) / fs;
}

} // namespace

CycleSet segment_by_ecg(const UniformSeries& ppg, const EventTrain& rpeaks,
                        int grid_size) {
    if (grid_size < 2) fail(ErrorCode::invalid_input, "grid_size must be >= 2");
    const double tol = 1e-9;
    std::vector<double> usable;
    for (double t : rpeaks.times) {
        if (t >= ppg.start_time - tol && t <= ppg.end_time() + tol) usable.push_back(t);
    }
    if (usable.size() < 2) {
        fail(ErrorCode::insufficient_events,
             "segment_by_ecg: fewer than 2 R-peaks inside the PPG support");
    }
    return cut_cycles(ppg, usable, grid_size);
}

EventTrain ppg_cycle_boundaries(const UniformSeries& ppg) {
    const UniformSeries zm = zero_mean(ppg);

    // First pass on the lightly smoothed signal to get a pulse-spacing estimate.
    UniformSeries smooth3 = zm;
    smooth3.values = moving_average(zm.values, 1);
    std::vector<double> coarse = down_crossing_times(smooth3);
    if (coarse.size() < 2) {
        fail(ErrorCode::insufficient_events,
             "segment_by_ppg: fewer than 2 downgoing zero-crossings");
    }
    std::vector<double> spacings(coarse.size() - 1);
    for (std::size_t i = 1; i < coarse.size(); ++i) spacings[i - 1] = coarse[i] - coarse[i - 1];
    const double est_ibi = median_of(spacings);

    // Detrend with a zero-phase moving average spanning ~2x the IBI estimate,
    // then re-smooth before the final crossing detection.
    const int detrend_half =
        std::max(1, static_cast<int>(std::lround(est_ibi * ppg.sample_rate)));
    UniformSeries detrended = zm;
    const std::vector<double> baseline = moving_average(zm.values, detrend_half);
    for (std::size_t i = 0; i < detrended.values.size(); ++i) {
        detrended.values[i] -= baseline[i];
    }
    detrended = zero_mean(detrended);
    detrended.values = moving_average(detrended.values, 1);

    const std::vector<double> raw = down_crossing_times(detrended);

    // The crossing-spacing estimate halves on strongly biphasic pulses (the
    // dicrotic limb also crosses zero), so re-estimate the period from the
    // autocorrelation before applying the refractory rule.
    const double period = autocorr_period(detrended.values, ppg.sample_rate,
                                          0.6 * est_ibi, 3.0 * est_ibi);
    const double ref = 0.6 * (period > 0.0 ? period : est_ibi);

    // Refractory rule: a crossing is accepted only if enough of the estimated
    // period has elapsed since the last accepted one.
    std::vector<double> accepted;
    for (double t : raw) {
        if (accepted.empty() || t - accepted.back() >= ref) accepted.push_back(t);
    }
    if (accepted.size() < 2) {
        fail(ErrorCode::insufficient_events,
             "segment_by_ppg: fewer than 2 cycle boundaries after refractory filtering");
    }
    return EventTrain::create(std::move(accepted));
}

CycleSet segment_by_ppg(const UniformSeries& ppg, int grid_size) {
    if (grid_size < 2) fail(ErrorCode::invalid_input, "grid_size must be >= 2");
    const EventTrain boundaries = ppg_cycle_boundaries(ppg);
    return cut_cycles(ppg, boundaries.times, grid_size);
}

RejectionResult reject_outlier_cycles(const CycleSet& cs, double low, double high) {
    if (cs.cycles.empty()) fail(ErrorCode::invalid_input, "reject_outlier_cycles: empty input");
    if (!(low > 0.0 && low < 1.0 && high > 1.0)) {
        fail(ErrorCode::invalid_input, "reject_outlier_cycles: need 0 < low < 1 < high");
    }
    const double med = median_of(cs.ibis());
    RejectionResult res;
    res.kept.grid_size = cs.grid_size;
    for (const auto& c : cs.cycles) {
        if (c.ibi >= low * med && c.ibi <= high * med) {
            res.kept.cycles.push_back(c);
        } else {
            ++res.discarded;
        }
    }
    if (res.kept.cycles.empty()) {
        fail(ErrorCode::empty_result, "reject_outlier_cycles: all cycles rejected");
    }
    return res;
}

CycleSet label_cycles(const CycleSet& cs, const std::vector<Epoch>& epochs) {
    CycleSet out = cs;
    for (auto& c : out.cycles) {
        for (const auto& e : epochs) {
            if (c.start >= e.start && c.start < e.end && !c.has_label(e.label)) {
                c.labels.push_back(e.label);
            }
        }
    }
    return out;
}

std::pair<CycleSet, CycleSet> partition_by_label(const CycleSet& cs,
                                                 const std::string& label) {
    CycleSet with{cs.grid_size, {}};
    CycleSet without{cs.grid_size, {}};
    for (const auto& c : cs.cycles) {
        (c.has_label(label) ? with : without).cycles.push_back(c);
    }
    return {std::move(with), std::move(without)};
}

IbiBins bin_by_ibi(const CycleSet& cs) {
    const std::size_t n = cs.cycles.size();
    if (n < 4) fail(ErrorCode::insufficient_events, "bin_by_ibi: fewer than 4 cycles");
    const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(n) / 4.0));

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto ibi_of = [&](std::size_t i) { return cs.cycles[i].ibi; };
    auto start_of = [&](std::size_t i) { return cs.cycles[i].start; };

    // Low bin: smallest IBIs, earlier cycles first on ties.
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (ibi_of(a) != ibi_of(b)) return ibi_of(a) < ibi_of(b);
        return start_of(a) < start_of(b);
    });
    std::vector<std::size_t> q1_idx(idx.begin(), idx.begin() + static_cast<long>(m));
    std::vector<std::size_t> rest(idx.begin() + static_cast<long>(m), idx.end());

    // High bin from the remainder: largest IBIs, earlier cycles first on ties.
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
        if (ibi_of(a) != ibi_of(b)) return ibi_of(a) > ibi_of(b);
        return start_of(a) < start_of(b);
    });
    std::vector<std::size_t> q4_idx(rest.begin(), rest.begin() + static_cast<long>(m));
    std::vector<std::size_t> mid_idx(rest.begin() + static_cast<long>(m), rest.end());

    auto build = [&](std::vector<std::size_t> which) {
        std::sort(which.begin(), which.end());
        CycleSet out{cs.grid_size, {}};
        for (std::size_t i : which) out.cycles.push_back(cs.cycles[i]);
        return out;
    };
    return IbiBins{build(std::move(q1_idx)), build(std::move(mid_idx)),
                   build(std::move(q4_idx))};
}

} // namespace ppg
