#include "ppg/prototype.hpp"

#include <algorithm>
#include <cmath>

#include "ppg/harmonics.hpp"
#include "dft_internal.hpp"

namespace ppg {

Prototype build_prototype(const CycleSet& cs, SegmentationMethod method) {
    if (cs.cycles.empty()) fail(ErrorCode::empty_result, "build_prototype: empty cycle set");
    std::vector<std::vector<double>> waves;
    waves.reserve(cs.cycles.size());
    for (const auto& c : cs.cycles) waves.push_back(c.waveform);
    MedianIqr stats = pointwise_median_iqr(waves);

    double mean = 0.0;
    for (double v : stats.median) mean += v;
    mean /= static_cast<double>(stats.median.size());
    for (double& v : stats.median) v -= mean;

    // Labels shared by every cycle become the prototype's condition tags.
    std::vector<std::string> labels = cs.cycles.front().labels;
    for (const auto& c : cs.cycles) {
        std::erase_if(labels, [&](const std::string& l) { return !c.has_label(l); });
    }

    Prototype p;
    p.grid_size = cs.grid_size;
    p.waveform = std::move(stats.median);
    p.iqr = std::move(stats.iqr);
    p.n_cycles = cs.cycles.size();
    p.method = method;
    p.median_ibi = median_of(cs.ibis());
    p.labels = std::move(labels);
    return p;
}

ComparisonReport compare_prototypes(const Prototype& a, const Prototype& b) {
    if (a.grid_size != b.grid_size || a.waveform.size() != b.waveform.size()) {
        fail(ErrorCode::invalid_input, "compare_prototypes: grid size mismatch");
    }
    ComparisonReport r;
    double sq = 0.0;
    std::size_t in_band = 0;
    const std::size_t n = a.waveform.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::abs(a.waveform[k] - b.waveform[k]);
        r.max_abs_diff = std::max(r.max_abs_diff, d);
        sq += d * d;
        if (d <= a.iqr[k]) ++in_band;
    }
    r.rms_diff = std::sqrt(sq / static_cast<double>(n));
    r.in_band_fraction = static_cast<double>(in_band) / static_cast<double>(n);
    return r;
}

namespace {

// Width in samples of the cyclic region around `center` where the predicate
// holds, with linear interpolation at both edges.
double region_width(const std::vector<double>& w, std::size_t center, double level,
                    bool above) {
    const auto n = static_cast<long long>(w.size());
    auto at = [&](long long i) {
        const double v = w[static_cast<std::size_t>(((i % n) + n) % n)];
        return above ? v - level : level - v;
    };
    // at(center) > 0 by construction (strict max/min vs mid level).
    long long left = static_cast<long long>(center);
    while (at(left - 1) > 0.0 && left > static_cast<long long>(center) - n) --left;
    long long right = static_cast<long long>(center);
    while (at(right + 1) > 0.0 && right < static_cast<long long>(center) + n) ++right;
    if (right - left + 1 >= n) return static_cast<double>(n); // never dips below level

    const double lf = at(left) / (at(left) - at(left - 1));   // into sample left-1
    const double rf = at(right) / (at(right) - at(right + 1));
    return static_cast<double>(right - left) + lf + rf;
}

} // namespace

DeviantVerdict detect_deviant(const Prototype& p, double width_ratio) {
    if (p.method != SegmentationMethod::ecg_based) {
        fail(ErrorCode::invalid_input, "detect_deviant: needs an ecg_based prototype");
    }
    const std::vector<double> w = smooth(p.waveform);
    const auto [mn_it, mx_it] = std::minmax_element(w.begin(), w.end());
    const double span = *mx_it - *mn_it;
    double rms = 0.0;
    for (double v : w) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(w.size()));
    if (!(span > 1e-12 * std::max(1.0, rms)) || span == 0.0) {
        fail(ErrorCode::undeterminable, "detect_deviant: flat waveform");
    }
    const auto argmax = static_cast<std::size_t>(mx_it - w.begin());
    const auto argmin = static_cast<std::size_t>(mn_it - w.begin());
    const double level = 0.5 * (*mx_it + *mn_it); // half prominence of max and min alike

    DeviantVerdict v;
    v.argmax_index = static_cast<int>(argmax);
    v.peak_width = region_width(w, argmax, level, true);
    v.valley_width = region_width(w, argmin, level, false);
    const bool broad = v.peak_width >= width_ratio * v.valley_width;
    const bool at_rpeak = argmax == 0;
    v.deviant = broad && at_rpeak;
    if (v.deviant) {
        v.reason = "peak at the R-peak and at least as broad as the valley";
    }
    return v;
}

std::vector<double> circular_shift(std::span<const double> waveform, double shift_samples) {
    const std::size_t n = waveform.size();
    auto bins = detail::dft(waveform);
    for (std::size_t b = 0; b < n; ++b) {
        // signed bin frequency
        const double f = (b <= n / 2) ? static_cast<double>(b)
                                      : static_cast<double>(b) - static_cast<double>(n);
        const double ang = -2.0 * M_PI * f * shift_samples / static_cast<double>(n);
        bins[b] *= std::complex<double>(std::cos(ang), std::sin(ang));
    }
    const auto back = detail::idft(bins);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = back[k].real();
    return out;
}

Prototype align_to(const Prototype& ref, const Prototype& p) {
    if (ref.grid_size != p.grid_size) {
        fail(ErrorCode::invalid_input, "align_to: grid size mismatch");
    }
    const std::size_t n = p.waveform.size();
    auto corr = [&](long long s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto src = static_cast<std::size_t>(
                ((static_cast<long long>(k) - s) % static_cast<long long>(n) +
                 static_cast<long long>(n)) % static_cast<long long>(n));
            acc += ref.waveform[k] * p.waveform[src];
        }
        return acc;
    };
    long long best = 0;
    double best_c = corr(0);
    for (long long s = 1; s < static_cast<long long>(n); ++s) {
        const double c = corr(s);
        if (c > best_c) {
            best_c = c;
            best = s;
        }
    }
    const double cm = corr(best - 1);
    const double cp = corr(best + 1);
    const double denom = cm - 2.0 * best_c + cp;
    const double delta = (denom < 0.0) ? 0.5 * (cm - cp) / denom : 0.0;
    const double shift = static_cast<double>(best) + std::clamp(delta, -0.5, 0.5);

    Prototype out = p;
    out.waveform = circular_shift(p.waveform, shift);
    const auto int_shift = static_cast<long long>(std::llround(shift));
    std::vector<double> iqr(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto src = static_cast<std::size_t>(
            ((static_cast<long long>(k) - int_shift) % static_cast<long long>(n) +
             static_cast<long long>(n)) % static_cast<long long>(n));
        iqr[k] = p.iqr[src];
    }
    out.iqr = std::move(iqr);
    return out;
}

} // namespace ppg
