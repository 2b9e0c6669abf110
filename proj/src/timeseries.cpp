#include "ppg/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace ppg {

namespace {

bool all_finite(std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

UniformSeries UniformSeries::create(double start_time, double sample_rate,
                                    std::vector<double> values) {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        fail(ErrorCode::invalid_input, "sample_rate must be a positive finite number");
    }
    if (values.size() < 2) {
        fail(ErrorCode::invalid_input, "a series needs at least 2 samples");
    }
    if (!std::isfinite(start_time) || !all_finite(values)) {
        fail(ErrorCode::invalid_input, "series contains non-finite values");
    }
    return UniformSeries{start_time, sample_rate, std::move(values)};
}

double UniformSeries::interp(double t) const {
    const double tol = 1e-9;
    double pos = (t - start_time) * sample_rate;
    const double last = static_cast<double>(values.size() - 1);
    if (pos < -tol || pos > last + tol) {
        fail(ErrorCode::out_of_range, "interpolation time outside series support");
    }
    pos = std::clamp(pos, 0.0, last);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo >= values.size() - 1) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

EventTrain EventTrain::create(std::vector<double> times) {
    if (!all_finite(times)) {
        fail(ErrorCode::invalid_input, "event times contain non-finite values");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            fail(ErrorCode::invalid_input, "event times must be strictly increasing");
        }
    }
    return EventTrain{std::move(times)};
}

std::vector<double> EventTrain::ibis() const {
    std::vector<double> out;
    if (times.size() < 2) return out;
    out.reserve(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) out.push_back(times[i] - times[i - 1]);
    return out;
}

UniformSeries zero_mean(const UniformSeries& s) {
    if (s.values.empty() || !all_finite(s.values)) {
        fail(ErrorCode::invalid_input, "zero_mean: empty or non-finite input");
    }
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= static_cast<double>(s.values.size());
    UniformSeries out = s;
    for (double& v : out.values) v -= mean;
    return out;
}

std::vector<ZeroCrossing> find_zero_crossings(const UniformSeries& s, CrossingQuery query) {
    std::vector<ZeroCrossing> out;
    const auto& v = s.values;
    const bool want_down = query != CrossingQuery::up;
    const bool want_up = query != CrossingQuery::down;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double a = v[i];
        const double b = v[i + 1];
        if (a >= 0.0 && b < 0.0 && want_down) {
            const double frac = a / (a - b);
            out.push_back({s.time_at(i) + frac / s.sample_rate, CrossingDirection::down, frac});
        } else if (a <= 0.0 && b > 0.0 && want_up) {
            const double frac = -a / (b - a);
            out.push_back({s.time_at(i) + frac / s.sample_rate, CrossingDirection::up, frac});
        }
    }
    return out;
}

std::vector<double> resample_to_grid(const UniformSeries& s, double t_start, double t_end,
                                     int n) {
    if (n < 2) fail(ErrorCode::invalid_input, "resample_to_grid: n must be >= 2");
    if (!(t_start < t_end)) fail(ErrorCode::invalid_input, "resample_to_grid: empty interval");
    const double tol = 1e-9;
    if (t_start < s.start_time - tol || t_end > s.end_time() + tol) {
        fail(ErrorCode::out_of_range, "resample_to_grid: interval outside series support");
    }
    const double dt = (t_end - t_start) / static_cast<double>(n);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(j)] = s.interp(t_start + dt * static_cast<double>(j));
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) fail(ErrorCode::invalid_input, "quantile of empty sequence");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, 0.5);
}

namespace {

void check_cycles(const std::vector<std::vector<double>>& cycles) {
    if (cycles.empty()) fail(ErrorCode::invalid_input, "pointwise_median_iqr: no cycles");
    const std::size_t n = cycles.front().size();
    if (n == 0) fail(ErrorCode::invalid_input, "pointwise_median_iqr: empty cycles");
    for (const auto& c : cycles) {
        if (c.size() != n) {
            fail(ErrorCode::invalid_input, "pointwise_median_iqr: ragged cycle lengths");
        }
    }
}

void column_stats(const std::vector<std::vector<double>>& cycles, std::size_t k,
                  std::vector<double>& buf, MedianIqr& out) {
    buf.clear();
    for (const auto& c : cycles) buf.push_back(c[k]);
    std::sort(buf.begin(), buf.end());
    out.median[k] = quantile_sorted(buf, 0.5);
    out.q1[k] = quantile_sorted(buf, 0.25);
    out.q3[k] = quantile_sorted(buf, 0.75);
    out.iqr[k] = out.q3[k] - out.q1[k];
}

} // namespace

MedianIqr pointwise_median_iqr(const std::vector<std::vector<double>>& cycles) {
    check_cycles(cycles);
    const std::size_t n = cycles.front().size();
    MedianIqr out;
    out.median.resize(n);
    out.iqr.resize(n);
    out.q1.resize(n);
    out.q3.resize(n);
    // Independent per grid position; no cross-thread accumulation, so the
    // result does not depend on the thread count.
#pragma omp parallel
    {
        std::vector<double> buf;
        buf.reserve(cycles.size());
#pragma omp for schedule(static)
        for (long long k = 0; k < static_cast<long long>(n); ++k) {
            column_stats(cycles, static_cast<std::size_t>(k), buf, out);
        }
    }
    return out;
}

namespace serial {

MedianIqr pointwise_median_iqr(const std::vector<std::vector<double>>& cycles) {
    check_cycles(cycles);
    const std::size_t n = cycles.front().size();
    MedianIqr out;
    out.median.resize(n);
    out.iqr.resize(n);
    out.q1.resize(n);
    out.q3.resize(n);
    std::vector<double> buf;
    buf.reserve(cycles.size());
    for (std::size_t k = 0; k < n; ++k) column_stats(cycles, k, buf, out);
    return out;
}

} // namespace serial

} // namespace ppg
