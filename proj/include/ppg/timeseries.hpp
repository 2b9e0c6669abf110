#pragma once

#include <span>
#include <vector>

#include "ppg/error.hpp"

namespace ppg {

// Uniformly sampled scalar signal. Sample j lives at start_time + j / sample_rate.
struct UniformSeries {
    double start_time = 0.0;
    double sample_rate = 0.0;
    std::vector<double> values;

    static UniformSeries create(double start_time, double sample_rate,
                                std::vector<double> values);

    std::size_t size() const noexcept { return values.size(); }
    double time_at(std::size_t j) const { return start_time + static_cast<double>(j) / sample_rate; }
    double end_time() const { return time_at(values.size() - 1); }

    // Linear interpolation at time t; t must be within [start_time, end_time].
    double interp(double t) const;
};

// Strictly increasing event timestamps (R-peaks, cycle boundaries).
struct EventTrain {
    std::vector<double> times;

    static EventTrain create(std::vector<double> times);

    std::size_t size() const noexcept { return times.size(); }
    std::vector<double> ibis() const;
};

enum class CrossingDirection { down, up };
enum class CrossingQuery { down, up, both };

struct ZeroCrossing {
    double time = 0.0;
    CrossingDirection direction = CrossingDirection::down;
    double frac = 0.0; // sub-sample offset in [0,1) from the left bracketing sample
};

UniformSeries zero_mean(const UniformSeries& s);

// Crossings located by linear interpolation between bracketing samples.
// A sample exactly 0 is attached to the crossing its successor determines.
std::vector<ZeroCrossing> find_zero_crossings(const UniformSeries& s, CrossingQuery query);

// Samples s at t_start + j*(t_end - t_start)/n for j = 0..n-1 (grid excludes t_end).
std::vector<double> resample_to_grid(const UniformSeries& s, double t_start, double t_end,
                                     int n);

struct MedianIqr {
    std::vector<double> median;
    std::vector<double> iqr;
    std::vector<double> q1;
    std::vector<double> q3;
};

// Per-sample median and interquartile range over equal-length cycles.
// Quartiles by linear interpolation of order statistics (type-7 rule).
// OpenMP-parallel over grid positions; bit-identical to serial::pointwise_median_iqr.
MedianIqr pointwise_median_iqr(const std::vector<std::vector<double>>& cycles);

// Type-7 quantile of an ascending-sorted sequence.
double quantile_sorted(std::span<const double> sorted, double p);

// Type-7 median of an arbitrary sequence (copies and sorts).
double median_of(std::vector<double> xs);

namespace serial {

// Plain single-threaded reference, kept for correctness tests and benchmarks.
MedianIqr pointwise_median_iqr(const std::vector<std::vector<double>>& cycles);

} // namespace serial

} // namespace ppg
