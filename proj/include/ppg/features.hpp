#pragma once

#include <span>
#include <vector>

#include "ppg/prototype.hpp"

namespace ppg {

// Timing markers of a smoothed prototype, all in seconds from cycle time zero.
struct MarkerSet {
    double m_pos = 0.0;    // position of the maximum (parabolic sub-sample)
    double f_pos = 0.0;    // negative-going zero-crossing after M
    double d_pos = 0.0;    // positive-going zero-crossing after F
    double z_pos = 0.0;    // positive-going crossing of the analytic-signal phase
    double amplitude = 0.0;
    double d_zm = 0.0;     // m_pos - z_pos, cyclically reduced to (-IBI/2, IBI/2]
};

struct MfdMarkers {
    double m_pos = 0.0;
    double f_pos = 0.0;
    double d_pos = 0.0;
    double amplitude = 0.0;
};

// Expects a smoothed, zero-mean prototype.
MfdMarkers extract_mfd(const Prototype& p);

// Phase of the analytic signal (negative DFT bins zeroed, positive doubled),
// wrapped to [-pi, pi).
std::vector<double> analytic_phase(std::span<const double> waveform);

// Positive-going zero-crossing of the analytic-signal phase nearest before the
// maximum (cyclically).
double extract_zh(const Prototype& p);

// All markers in one pass.
MarkerSet extract_markers(const Prototype& p);

// Position (seconds) of the most negative cyclic first difference; the optional
// maximum-slope predictor feature.
double max_slope_position(const Prototype& p);

// Reduce a cyclic difference to (-period/2, period/2].
double cyclic_reduce(double x, double period);

} // namespace ppg
