#include "ppg/features.hpp"

#include <algorithm>
#include <cmath>

#include "dft_internal.hpp"

namespace ppg {

namespace {

double wrap_index(double idx, double n) {
    idx = std::fmod(idx, n);
    if (idx < 0.0) idx += n;
    return idx;
}

// Parabolic-interpolated argmax on the cyclic grid; returns {index, value}.
std::pair<double, double> argmax_parabolic(const std::vector<double>& w) {
    const std::size_t n = w.size();
    const std::size_t k0 = static_cast<std::size_t>(
        std::max_element(w.begin(), w.end()) - w.begin());
    const double ym = w[(k0 + n - 1) % n];
    const double y0 = w[k0];
    const double yp = w[(k0 + 1) % n];
    const double denom = ym - 2.0 * y0 + yp;
    double delta = 0.0;
    if (denom < 0.0) delta = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    const double value = y0 - 0.25 * (ym - yp) * delta;
    return {wrap_index(static_cast<double>(k0) + delta, static_cast<double>(n)), value};
}

struct CyclicCrossing {
    double index = 0.0; // fractional grid index
    bool up = false;
};

std::vector<CyclicCrossing> cyclic_crossings(const std::vector<double>& w) {
    const std::size_t n = w.size();
    std::vector<CyclicCrossing> out;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = w[k];
        const double b = w[(k + 1) % n];
        if (a >= 0.0 && b < 0.0) {
            out.push_back({wrap_index(static_cast<double>(k) + a / (a - b),
                                      static_cast<double>(n)),
                           false});
        } else if (a <= 0.0 && b > 0.0) {
            out.push_back({wrap_index(static_cast<double>(k) - a / (b - a),
                                      static_cast<double>(n)),
                           true});
        }
    }
    return out;
}

// First crossing of the requested direction strictly after `from` (cyclically).
double next_crossing(const std::vector<CyclicCrossing>& crossings, double from, bool up,
                     double n) {
    double best_dist = n + 1.0;
    double best = -1.0;
    for (const auto& c : crossings) {
        if (c.up != up) continue;
        double dist = c.index - from;
        if (dist <= 0.0) dist += n;
        if (dist < best_dist) {
            best_dist = dist;
            best = c.index;
        }
    }
    if (best < 0.0) fail(ErrorCode::undeterminable, "no zero-crossing of requested direction");
    return best;
}

} // namespace

double cyclic_reduce(double x, double period) {
    x = std::fmod(x, period);
    if (x > 0.5 * period) x -= period;
    if (x <= -0.5 * period) x += period;
    return x;
}

MfdMarkers extract_mfd(const Prototype& p) {
    const auto& w = p.waveform;
    const auto n = static_cast<double>(w.size());
    const double to_s = p.median_ibi / n;

    const auto [m_idx, amp] = argmax_parabolic(w);
    const auto crossings = cyclic_crossings(w);
    if (crossings.empty()) {
        fail(ErrorCode::undeterminable, "extract_mfd: no zero-crossings");
    }
    const double f_idx = next_crossing(crossings, m_idx, false, n);
    const double d_idx = next_crossing(crossings, f_idx, true, n);

    MfdMarkers out;
    out.m_pos = m_idx * to_s;
    out.f_pos = f_idx * to_s;
    out.d_pos = d_idx * to_s;
    out.amplitude = amp;
    return out;
}

std::vector<double> analytic_phase(std::span<const double> waveform) {
    const std::size_t n = waveform.size();
    double energy = 0.0;
    for (double v : waveform) energy += v * v;
    if (!(energy > 0.0)) fail(ErrorCode::undeterminable, "analytic_phase: zero signal");

    auto bins = detail::dft(waveform);
    for (std::size_t b = 1; b < n; ++b) {
        if (2 * b < n) {
            bins[b] *= 2.0;       // positive frequencies doubled
        } else if (2 * b > n) {
            bins[b] = 0.0;        // negative frequencies removed
        }                          // DC and Nyquist untouched
    }
    const auto analytic = detail::idft(bins);
    std::vector<double> phase(n);
    for (std::size_t k = 0; k < n; ++k) {
        double phi = std::atan2(analytic[k].imag(), analytic[k].real());
        if (phi >= M_PI) phi -= 2.0 * M_PI;
        phase[k] = phi;
    }
    return phase;
}

double extract_zh(const Prototype& p) {
    const auto& w = p.waveform;
    const auto n = static_cast<double>(w.size());
    const std::vector<double> phase = analytic_phase(w);
    const auto [m_idx, amp] = argmax_parabolic(w);
    (void)amp;

    // Positive-going zero-crossings of the phase, skipping +pi -> -pi wraps.
    std::vector<double> candidates;
    const std::size_t size = w.size();
    for (std::size_t k = 0; k < size; ++k) {
        const double a = phase[k];
        const double b = phase[(k + 1) % size];
        if (a < 0.0 && b >= 0.0 && (b - a) < M_PI) {
            candidates.push_back(
                wrap_index(static_cast<double>(k) + a / (a - b), n));
        }
    }
    if (candidates.empty()) {
        fail(ErrorCode::undeterminable, "extract_zh: no positive-going phase crossing");
    }
    // Nearest before the maximum, cyclically.
    double best = candidates.front();
    double best_dist = n + 1.0;
    for (double c : candidates) {
        double dist = m_idx - c;
        if (dist < 0.0) dist += n;
        if (dist < best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    return best * p.median_ibi / n;
}

MarkerSet extract_markers(const Prototype& p) {
    const MfdMarkers mfd = extract_mfd(p);
    const double z = extract_zh(p);
    MarkerSet out;
    out.m_pos = mfd.m_pos;
    out.f_pos = mfd.f_pos;
    out.d_pos = mfd.d_pos;
    out.amplitude = mfd.amplitude;
    out.z_pos = z;
    out.d_zm = cyclic_reduce(mfd.m_pos - z, p.median_ibi);
    return out;
}

double max_slope_position(const Prototype& p) {
    const auto& w = p.waveform;
    const std::size_t n = w.size();
    double best = w[1 % n] - w[0];
    std::size_t best_k = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const double diff = w[(k + 1) % n] - w[k];
        if (diff < best) {
            best = diff;
            best_k = k;
        }
    }
    // Midpoint of the steepest falling sample pair.
    return (static_cast<double>(best_k) + 0.5) * p.median_ibi / static_cast<double>(n);
}

} // namespace ppg
