#include "ppg/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace ppg {

namespace {

double wrap_phase(double phi) {
    phi = std::remainder(phi, 2.0 * M_PI);
    if (phi >= M_PI) phi -= 2.0 * M_PI; // keep in [-pi, pi)
    return phi;
}

struct Projection {
    std::vector<double> amplitudes;
    std::vector<double> phases;
    std::vector<double> bin_energy; // per component, in sum-of-squares units
    double total_energy = 0.0;
};

// Cosine coefficients at bins 1..order+1, with the Nyquist bin (if hit)
// carrying weight 1/N instead of 2/N.
Projection project(std::span<const double> w, int order) {
    const auto n = static_cast<std::size_t>(w.size());
    if (n < 2) fail(ErrorCode::invalid_input, "fit_harmonics: waveform too short");
    if (order < 0 || static_cast<std::size_t>(order) + 1 > n / 2) {
        fail(ErrorCode::invalid_order, "harmonic order too large for the grid");
    }
    Projection out;
    out.amplitudes.resize(static_cast<std::size_t>(order) + 1);
    out.phases.resize(static_cast<std::size_t>(order) + 1);
    out.bin_energy.resize(static_cast<std::size_t>(order) + 1);
    for (double v : w) out.total_energy += v * v;

    for (int m = 0; m <= order; ++m) {
        const std::size_t bin = static_cast<std::size_t>(m) + 1;
        double c = 0.0, s = 0.0;
        const double step = 2.0 * M_PI * static_cast<double>(bin) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = step * static_cast<double>(k);
            c += w[k] * std::cos(ang);
            s += w[k] * std::sin(ang);
        }
        double amp, phi;
        if (2 * bin == n) { // Nyquist: only the cosine component exists
            const double coef = c / static_cast<double>(n);
            amp = std::abs(coef);
            phi = coef >= 0.0 ? 0.0 : -M_PI;
            out.bin_energy[static_cast<std::size_t>(m)] =
                amp * amp * static_cast<double>(n);
        } else {
            amp = 2.0 * std::hypot(c, s) / static_cast<double>(n);
            phi = wrap_phase(std::atan2(-s, c));
            out.bin_energy[static_cast<std::size_t>(m)] =
                0.5 * amp * amp * static_cast<double>(n);
        }
        out.amplitudes[static_cast<std::size_t>(m)] = amp;
        out.phases[static_cast<std::size_t>(m)] = phi;
    }
    return out;
}

std::vector<double> reconstruct(const Projection& pr, std::size_t n) {
    std::vector<double> model(n, 0.0);
    for (std::size_t m = 0; m < pr.amplitudes.size(); ++m) {
        const double step = 2.0 * M_PI * static_cast<double>(m + 1) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            model[k] += pr.amplitudes[m] * std::cos(step * static_cast<double>(k) + pr.phases[m]);
        }
    }
    return model;
}

double energy_db(double residual, double total) {
    if (total <= 0.0) fail(ErrorCode::undeterminable, "zero-energy waveform");
    if (residual <= 0.0) return kFloorDb;
    return std::max(10.0 * std::log10(residual / total), kFloorDb);
}

} // namespace

HarmonicFit fit_harmonics(std::span<const double> waveform, int order) {
    const std::size_t n = waveform.size();
    Projection pr = project(waveform, order);
    const std::vector<double> model = reconstruct(pr, n);

    HarmonicFit fit;
    fit.order = order;
    fit.grid_size = static_cast<int>(n);
    fit.amplitudes = std::move(pr.amplitudes);
    fit.phases = std::move(pr.phases);
    fit.residual.resize(n);
    double res_energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        fit.residual[k] = waveform[k] - model[k];
        res_energy += fit.residual[k] * fit.residual[k];
    }
    fit.unmodeled_energy_db = energy_db(res_energy, pr.total_energy);
    return fit;
}

std::vector<double> unmodeled_energy_curve(std::span<const double> waveform,
                                           int max_order) {
    Projection pr = project(waveform, max_order);
    if (pr.total_energy <= 0.0) {
        fail(ErrorCode::undeterminable, "unmodeled_energy_curve: zero-energy waveform");
    }
    // Parseval route: residual energy at order M is total minus the modeled
    // partial sum, which makes the curve non-increasing by construction.
    std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
    double modeled = 0.0;
    for (int m = 0; m <= max_order; ++m) {
        modeled += pr.bin_energy[static_cast<std::size_t>(m)];
        out[static_cast<std::size_t>(m)] = energy_db(pr.total_energy - modeled, pr.total_energy);
    }
    return out;
}

std::vector<double> smooth(std::span<const double> waveform) {
    Projection pr = project(waveform, kSmoothingOrder);
    return reconstruct(pr, waveform.size());
}

BinnedEnergy energy_by_ibi_bins(
    const std::vector<std::pair<Prototype, IbiBinTag>>& prototypes,
    const std::vector<int>& orders) {
    if (orders.empty()) fail(ErrorCode::invalid_input, "energy_by_ibi_bins: no orders");
    const int max_order = *std::max_element(orders.begin(), orders.end());
    BinnedEnergy out;
    bool has_low = false, has_high = false;
    for (const auto& [proto, tag] : prototypes) {
        const auto curve = unmodeled_energy_curve(proto.waveform, max_order);
        auto& group = (tag == IbiBinTag::low_ibi) ? out.low : out.high;
        (tag == IbiBinTag::low_ibi ? has_low : has_high) = true;
        for (int m : orders) group[m].push_back(curve[static_cast<std::size_t>(m)]);
    }
    if (!has_low || !has_high) {
        fail(ErrorCode::insufficient_events, "energy_by_ibi_bins: a bin is empty");
    }
    return out;
}

std::vector<std::vector<double>> unmodeled_energy_curves(
    const std::vector<std::vector<double>>& waveforms, int max_order) {
    std::vector<std::vector<double>> out(waveforms.size());
    std::exception_ptr err;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(waveforms.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                unmodeled_energy_curve(waveforms[static_cast<std::size_t>(i)], max_order);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

namespace serial {

std::vector<std::vector<double>> unmodeled_energy_curves(
    const std::vector<std::vector<double>>& waveforms, int max_order) {
    std::vector<std::vector<double>> out;
    out.reserve(waveforms.size());
    for (const auto& w : waveforms) out.push_back(ppg::unmodeled_energy_curve(w, max_order));
    return out;
}

} // namespace serial

} // namespace ppg
