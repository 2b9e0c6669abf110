#pragma once

#include <map>
#include <span>
#include <vector>

#include "ppg/prototype.hpp"

namespace ppg {

// Residual energies below this are reported as kFloorDb instead of -inf.
inline constexpr double kFloorDb = -400.0;

struct HarmonicFit {
    int order = 0;                  // M; components m = 0..M, frequency m+1 per cycle
    std::vector<double> amplitudes; // A_0..A_M, >= 0
    std::vector<double> phases;     // radians in [-pi, pi)
    int grid_size = 0;
    std::vector<double> residual;
    double unmodeled_energy_db = 0.0;
};

// Exact DFT projection of a zero-mean waveform onto cosines at 1..M+1 cycles
// per cardiac cycle. Component m=0 is the fundamental.
HarmonicFit fit_harmonics(std::span<const double> waveform, int order);

// Residual energy in dB relative to total, for M = 0..max_order. Non-increasing.
std::vector<double> unmodeled_energy_curve(std::span<const double> waveform,
                                           int max_order);

// Reconstruction from the five-component fit (fundamental + four harmonics).
std::vector<double> smooth(std::span<const double> waveform);

inline constexpr int kSmoothingOrder = 4;

enum class IbiBinTag { low_ibi, high_ibi };

struct BinnedEnergy {
    // order M -> unmodeled energy values (dB), one per prototype in the bin
    std::map<int, std::vector<double>> low;
    std::map<int, std::vector<double>> high;
};

BinnedEnergy energy_by_ibi_bins(
    const std::vector<std::pair<Prototype, IbiBinTag>>& prototypes,
    const std::vector<int>& orders);

// Batch curve computation, OpenMP-parallel over waveforms.
std::vector<std::vector<double>> unmodeled_energy_curves(
    const std::vector<std::vector<double>>& waveforms, int max_order);

namespace serial {

std::vector<std::vector<double>> unmodeled_energy_curves(
    const std::vector<std::vector<double>>& waveforms, int max_order);

} // namespace serial

} // namespace ppg
