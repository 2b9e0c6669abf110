#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

// Direct O(N^2) transforms. Grids here are ~100 samples, so no FFT needed.
namespace ppg::detail {

inline std::vector<std::complex<double>> dft(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double w = -2.0 * M_PI / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = w * static_cast<double>(b) * static_cast<double>(k);
            acc += x[k] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[b] = acc;
    }
    return out;
}

inline std::vector<std::complex<double>> idft(std::span<const std::complex<double>> bins) {
    const std::size_t n = bins.size();
    std::vector<std::complex<double>> out(n);
    const double w = 2.0 * M_PI / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t b = 0; b < n; ++b) {
            const double ang = w * static_cast<double>(b) * static_cast<double>(k);
            acc += bins[b] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

} // namespace ppg::detail
