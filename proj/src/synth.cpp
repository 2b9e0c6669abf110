#include "ppg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>

namespace ppg::synth {

double HarmonicTemplate::value(double u) const {
    double acc = 0.0;
    for (std::size_t m = 0; m < amplitudes.size(); ++m) {
        acc += amplitudes[m] *
               std::cos(2.0 * M_PI * static_cast<double>(m + 1) * u + phases[m]);
    }
    return acc;
}

std::complex<double> HarmonicTemplate::analytic(double u) const {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t m = 0; m < amplitudes.size(); ++m) {
        const double ang = 2.0 * M_PI * static_cast<double>(m + 1) * u + phases[m];
        acc += amplitudes[m] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    return acc;
}

std::vector<double> HarmonicTemplate::sample(int n) const {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] =
            value(static_cast<double>(k) / static_cast<double>(n));
    }
    return out;
}

namespace {

double wrap01(double u) {
    u = std::fmod(u, 1.0);
    if (u < 0.0) u += 1.0;
    return u;
}

double cyc_forward(double from, double to) { // distance going forward on the circle
    double d = to - from;
    while (d <= 0.0) d += 1.0;
    return d;
}

// Bisection for a sign change of fn between a and b (fn(a), fn(b) straddle 0).
template <typename Fn>
double bisect(Fn fn, double a, double b) {
    double fa = fn(a);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        const double fm = fn(mid);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

TemplateMarkers brute_force_markers(const HarmonicTemplate& tpl, int dense_grid) {
    const int n = dense_grid;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = tpl.value(static_cast<double>(i) / n);
    }

    // Maximum: coarse argmax, then a fine scan around it.
    int k0 = static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
    double m = static_cast<double>(k0) / n;
    double step = 1.0 / n;
    for (int pass = 0; pass < 6; ++pass) {
        double best = m;
        double best_v = tpl.value(m);
        for (int i = -20; i <= 20; ++i) {
            const double u = m + step * i / 20.0;
            const double val = tpl.value(u);
            if (val > best_v) {
                best_v = val;
                best = u;
            }
        }
        m = best;
        step /= 20.0;
    }
    m = wrap01(m);

    TemplateMarkers out;
    out.m = m;
    out.amplitude = tpl.value(m);

    // Signal zero-crossings, refined by bisection on the closed form.
    std::vector<std::pair<double, bool>> crossings; // (position, is_up)
    for (int i = 0; i < n; ++i) {
        const double a = v[static_cast<std::size_t>(i)];
        const double b = v[static_cast<std::size_t>((i + 1) % n)];
        const double ua = static_cast<double>(i) / n;
        const double ub = static_cast<double>(i + 1) / n;
        if (a >= 0.0 && b < 0.0) {
            crossings.emplace_back(
                wrap01(bisect([&](double u) { return tpl.value(u); }, ua, ub)), false);
        } else if (a <= 0.0 && b > 0.0) {
            crossings.emplace_back(
                wrap01(bisect([&](double u) { return -tpl.value(u); }, ua, ub)), true);
        }
    }
    if (crossings.empty()) {
        fail(ErrorCode::undeterminable, "template has no zero-crossings");
    }
    auto next_of = [&](double from, bool up) {
        double best_d = 2.0;
        double best = -1.0;
        for (const auto& [pos, is_up] : crossings) {
            if (is_up != up) continue;
            const double d = cyc_forward(from, pos);
            if (d < best_d) {
                best_d = d;
                best = pos;
            }
        }
        if (best < 0.0) fail(ErrorCode::undeterminable, "template lacks a crossing direction");
        return best;
    };
    out.f = next_of(m, false);
    out.d = next_of(out.f, true);

    // Z: positive-going zero of the analytic-signal phase, nearest before M.
    auto phase = [&](double u) { return std::arg(tpl.analytic(u)); };
    double best_z = -1.0;
    double best_dist = 2.0;
    for (int i = 0; i < n; ++i) {
        const double ua = static_cast<double>(i) / n;
        const double ub = static_cast<double>(i + 1) / n;
        const double a = phase(ua);
        const double b = phase(ub);
        if (a < 0.0 && b >= 0.0 && (b - a) < M_PI) {
            const double z = wrap01(bisect(phase, ua, ub));
            const double dist = wrap01(m - z); // backward distance from M
            if (dist < best_dist || best_z < 0.0) {
                best_dist = dist;
                best_z = z;
            }
        }
    }
    if (best_z < 0.0) {
        fail(ErrorCode::undeterminable, "template phase has no positive-going zero");
    }
    out.z = best_z;
    double dzm = out.m - out.z;
    dzm -= std::round(dzm);       // to [-1/2, 1/2]
    if (dzm <= -0.5) dzm += 1.0;  // half-cycle tie to the positive side
    out.d_zm_frac = dzm;
    return out;
}

namespace {

// Per-cycle phase map from time-since-maximum to template phase.
struct CyclePhaseMap {
    double t0 = 1.0;        // template timescale (= base ibi)
    double ibi = 1.0;
    double m = 0.0, f = 0.0, d = 0.0; // template marker fractions
    double seg1 = 0.0, seg2 = 0.0, seg3 = 0.0;
    WarpMode mode = WarpMode::proportional;

    static CyclePhaseMap make(const TemplateMarkers& mk, double t0, double ibi,
                              double d_shift, WarpMode mode) {
        CyclePhaseMap cp;
        cp.t0 = t0;
        cp.ibi = ibi;
        cp.m = mk.m;
        cp.f = mk.f;
        cp.d = mk.d;
        cp.mode = mode;
        if (mode == WarpMode::rising_stretch) {
            cp.seg1 = cyc_forward(mk.m, mk.f) * t0;
            cp.seg2 = cyc_forward(mk.f, mk.d) * t0 + d_shift;
            cp.seg3 = ibi - cp.seg1 - cp.seg2;
            if (cp.seg3 <= 0.05 * ibi) {
                fail(ErrorCode::invalid_input,
                     "generate_subject: IBI too short for the rising-stretch warp");
            }
        }
        return cp;
    }

    // tau = time since this cycle's maximum, in [0, ibi)
    double phase(double tau) const {
        if (mode == WarpMode::proportional) return m + tau / ibi;
        if (tau < seg1) return m + (tau / seg1) * cyc_forward(m, f);
        if (tau < seg1 + seg2) return f + ((tau - seg1) / seg2) * cyc_forward(f, d);
        return d + ((tau - seg1 - seg2) / seg3) * cyc_forward(d, m);
    }
};

void validate_epochs(const std::vector<Epoch>& epochs, double duration) {
    for (const auto& e : epochs) {
        if (!(e.start < e.end) || e.start < 0.0 || e.end > duration) {
            fail(ErrorCode::invalid_input, "epoch outside recording or empty");
        }
    }
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        for (std::size_t j = i + 1; j < epochs.size(); ++j) {
            if (epochs[i].label == epochs[j].label &&
                epochs[i].start < epochs[j].end && epochs[j].start < epochs[i].end) {
                fail(ErrorCode::invalid_input, "overlapping epochs with the same label");
            }
        }
    }
}

} // namespace

SubjectData generate_subject(const SubjectSpec& spec) {
    if (!(spec.base_ibi > 0.0) || spec.ibi_jitter < 0.0 || spec.noise_sigma < 0.0 ||
        spec.tpl.amplitudes.empty() || !(spec.tpl.amplitudes.front() > 0.0)) {
        fail(ErrorCode::invalid_input, "generate_subject: invalid spec");
    }
    if (!(spec.planted_d > 0.0 && spec.planted_d < spec.base_ibi)) {
        fail(ErrorCode::invalid_input, "generate_subject: planted_d outside (0, base_ibi)");
    }
    validate_epochs(spec.epochs, spec.duration);

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const TemplateMarkers markers = brute_force_markers(spec.tpl);

    // IBI sequence: log-normal jitter, plus a raised cluster on every 4th cycle
    // when high_ibi_offset is set.
    std::vector<double> ibis;
    std::vector<bool> raised;
    double total = 0.0;
    std::size_t j = 0;
    while (total < spec.duration + 2.0 * spec.base_ibi) {
        double ibi = spec.base_ibi * std::exp(spec.ibi_jitter * gauss(rng));
        const bool hi = spec.high_ibi_offset > 0.0 && (j % 4 == 3);
        if (hi) ibi += spec.high_ibi_offset;
        ibis.push_back(ibi);
        raised.push_back(hi);
        total += ibi;
        ++j;
    }

    // Maxima times; cycle j spans [M_j, M_{j+1}) with its own phase map.
    const double m0 = spec.planted_d + 0.25 * spec.base_ibi;
    std::vector<double> maxima(ibis.size() + 1);
    maxima[0] = m0;
    for (std::size_t i = 0; i < ibis.size(); ++i) maxima[i + 1] = maxima[i] + ibis[i];

    std::vector<CyclePhaseMap> maps(ibis.size());
    for (std::size_t i = 0; i < ibis.size(); ++i) {
        const double shift = raised[i] ? spec.d_shift_high_ibi : 0.0;
        maps[i] = CyclePhaseMap::make(markers, spec.base_ibi, ibis[i], shift, spec.warp);
    }

    const auto n_samples =
        static_cast<std::size_t>(std::floor(spec.duration * spec.sample_rate)) + 1;
    std::vector<double> values(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t = static_cast<double>(k) / spec.sample_rate;
        if (t < maxima.front()) {
            // Lead-in before the first maximum: previous virtual cycle, proportional.
            values[k] = spec.tpl.value(markers.m + (t - maxima.front()) / ibis.front());
            continue;
        }
        const auto it = std::upper_bound(maxima.begin(), maxima.end(), t);
        const auto ci = std::min(static_cast<std::size_t>(it - maxima.begin()) - 1,
                                 ibis.size() - 1);
        values[k] = spec.tpl.value(maps[ci].phase(t - maxima[ci]));
    }
    if (spec.noise_sigma > 0.0) {
        for (double& v : values) v += spec.noise_sigma * gauss(rng);
    }

    std::vector<double> rpeaks;
    for (std::size_t i = 0; i < maxima.size(); ++i) {
        const double r = maxima[i] - spec.planted_d;
        if (r >= 0.0 && r <= spec.duration) rpeaks.push_back(r);
    }

    SubjectData out;
    out.id = spec.id;
    out.ppg = UniformSeries::create(0.0, spec.sample_rate, std::move(values));
    out.rpeaks = EventTrain::create(std::move(rpeaks));
    out.epochs = spec.epochs;
    out.truth.ibis = std::move(ibis);
    out.truth.raised = std::move(raised);
    out.truth.markers = markers;
    out.truth.planted_d = spec.planted_d;
    out.truth.d_zm = markers.d_zm_frac * spec.base_ibi;
    out.truth.f_from_r = spec.planted_d + cyc_forward(markers.m, markers.f) * spec.base_ibi;
    out.truth.d_from_r = spec.planted_d + cyc_forward(markers.m, markers.d) * spec.base_ibi;
    return out;
}

std::uint64_t subject_seed(std::uint64_t cohort_seed, int index) {
    // splitmix64 over (seed, index)
    std::uint64_t x = cohort_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

namespace {

// True when the global maximum clearly dominates any secondary lobe: the
// highest value at cyclic distance > 0.15 from the peak must sit at least
// 15% of the peak-to-trough range below it. Keeps Z -> M unambiguous under
// measurement noise.
bool dominant_peak(const HarmonicTemplate& tpl, double m_pos) {
    constexpr int kDense = 600;
    double peak = -1e300, trough = 1e300, side = -1e300;
    for (int i = 0; i < kDense; ++i) {
        const double u = static_cast<double>(i) / kDense;
        const double v = tpl.value(u);
        peak = std::max(peak, v);
        trough = std::min(trough, v);
        double d = std::abs(u - m_pos);
        d = std::min(d, 1.0 - d);
        if (d > 0.15) side = std::max(side, v);
    }
    return peak - side > 0.04 * (peak - trough);
}

} // namespace

HarmonicTemplate random_template(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        HarmonicTemplate tpl;
        // A strong, heavily dephased second harmonic skews the envelope near
        // the peak, which is what separates the phase crossing Z from the
        // maximum M; weaker templates leave the two nearly coincident.
        tpl.amplitudes = {1.0,
                          0.50 + 0.18 * uni(rng),
                          0.06 + 0.10 * uni(rng),
                          0.02 + 0.04 * uni(rng),
                          0.005 + 0.015 * uni(rng)};
        const double u0 = uni(rng);
        std::vector<double> shape(5, 0.0);
        shape[1] = -(2.1 + 1.04 * uni(rng));
        for (int m = 2; m < 5; ++m) shape[m] = 0.8 * (uni(rng) - 0.5);
        tpl.phases.resize(5);
        for (int m = 0; m < 5; ++m) {
            tpl.phases[m] = std::remainder(
                -2.0 * M_PI * static_cast<double>(m + 1) * u0 + shape[m], 2.0 * M_PI);
        }
        try {
            const TemplateMarkers mk = brute_force_markers(tpl);
            // Keep clearly biphasic shapes with a usable Z -> M distance.
            if (mk.amplitude > 0.5 && std::abs(mk.d_zm_frac) < 0.35 &&
                cyc_forward(mk.m, mk.f) > 0.05 && cyc_forward(mk.f, mk.d) > 0.05 &&
                cyc_forward(mk.d, mk.m) > 0.15 && dominant_peak(tpl, mk.m)) {
                return tpl;
            }
        } catch (const Error&) {
            // degenerate draw, retry
        }
    }
    fail(ErrorCode::undeterminable, "random_template: no valid template in 200 draws");
}

Cohort generate_cohort(const CohortSpec& spec) {
    if (spec.n_subjects < 2) {
        fail(ErrorCode::invalid_input, "generate_cohort: need at least 2 subjects");
    }
    Cohort cohort;
    cohort.spec = spec;
    cohort.subjects.resize(static_cast<std::size_t>(spec.n_subjects));

    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < spec.n_subjects; ++i) {
        try {
            std::mt19937_64 rng(subject_seed(spec.seed, i));
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            std::normal_distribution<double> gauss(0.0, 1.0);

            SubjectSpec s;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "s%02d", i + 1);
            s.id = buf;
            s.seed = subject_seed(spec.seed, i) ^ 0x5bf03635ULL;
            s.base_ibi = 0.75 + 0.30 * uni(rng);
            s.ibi_jitter = spec.ibi_jitter;
            s.noise_sigma = spec.noise_sigma;
            s.duration = spec.duration;
            s.sample_rate = spec.sample_rate;
            // Template draw constrained so the planted relation lands inside the cycle.
            double d_zm = 0.0;
            for (int tries = 0; tries < 50; ++tries) {
                s.tpl = random_template(rng);
                d_zm = brute_force_markers(s.tpl).d_zm_frac * s.base_ibi;
                const double center = spec.k1 + spec.k2 * d_zm;
                if (center > 0.08 && center < s.base_ibi - 0.08) break;
            }
            // Planted predictor relation d = k1 + k2 d_zm + noise.
            double planted = 0.0;
            for (int tries = 0; tries < 200; ++tries) {
                planted = spec.k1 + spec.k2 * d_zm + spec.d_noise_sigma * gauss(rng);
                if (planted > 0.03 && planted < s.base_ibi - 0.03) break;
                planted = 0.0;
            }
            if (planted == 0.0) {
                fail(ErrorCode::invalid_input,
                     "generate_cohort: planted d does not fit inside the cycle");
            }
            s.planted_d = planted;

            if (spec.plant_ibi_warp) {
                s.warp = WarpMode::rising_stretch;
                if (i < spec.n_subjects / 2) {
                    s.high_ibi_offset = spec.high_ibi_offset;
                    s.d_shift_high_ibi = spec.warp_d_shift;
                    s.ibi_jitter = std::min(s.ibi_jitter, 0.015);
                }
            }
            if (spec.breath_hold_epochs) {
                for (double start = 60.0; start + 30.0 <= spec.duration; start += 90.0) {
                    s.epochs.push_back({start, start + 30.0, "breath_hold"});
                }
            }
            cohort.subjects[static_cast<std::size_t>(i)] = generate_subject(s);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return cohort;
}

} // namespace ppg::synth
