#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ppg/segmentation.hpp"
#include "ppg/timeseries.hpp"

// Synthetic PPG/ECG cohorts with planted ground truth. Everything here is
// generator/oracle code: marker ground truth comes from dense brute-force
// scans of the closed-form templates and never calls the analysis pipeline.
namespace ppg::synth {

// Truncated cosine series; component m has frequency m+1 cycles per cycle.
struct HarmonicTemplate {
    std::vector<double> amplitudes; // A_0 > 0
    std::vector<double> phases;

    double value(double u) const;                 // u in cycle fractions, any real
    std::complex<double> analytic(double u) const;
    std::vector<double> sample(int n) const;      // exact samples on the cycle grid
};

// Template-local marker positions, in cycle fractions [0, 1).
struct TemplateMarkers {
    double m = 0.0;
    double f = 0.0;
    double d = 0.0;
    double z = 0.0;
    double amplitude = 0.0;
    double d_zm_frac = 0.0; // cyclic m - z, in (-1/2, 1/2]
};

// Dense scan of the closed form (default 10x a 100-point grid) with bisection
// refinement for crossings.
TemplateMarkers brute_force_markers(const HarmonicTemplate& tpl, int dense_grid = 1000);

enum class WarpMode {
    proportional,   // whole cycle scales with the IBI
    rising_stretch, // M->F->D durations fixed in seconds; the rising part absorbs IBI changes
};

struct SubjectSpec {
    std::string id = "s";
    HarmonicTemplate tpl;
    double base_ibi = 1.0;         // seconds; also the template timescale
    double ibi_jitter = 0.02;      // fractional log-normal jitter
    double high_ibi_offset = 0.0;  // seconds added to every 4th cycle when > 0
    double d_shift_high_ibi = 0.0; // extra F->D duration on raised cycles (rising_stretch only)
    double planted_d = 0.15;       // seconds, R-peak -> template maximum
    double noise_sigma = 0.0;      // additive white noise, signal units
    double duration = 300.0;       // seconds
    double sample_rate = 40.0;     // Hz
    WarpMode warp = WarpMode::proportional;
    std::vector<Epoch> epochs;
    std::uint64_t seed = 1;
};

struct SubjectTruth {
    std::vector<double> ibis;    // one per generated cycle
    std::vector<bool> raised;    // cycles carrying high_ibi_offset
    TemplateMarkers markers;     // template-local fractions
    double planted_d = 0.0;      // = M offset from the R-peak, seconds
    double d_zm = 0.0;           // seconds at the base IBI
    double f_from_r = 0.0;       // marker offsets from the R-peak at the base IBI
    double d_from_r = 0.0;
};

struct SubjectData {
    std::string id;
    UniformSeries ppg;
    EventTrain rpeaks;
    std::vector<Epoch> epochs;
    SubjectTruth truth;
};

SubjectData generate_subject(const SubjectSpec& spec);

struct CohortSpec {
    int n_subjects = 25;
    std::uint64_t seed = 1;
    double duration = 300.0;
    double sample_rate = 40.0;
    double k1 = 0.12;             // planted predictor intercept, seconds
    double k2 = 0.9;              // planted predictor slope
    double d_noise_sigma = 0.020; // seconds, noise on the planted relation
    double ibi_jitter = 0.02;
    double noise_sigma = 0.0;
    bool breath_hold_epochs = false;
    bool plant_ibi_warp = false;  // first half of the cohort gets raised cycles + D shift
    double high_ibi_offset = 0.10;
    double warp_d_shift = 0.030;  // seconds
};

struct Cohort {
    CohortSpec spec;
    std::vector<SubjectData> subjects;
};

Cohort generate_cohort(const CohortSpec& spec);

// Deterministic per-subject sub-seed (splitmix64 of cohort seed and index).
std::uint64_t subject_seed(std::uint64_t cohort_seed, int index);

// Biphasic 4-harmonic template with randomized amplitudes, peak position and
// per-harmonic phase jitter; retried until all markers are well defined.
HarmonicTemplate random_template(std::mt19937_64& rng);

} // namespace ppg::synth
