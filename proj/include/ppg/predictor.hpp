#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppg/error.hpp"

namespace ppg {

struct PredictorSample {
    std::string subject;
    double d = 0.0;    // R-peak -> M distance, from the ECG-based prototype
    double d_zm = 0.0; // Z -> M distance, from the ECG-blind prototype
    std::map<std::string, double> extras; // optional features for the comparison
};

// d_hat = k1 + k2 * d_zm
struct LinearPredictor {
    double k1 = 0.0;
    double k2 = 0.0;
    std::size_t training_n = 0;
};

struct EvaluationReport {
    std::vector<double> errors;                  // e_i = d_i - d_hat_i
    double sigma = 0.0;                          // population std of the errors
    double ci90_width = 0.0;                     // 95th - 5th empirical percentile
    double mu_d = 0.0;                           // mean of d (the baseline predictor)
    std::vector<std::pair<double, double>> cdf;  // (error, fraction), non-decreasing
};

// Ordinary least squares. Throws rank_deficient when all d_zm coincide.
LinearPredictor fit_predictor(const std::vector<PredictorSample>& samples);

// pred == nullopt evaluates the constant baseline d_hat = mu_d.
EvaluationReport evaluate(const std::optional<LinearPredictor>& pred,
                          const std::vector<PredictorSample>& samples);

struct FeatureSetResult {
    std::vector<std::string> features; // "" names the built-in d_zm column
    bool ok = false;
    std::string note;                  // diagnostic when skipped
    std::vector<double> coefficients;  // intercept first
    EvaluationReport report;
};

// OLS per feature subset via normal equations; descriptive only.
// Feature name "d_zm" selects the built-in column, anything else an extra.
std::vector<FeatureSetResult> compare_feature_sets(
    const std::vector<PredictorSample>& samples,
    const std::vector<std::vector<std::string>>& subsets);

} // namespace ppg
