#include "ppg/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "ppg/timeseries.hpp"

namespace ppg {

namespace {

double feature_value(const PredictorSample& s, const std::string& name) {
    if (name == "d_zm") return s.d_zm;
    const auto it = s.extras.find(name);
    if (it == s.extras.end()) {
        fail(ErrorCode::invalid_input, "unknown predictor feature: " + name);
    }
    return it->second;
}

// Solves A x = b in place with partial pivoting; returns false on rank deficiency.
bool solve_normal(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    double scale = 0.0;
    for (const auto& row : a) {
        for (double v : row) scale = std::max(scale, std::abs(v));
    }
    const double tol = 1e-12 * std::max(scale, 1.0);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) <= tol) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return true;
}

EvaluationReport report_from_errors(std::vector<double> errors, double mu_d) {
    EvaluationReport rep;
    rep.mu_d = mu_d;
    const auto n = static_cast<double>(errors.size());
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= n;
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    rep.sigma = std::sqrt(var / n);

    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    rep.ci90_width = quantile_sorted(sorted, 0.95) - quantile_sorted(sorted, 0.05);
    rep.cdf.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        rep.cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
    }
    rep.errors = std::move(errors);
    return rep;
}

} // namespace

LinearPredictor fit_predictor(const std::vector<PredictorSample>& samples) {
    if (samples.size() < 2) {
        fail(ErrorCode::insufficient_events, "fit_predictor: fewer than 2 samples");
    }
    const auto n = static_cast<double>(samples.size());
    double mx = 0.0, my = 0.0;
    for (const auto& s : samples) {
        mx += s.d_zm;
        my += s.d;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : samples) {
        sxx += (s.d_zm - mx) * (s.d_zm - mx);
        sxy += (s.d_zm - mx) * (s.d - my);
    }
    if (sxx <= 1e-12 * n * std::max(mx * mx, 1e-12)) {
        fail(ErrorCode::rank_deficient, "fit_predictor: all d_zm values coincide");
    }
    LinearPredictor p;
    p.k2 = sxy / sxx;
    p.k1 = my - p.k2 * mx;
    p.training_n = samples.size();
    return p;
}

EvaluationReport evaluate(const std::optional<LinearPredictor>& pred,
                          const std::vector<PredictorSample>& samples) {
    if (samples.size() < 2) {
        fail(ErrorCode::insufficient_events, "evaluate: fewer than 2 samples");
    }
    double mu_d = 0.0;
    for (const auto& s : samples) mu_d += s.d;
    mu_d /= static_cast<double>(samples.size());

    std::vector<double> errors;
    errors.reserve(samples.size());
    for (const auto& s : samples) {
        const double d_hat = pred ? pred->k1 + pred->k2 * s.d_zm : mu_d;
        errors.push_back(s.d - d_hat);
    }
    return report_from_errors(std::move(errors), mu_d);
}

std::vector<FeatureSetResult> compare_feature_sets(
    const std::vector<PredictorSample>& samples,
    const std::vector<std::vector<std::string>>& subsets) {
    if (samples.size() < 2) {
        fail(ErrorCode::insufficient_events, "compare_feature_sets: fewer than 2 samples");
    }
    double mu_d = 0.0;
    for (const auto& s : samples) mu_d += s.d;
    mu_d /= static_cast<double>(samples.size());

    std::vector<FeatureSetResult> out;
    for (const auto& subset : subsets) {
        FeatureSetResult res;
        res.features = subset;
        const std::size_t dim = subset.size() + 1; // intercept first

        std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
        std::vector<double> xty(dim, 0.0);
        for (const auto& s : samples) {
            std::vector<double> row(dim, 1.0);
            for (std::size_t j = 0; j < subset.size(); ++j) {
                row[j + 1] = feature_value(s, subset[j]);
            }
            for (std::size_t r = 0; r < dim; ++r) {
                for (std::size_t c = 0; c < dim; ++c) xtx[r][c] += row[r] * row[c];
                xty[r] += row[r] * s.d;
            }
        }
        std::vector<double> coef = xty;
        if (!solve_normal(xtx, coef)) {
            res.ok = false;
            res.note = "rank-deficient feature set, skipped";
            out.push_back(std::move(res));
            continue;
        }
        std::vector<double> errors;
        errors.reserve(samples.size());
        for (const auto& s : samples) {
            double d_hat = coef[0];
            for (std::size_t j = 0; j < subset.size(); ++j) {
                d_hat += coef[j + 1] * feature_value(s, subset[j]);
            }
            errors.push_back(s.d - d_hat);
        }
        res.ok = true;
        res.coefficients = std::move(coef);
        res.report = report_from_errors(std::move(errors), mu_d);
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace ppg
