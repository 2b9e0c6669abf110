#include "ppg/ibi_analysis.hpp"

#include <algorithm>
#include <cmath>

namespace ppg {

std::pair<double, double> compute_ratios(const IbiTriple& t) {
    if (!(t.t_d > 0.0 && t.t_d <= t.t_n && t.t_n <= t.t_i)) {
        fail(ErrorCode::invalid_input, "compute_ratios: need 0 < t_d <= t_n <= t_i");
    }
    return {t.t_d / t.t_n, t.t_i / t.t_n};
}

std::vector<CategoryAssignment> split_cohort(const std::vector<IbiTriple>& triples) {
    if (triples.size() < 2) {
        fail(ErrorCode::insufficient_events, "split_cohort: fewer than 2 subjects");
    }
    std::vector<CategoryAssignment> out;
    std::vector<double> rds, ris;
    for (const auto& t : triples) {
        auto [rd, ri] = compute_ratios(t);
        out.push_back({t.subject, rd, ri, DecreaseClass::SD, IncreaseClass::SI});
        rds.push_back(rd);
        ris.push_back(ri);
    }
    const double rd_med = median_of(rds);
    const double ri_med = median_of(ris);
    for (auto& a : out) {
        a.d_class = a.r_d < rd_med ? DecreaseClass::LD : DecreaseClass::SD;
        a.i_class = a.r_i > ri_med ? IncreaseClass::LI : IncreaseClass::SI;
    }
    return out;
}

BoxplotSummary boxplot_summary(std::vector<double> values) {
    if (values.empty()) fail(ErrorCode::invalid_input, "boxplot_summary: no values");
    std::sort(values.begin(), values.end());
    BoxplotSummary s;
    s.q1 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.q3 = quantile_sorted(values, 0.75);
    const double reach = 1.5 * (s.q3 - s.q1);
    s.whisker_low = s.q1;
    s.whisker_high = s.q3;
    for (double v : values) {
        if (v >= s.q1 - reach && v <= s.q3 + reach) {
            s.whisker_low = std::min(s.whisker_low, v);
            s.whisker_high = std::max(s.whisker_high, v);
        } else {
            s.outliers.push_back(v);
        }
    }
    return s;
}

namespace {

FeatureDelta delta_between(const std::string& subject, const Prototype& outer,
                           const Prototype& mid) {
    const MfdMarkers a = extract_mfd(outer);
    const MfdMarkers b = extract_mfd(mid);
    if (!(a.amplitude > 0.0 && b.amplitude > 0.0)) {
        fail(ErrorCode::undeterminable, "feature_changes: non-positive amplitude");
    }
    const double period = mid.median_ibi;
    FeatureDelta d;
    d.subject = subject;
    d.amp_db = 20.0 * std::log10(a.amplitude / b.amplitude);
    d.dm_s = cyclic_reduce(a.m_pos - b.m_pos, period);
    d.df_s = cyclic_reduce(a.f_pos - b.f_pos, period);
    d.dd_s = cyclic_reduce(a.d_pos - b.d_pos, period);
    return d;
}

} // namespace

FeatureChangeReport feature_changes(const std::vector<SubjectBinned>& subjects) {
    if (subjects.empty()) {
        fail(ErrorCode::insufficient_events, "feature_changes: no subjects");
    }
    std::vector<IbiTriple> triples;
    for (const auto& s : subjects) {
        if (s.d.waveform.empty() || s.n.waveform.empty() || s.i.waveform.empty()) {
            fail(ErrorCode::insufficient_events,
                 "feature_changes: missing bin prototype for subject " + s.subject);
        }
        triples.push_back({s.subject, s.d.median_ibi, s.n.median_ibi, s.i.median_ibi});
    }

    FeatureChangeReport report;
    report.assignments = split_cohort(triples);

    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const auto& s = subjects[i];
        const auto& a = report.assignments[i];
        const FeatureDelta d_delta = delta_between(s.subject, s.d, s.n);
        const FeatureDelta i_delta = delta_between(s.subject, s.i, s.n);
        report.groups[a.d_class == DecreaseClass::LD ? "LD" : "SD"].push_back(d_delta);
        report.groups[a.i_class == IncreaseClass::LI ? "LI" : "SI"].push_back(i_delta);

        const double tn = s.n.median_ibi;
        report.small_spread[s.subject] = std::abs(s.d.median_ibi - tn) < 0.05 * tn &&
                                         std::abs(s.i.median_ibi - tn) < 0.05 * tn;
    }

    for (const auto& [group, deltas] : report.groups) {
        std::vector<double> amp, dm, df, dd;
        for (const auto& d : deltas) {
            amp.push_back(d.amp_db);
            dm.push_back(d.dm_s);
            df.push_back(d.df_s);
            dd.push_back(d.dd_s);
        }
        report.summaries[group]["amp_db"] = boxplot_summary(std::move(amp));
        report.summaries[group]["dm_s"] = boxplot_summary(std::move(dm));
        report.summaries[group]["df_s"] = boxplot_summary(std::move(df));
        report.summaries[group]["dd_s"] = boxplot_summary(std::move(dd));
    }
    return report;
}

} // namespace ppg
