#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppg/features.hpp"
#include "ppg/prototype.hpp"

namespace ppg {

// Median IBIs of a subject's Q1/mid/Q4 bins.
struct IbiTriple {
    std::string subject;
    double t_d = 0.0; // Q1 (decreased IBI)
    double t_n = 0.0; // mid
    double t_i = 0.0; // Q4 (increased IBI)
};

enum class DecreaseClass { LD, SD };
enum class IncreaseClass { LI, SI };

struct CategoryAssignment {
    std::string subject;
    double r_d = 1.0; // t_d / t_n
    double r_i = 1.0; // t_i / t_n
    DecreaseClass d_class = DecreaseClass::SD;
    IncreaseClass i_class = IncreaseClass::SI;
};

std::pair<double, double> compute_ratios(const IbiTriple& t);

// LD: r_d strictly below the cohort median; LI: r_i strictly above.
// The median element lands on the S side.
std::vector<CategoryAssignment> split_cohort(const std::vector<IbiTriple>& triples);

struct BoxplotSummary {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;  // most extreme datum within 1.5 IQR of the box
    double whisker_high = 0.0;
    std::vector<double> outliers;
};

BoxplotSummary boxplot_summary(std::vector<double> values);

struct SubjectBinned {
    std::string subject;
    Prototype d; // Q1-bin prototype, smoothed
    Prototype n; // mid-bin prototype, smoothed
    Prototype i; // Q4-bin prototype, smoothed
};

// Outer-bin feature minus mid-bin feature for one subject/bin pair.
struct FeatureDelta {
    std::string subject;
    double amp_db = 0.0; // 20 log10(amp_outer / amp_mid)
    double dm_s = 0.0;   // marker position shifts, cyclically reduced
    double df_s = 0.0;
    double dd_s = 0.0;
};

struct FeatureChangeReport {
    std::vector<CategoryAssignment> assignments;
    // "LD"/"SD" hold D-vs-N deltas, "SI"/"LI" hold I-vs-N deltas.
    std::map<std::string, std::vector<FeatureDelta>> groups;
    // group -> {"amp_db","dm_s","df_s","dd_s"} -> summary
    std::map<std::string, std::map<std::string, BoxplotSummary>> summaries;
    // subject -> both outer-bin median IBIs within 5% of the mid bin
    std::map<std::string, bool> small_spread;
};

FeatureChangeReport feature_changes(const std::vector<SubjectBinned>& subjects);

} // namespace ppg
