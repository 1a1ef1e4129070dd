// analysis.hpp - interpretability outputs over CV reports and raw features
//
// Three consumers of a finished experiment: ranked per-feature contributions
// (mean selected importance + Welch test + direction), class-conditional
// 1 s curves, and per-group ablation runs.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "empath/catalog.hpp"
#include "empath/common.hpp"
#include "empath/csv.hpp"
#include "empath/features.hpp"
#include "empath/harness.hpp"
#include "empath/labels.hpp"
#include "empath/stats.hpp"

namespace empath::analysis {

constexpr double kAlpha = 0.01;  // significance level used throughout

// =====================================================================
// Feature contribution ranking
// =====================================================================

enum class Direction { higher_in_empathic, lower_in_empathic };

inline const char* to_string(Direction d) {
    return d == Direction::higher_in_empathic ? "higher_in_empathic" : "lower_in_empathic";
}

struct FeatureFinding {
    std::string feature;  // summary name, base__statistic
    double mean_importance = 0.0;
    stats::TestResult welch;
    Direction direction = Direction::higher_in_empathic;
    bool significant = false;  // welch.p_value < kAlpha
    double empathic_mean = 0.0;
    double less_empathic_mean = 0.0;
};

// Mean-over-folds importance (0 in folds where the feature was unselected),
// descending; each finding gets a Welch test on the per-sample summary values
// split by true label. Degenerate features (zero variance within a class)
// keep p = 1 rather than aborting the ranking.
inline std::vector<FeatureFinding> rank_feature_contributions(
    const harness::CVReport& report, const features::SummaryTable& table, size_t top_n) {
    if (report.folds.empty()) throw ValidationError("rank_feature_contributions: empty report");
    if (report.config.model.algorithm == learn::Algorithm::chance_baseline) {
        throw UnsupportedError("rank_feature_contributions: model has no importances");
    }
    if (report.feature_names != table.feature_names || report.sample_ids != table.sample_ids()) {
        throw ValidationError("rank_feature_contributions: report and table do not match");
    }
    std::vector<int> y = table.label_vector();
    size_t nf = table.n_features();
    double n_folds = static_cast<double>(report.folds.size());

    std::vector<double> importance(nf, 0.0);
    std::map<std::string, size_t> column_of;
    for (size_t j = 0; j < nf; ++j) column_of[table.feature_names[j]] = j;
    for (const harness::FoldResult& f : report.folds) {
        for (const auto& [name, value] : f.importances) {
            importance[column_of.at(name)] += value / n_folds;
        }
    }

    std::vector<size_t> order(nf);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return importance[a] > importance[b]; });
    if (top_n < order.size()) order.resize(top_n);

    std::vector<FeatureFinding> findings;
    findings.reserve(order.size());
    for (size_t j : order) {
        FeatureFinding fd;
        fd.feature = table.feature_names[j];
        fd.mean_importance = importance[j];
        std::vector<double> empathic, less;
        for (size_t i = 0; i < table.n_samples(); ++i) {
            (y[i] == 1 ? empathic : less).push_back(table.samples[i].vector[j]);
        }
        fd.empathic_mean = stats::mean(empathic);
        fd.less_empathic_mean = stats::mean(less);
        fd.direction = fd.empathic_mean > fd.less_empathic_mean ? Direction::higher_in_empathic
                                                                : Direction::lower_in_empathic;
        try {
            fd.welch = stats::welch_t_test(empathic, less);
        } catch (const ValidationError&) {
            fd.welch = {0.0, 1.0, 0.0, "welch_t"};
        }
        fd.significant = fd.welch.p_value < kAlpha;
        findings.push_back(std::move(fd));
    }
    return findings;
}

// =====================================================================
// Class-conditional curves
// =====================================================================

struct ClassCurves {
    std::string feature;
    // Per 1 s bin, mean over the class's sessions covering that bin; NaN when
    // no session of the class reaches the bin.
    std::vector<double> empathic;
    std::vector<double> less_empathic;
    std::vector<long> empathic_sessions;
    std::vector<long> less_empathic_sessions;
    // Overall per-class level: mean of the per-session means.
    double empathic_mean = 0.0;
    double less_empathic_mean = 0.0;
};

inline ClassCurves class_conditional_curves(
    const std::vector<features::ResampledSequence>& sequences, const labels::LabelSet& labels,
    const std::string& feature) {
    if (sequences.empty()) throw ValidationError("class_conditional_curves: no sequences");
    ClassCurves out;
    out.feature = feature;
    size_t max_bins = 0;
    std::vector<int> col_of(sequences.size());
    std::vector<int> label_of(sequences.size());
    bool has_emp = false, has_less = false;
    for (size_t s = 0; s < sequences.size(); ++s) {
        const auto& seq = sequences[s];
        auto it = std::find(seq.feature_names.begin(), seq.feature_names.end(), feature);
        if (it == seq.feature_names.end()) {
            throw ValidationError("class_conditional_curves: sequence " + seq.id() +
                                  " lacks feature '" + feature + "'");
        }
        col_of[s] = static_cast<int>(it - seq.feature_names.begin());
        auto key = std::make_pair(seq.participant_id, seq.story_id);
        auto lab = labels.labels.find(key);
        if (lab == labels.labels.end()) {
            throw ValidationError("class_conditional_curves: no label for session " + seq.id());
        }
        label_of[s] = lab->second == labels::EmpathyLabel::empathic ? 1 : 0;
        (label_of[s] == 1 ? has_emp : has_less) = true;
        max_bins = std::max(max_bins, seq.bins());
    }
    if (!has_emp || !has_less) {
        throw ValidationError("class_conditional_curves: both classes required");
    }

    double nan = std::numeric_limits<double>::quiet_NaN();
    out.empathic.assign(max_bins, nan);
    out.less_empathic.assign(max_bins, nan);
    out.empathic_sessions.assign(max_bins, 0);
    out.less_empathic_sessions.assign(max_bins, 0);
    std::vector<double> sum_emp(max_bins, 0.0), sum_less(max_bins, 0.0);
    double session_mean_emp = 0.0, session_mean_less = 0.0;
    long n_emp = 0, n_less = 0;
    for (size_t s = 0; s < sequences.size(); ++s) {
        const auto& seq = sequences[s];
        size_t col = static_cast<size_t>(col_of[s]);
        double session_sum = 0.0;
        for (size_t b = 0; b < seq.bins(); ++b) {
            double v = seq.matrix[b][col];
            session_sum += v;
            if (label_of[s] == 1) {
                sum_emp[b] += v;
                ++out.empathic_sessions[b];
            } else {
                sum_less[b] += v;
                ++out.less_empathic_sessions[b];
            }
        }
        double session_mean = session_sum / static_cast<double>(seq.bins());
        if (label_of[s] == 1) {
            session_mean_emp += session_mean;
            ++n_emp;
        } else {
            session_mean_less += session_mean;
            ++n_less;
        }
    }
    for (size_t b = 0; b < max_bins; ++b) {
        if (out.empathic_sessions[b] > 0) {
            out.empathic[b] = sum_emp[b] / static_cast<double>(out.empathic_sessions[b]);
        }
        if (out.less_empathic_sessions[b] > 0) {
            out.less_empathic[b] = sum_less[b] / static_cast<double>(out.less_empathic_sessions[b]);
        }
    }
    out.empathic_mean = session_mean_emp / static_cast<double>(n_emp);
    out.less_empathic_mean = session_mean_less / static_cast<double>(n_less);
    return out;
}

// =====================================================================
// Subset ablation
// =====================================================================

struct SubsetResult {
    std::string group;       // feature-group name or "all"
    size_t n_features = 0;   // summary columns in the restricted run
    bool skipped = false;    // empty group: no run performed
    harness::Aggregates aggregate;
};

// One CV per feature group (k_best capped at the group's summary width) plus
// the all-features run. Groups map base feature names as from group_features.
inline std::vector<SubsetResult> subset_evaluation(
    const features::SummaryTable& table,
    const std::map<FeatureGroup, std::vector<std::string>>& groups,
    const harness::CVConfig& config, int jobs = 1) {
    std::vector<SubsetResult> results;
    for (const auto& [group, base_names] : groups) {
        SubsetResult res;
        res.group = to_string(group);
        std::set<std::string> members(base_names.begin(), base_names.end());
        std::vector<size_t> cols;
        for (size_t j = 0; j < table.n_features(); ++j) {
            if (members.count(features::base_feature_of(table.feature_names[j]))) {
                cols.push_back(j);
            }
        }
        res.n_features = cols.size();
        if (cols.empty()) {
            res.skipped = true;
            results.push_back(std::move(res));
            continue;
        }
        features::SummaryTable sub = table.restrict_columns(cols);
        harness::CVConfig c = config;
        c.k_best = std::min(config.k_best, cols.size());
        res.aggregate = harness::run_cv(sub, c, jobs).aggregate;
        results.push_back(std::move(res));
    }
    SubsetResult all;
    all.group = "all";
    all.n_features = table.n_features();
    harness::CVConfig c = config;
    c.k_best = std::min(config.k_best, table.n_features());
    all.aggregate = harness::run_cv(table, c, jobs).aggregate;
    results.push_back(std::move(all));
    return results;
}

// =====================================================================
// CSV exports
// =====================================================================

inline void write_findings(const std::vector<FeatureFinding>& findings, const std::string& path) {
    csv::Writer w(path);
    w.row({"rank", "feature", "mean_importance", "welch_t", "dof", "p_value", "direction",
           "significant", "empathic_mean", "less_empathic_mean"});
    for (size_t i = 0; i < findings.size(); ++i) {
        const FeatureFinding& f = findings[i];
        w.row({std::to_string(i + 1), f.feature, format_double(f.mean_importance),
               format_double(f.welch.statistic), format_double(f.welch.dof),
               format_double(f.welch.p_value), to_string(f.direction),
               f.significant ? "1" : "0", format_double(f.empathic_mean),
               format_double(f.less_empathic_mean)});
    }
}

inline void write_curves(const ClassCurves& c, const std::string& path) {
    csv::Writer w(path);
    w.row({"bin", "empathic_mean", "less_empathic_mean", "empathic_sessions",
           "less_empathic_sessions"});
    for (size_t b = 0; b < c.empathic.size(); ++b) {
        w.row({std::to_string(b), format_double(c.empathic[b]), format_double(c.less_empathic[b]),
               std::to_string(c.empathic_sessions[b]), std::to_string(c.less_empathic_sessions[b])});
    }
}

inline void write_curve_means(const ClassCurves& c, const std::string& path) {
    csv::Writer w(path);
    w.row({"feature", "empathic_mean", "less_empathic_mean"});
    w.row({c.feature, format_double(c.empathic_mean), format_double(c.less_empathic_mean)});
}

inline void write_subsets(const std::vector<SubsetResult>& results, const std::string& path) {
    csv::Writer w(path);
    w.row({"group", "n_features", "skipped", "accuracy", "auc_roc", "auc_pr", "precision_macro",
           "recall_macro"});
    for (const SubsetResult& r : results) {
        if (r.skipped) {
            w.row({r.group, "0", "1", "", "", "", "", ""});
        } else {
            w.row({r.group, std::to_string(r.n_features), "0", format_double(r.aggregate.accuracy),
                   format_double(r.aggregate.auc_roc), format_double(r.aggregate.auc_pr),
                   format_double(r.aggregate.precision_macro),
                   format_double(r.aggregate.recall_macro)});
        }
    }
}

}  // namespace empath::analysis
