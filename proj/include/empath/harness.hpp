// harness.hpp - leakage-free repeated stratified cross-validation
//
// Per fold, strictly in this order and strictly on the training portion:
// standardize -> select top-K by ANOVA F -> fit. Fold jobs run in parallel
// but write into preassigned (repeat, fold) slots, so the report is
// byte-identical regardless of --jobs.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "empath/common.hpp"
#include "empath/csv.hpp"
#include "empath/features.hpp"
#include "empath/learners.hpp"
#include "empath/matrix.hpp"
#include "empath/parallel.hpp"
#include "empath/rng.hpp"
#include "empath/stats.hpp"

namespace empath::harness {

// =====================================================================
// Standardization
// =====================================================================

struct Scaler {
    std::vector<double> mean;
    std::vector<double> stddev;  // sample stddev; 0 marks a constant column
};

inline Scaler standardize_fit(const Matrix& X) {
    if (X.rows < 2) throw ValidationError("standardize_fit: need at least 2 rows");
    Scaler s;
    s.mean.assign(X.cols, 0.0);
    s.stddev.assign(X.cols, 0.0);
    for (size_t j = 0; j < X.cols; ++j) {
        double m = 0.0;
        for (size_t i = 0; i < X.rows; ++i) {
            double v = X.at(i, j);
            if (!std::isfinite(v)) throw ValidationError("standardize_fit: non-finite value");
            m += v;
        }
        m /= static_cast<double>(X.rows);
        double ss = 0.0;
        for (size_t i = 0; i < X.rows; ++i) {
            double d = X.at(i, j) - m;
            ss += d * d;
        }
        s.mean[j] = m;
        s.stddev[j] = std::sqrt(ss / static_cast<double>(X.rows - 1));
    }
    return s;
}

// Constant training columns (stddev 0) map to 0 everywhere.
inline Matrix standardize_apply(const Scaler& s, const Matrix& X) {
    if (X.cols != s.mean.size()) throw ValidationError("standardize_apply: column count mismatch");
    Matrix out(X.rows, X.cols);
    for (size_t j = 0; j < X.cols; ++j) {
        double mu = s.mean[j], sigma = s.stddev[j];
        for (size_t i = 0; i < X.rows; ++i) {
            out.at(i, j) = sigma > 0.0 ? (X.at(i, j) - mu) / sigma : 0.0;
        }
    }
    return out;
}

// =====================================================================
// Feature selection
// =====================================================================

// Top k column indices by two-class ANOVA F, in rank order (best first).
// Equal scores break toward the lower index; constant columns (F = -inf)
// land last.
inline std::vector<size_t> select_top_k_features(const Matrix& X, const std::vector<int>& y,
                                                 size_t k) {
    if (k < 1 || k > X.cols) {
        throw ValidationError("select_top_k_features: k must be in [1, feature count]");
    }
    std::vector<double> f_scores(X.cols);
    std::vector<double> column(X.rows);
    for (size_t j = 0; j < X.cols; ++j) {
        for (size_t i = 0; i < X.rows; ++i) column[i] = X.at(i, j);
        f_scores[j] = stats::anova_f_two_class(column, y);
    }
    std::vector<size_t> order(X.cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return f_scores[a] > f_scores[b]; });
    order.resize(k);
    return order;
}

// =====================================================================
// Cross-validation types
// =====================================================================

struct CVConfig {
    int folds = 5;
    int repeats = 10;
    size_t k_best = 25;
    uint64_t seed = 0;
    learn::ModelSpec model;
};

inline void to_json(nlohmann::json& j, const CVConfig& c) {
    j = {{"folds", c.folds},
         {"repeats", c.repeats},
         {"k_best", c.k_best},
         {"seed", c.seed},
         {"model", c.model}};
}

inline void from_json(const nlohmann::json& j, CVConfig& c) {
    c.folds = j.value("folds", 5);
    c.repeats = j.value("repeats", 10);
    c.k_best = j.value("k_best", size_t{25});
    c.seed = j.value("seed", uint64_t{0});
    if (j.contains("model")) c.model = j.at("model").get<learn::ModelSpec>();
}

struct FoldResult {
    int repeat = 0;
    int fold = 0;
    std::vector<std::string> test_ids;  // ascending dataset order
    std::vector<int> y_true;
    std::vector<int> y_pred;
    std::vector<double> scores;
    stats::MetricReport metrics;
    std::vector<std::string> selected_features;  // rank order, best first
    std::map<std::string, double> importances;   // empty when unsupported

    // Fitted artifacts for the leakage audit and reproducibility checks.
    std::vector<double> scaler_mean;
    std::vector<double> scaler_stddev;
    std::vector<size_t> selected_indices;  // rank order into the full feature list
    std::string model_json;                // kept in memory, not written to reports
    uint64_t model_hash = 0;               // fnv1a(model_json), written to reports
};

struct Aggregates {
    double accuracy = 0.0;
    double auc_roc = 0.0;
    double auc_pr = 0.0;
    double precision_macro = 0.0;
    double recall_macro = 0.0;
};

struct CVReport {
    CVConfig config;
    std::vector<std::string> sample_ids;     // dataset order
    std::vector<std::string> feature_names;  // full summary-feature list
    std::vector<FoldResult> folds;           // (repeat, fold) order
    Aggregates aggregate;

    // Out-of-fold correctness pooled in (repeat, fold, position) order;
    // every sample contributes exactly `repeats` entries.
    std::vector<bool> pooled_correctness() const {
        std::vector<bool> out;
        for (const FoldResult& f : folds) {
            for (size_t i = 0; i < f.y_true.size(); ++i) {
                out.push_back(f.y_pred[i] == f.y_true[i]);
            }
        }
        return out;
    }
};

// =====================================================================
// run_cv
// =====================================================================

namespace cv_detail {

// Stratified fold assignment: shuffle each class, deal round-robin.
inline std::vector<int> assign_folds(const std::vector<int>& y, int folds, uint64_t seed) {
    std::vector<size_t> class0, class1;
    for (size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? class1 : class0).push_back(i);
    if (class0.size() < static_cast<size_t>(folds) || class1.size() < static_cast<size_t>(folds)) {
        throw ValidationError("stratification: each class needs at least `folds` samples");
    }
    Rng rng(seed);
    rng.shuffle(class0);
    rng.shuffle(class1);
    std::vector<int> fold_of(y.size(), -1);
    for (size_t i = 0; i < class0.size(); ++i) fold_of[class0[i]] = static_cast<int>(i % folds);
    for (size_t i = 0; i < class1.size(); ++i) fold_of[class1[i]] = static_cast<int>(i % folds);
    return fold_of;
}

inline Matrix gather_rows(const features::SummaryTable& table, const std::vector<size_t>& rows) {
    Matrix m(rows.size(), table.n_features());
    for (size_t r = 0; r < rows.size(); ++r) {
        const auto& v = table.samples[rows[r]].vector;
        std::copy(v.begin(), v.end(), m.row(r).begin());
    }
    return m;
}

inline Matrix take_columns(const Matrix& X, const std::vector<size_t>& cols) {
    Matrix m(X.rows, cols.size());
    for (size_t i = 0; i < X.rows; ++i) {
        for (size_t c = 0; c < cols.size(); ++c) m.at(i, c) = X.at(i, cols[c]);
    }
    return m;
}

}  // namespace cv_detail

inline CVReport run_cv(const features::SummaryTable& table, const CVConfig& config,
                       int jobs = 1) {
    if (config.folds < 2) throw ValidationError("run_cv: folds must be >= 2");
    if (config.repeats < 1) throw ValidationError("run_cv: repeats must be >= 1");
    if (config.k_best < 1 || config.k_best > table.n_features()) {
        throw ValidationError("run_cv: k_best must be in [1, feature count]");
    }
    std::vector<int> y = table.label_vector();

    CVReport report;
    report.config = config;
    report.sample_ids = table.sample_ids();
    report.feature_names = table.feature_names;

    // Partitions are cheap; precompute serially so workers share them.
    std::vector<std::vector<int>> fold_of(config.repeats);
    for (int r = 0; r < config.repeats; ++r) {
        fold_of[r] = cv_detail::assign_folds(y, config.folds,
                                             derive_seed(config.seed, static_cast<uint64_t>(r)));
    }

    size_t n_jobs_total = static_cast<size_t>(config.repeats) * static_cast<size_t>(config.folds);
    report.folds.resize(n_jobs_total);
    parallel_for(n_jobs_total, jobs, [&](size_t slot) {
        int r = static_cast<int>(slot) / config.folds;
        int f = static_cast<int>(slot) % config.folds;

        std::vector<size_t> train_rows, test_rows;
        for (size_t i = 0; i < y.size(); ++i) {
            (fold_of[r][i] == f ? test_rows : train_rows).push_back(i);
        }
        Matrix train_X = cv_detail::gather_rows(table, train_rows);
        Matrix test_X = cv_detail::gather_rows(table, test_rows);
        std::vector<int> train_y, test_y;
        for (size_t i : train_rows) train_y.push_back(y[i]);
        for (size_t i : test_rows) test_y.push_back(y[i]);

        FoldResult fr;
        fr.repeat = r;
        fr.fold = f;
        for (size_t i : test_rows) fr.test_ids.push_back(table.samples[i].id());
        fr.y_true = test_y;

        Scaler scaler = standardize_fit(train_X);
        Matrix train_std = standardize_apply(scaler, train_X);
        Matrix test_std = standardize_apply(scaler, test_X);
        fr.selected_indices = select_top_k_features(train_std, train_y, config.k_best);
        for (size_t c : fr.selected_indices) {
            fr.selected_features.push_back(table.feature_names[c]);
        }
        Matrix train_sel = cv_detail::take_columns(train_std, fr.selected_indices);
        Matrix test_sel = cv_detail::take_columns(test_std, fr.selected_indices);

        learn::ModelSpec fold_spec = config.model;
        fold_spec.seed = derive_seed(config.model.seed, static_cast<uint64_t>(r),
                                     static_cast<uint64_t>(f));
        learn::TrainedModel model = learn::fit(fold_spec, train_sel, train_y);
        model.feature_names = fr.selected_features;

        fr.scores = model.predict_scores(test_sel);
        fr.y_pred = model.predict_labels(test_sel);
        fr.metrics = stats::classification_metrics(test_y, fr.y_pred, fr.scores);
        if (fold_spec.algorithm != learn::Algorithm::chance_baseline) {
            std::vector<double> imp = model.feature_importances();
            for (size_t c = 0; c < imp.size(); ++c) {
                fr.importances[fr.selected_features[c]] = imp[c];
            }
        }
        fr.scaler_mean = std::move(scaler.mean);
        fr.scaler_stddev = std::move(scaler.stddev);
        fr.model_json = learn::serialize_model(model);
        fr.model_hash = fnv1a(fr.model_json);
        report.folds[slot] = std::move(fr);
    });

    // Sum first, divide once: keeps means exact when every fold agrees
    // (the chance baseline on a balanced set must aggregate to exactly 0.5).
    double n_folds = static_cast<double>(report.folds.size());
    for (const FoldResult& fr : report.folds) {
        report.aggregate.accuracy += fr.metrics.accuracy;
        report.aggregate.auc_roc += fr.metrics.auc_roc.value_or(0.0);
        report.aggregate.auc_pr += fr.metrics.auc_pr.value_or(0.0);
        report.aggregate.precision_macro += fr.metrics.precision_macro;
        report.aggregate.recall_macro += fr.metrics.recall_macro;
    }
    report.aggregate.accuracy /= n_folds;
    report.aggregate.auc_roc /= n_folds;
    report.aggregate.auc_pr /= n_folds;
    report.aggregate.precision_macro /= n_folds;
    report.aggregate.recall_macro /= n_folds;
    return report;
}

// =====================================================================
// Model comparison and grid search
// =====================================================================

// McNemar over pooled out-of-fold correctness. Both reports must share the
// dataset, fold structure, and partition seeds so the pairs align.
inline stats::TestResult compare_models(const CVReport& a, const CVReport& b) {
    bool same_structure = a.config.folds == b.config.folds &&
                          a.config.repeats == b.config.repeats && a.config.seed == b.config.seed &&
                          a.sample_ids == b.sample_ids && a.folds.size() == b.folds.size();
    if (same_structure) {
        for (size_t i = 0; i < a.folds.size(); ++i) {
            if (a.folds[i].test_ids != b.folds[i].test_ids ||
                a.folds[i].y_true != b.folds[i].y_true) {
                same_structure = false;
                break;
            }
        }
    }
    if (!same_structure) {
        throw ValidationError("compare_models: fold structures do not match");
    }
    return stats::mcnemar_test(a.pooled_correctness(), b.pooled_correctness());
}

// Ranks by aggregate accuracy, then ROC-AUC; stable on grid order.
inline std::vector<std::pair<learn::ModelSpec, CVReport>> grid_search(
    const features::SummaryTable& table, const std::vector<learn::ModelSpec>& grid,
    const CVConfig& config, int jobs = 1) {
    if (grid.empty()) throw ValidationError("grid_search: empty model grid");
    std::vector<std::pair<learn::ModelSpec, CVReport>> results;
    results.reserve(grid.size());
    for (const learn::ModelSpec& spec : grid) {
        CVConfig c = config;
        c.model = spec;
        results.emplace_back(spec, run_cv(table, c, jobs));
    }
    std::stable_sort(results.begin(), results.end(), [](const auto& x, const auto& y) {
        if (x.second.aggregate.accuracy != y.second.aggregate.accuracy) {
            return x.second.aggregate.accuracy > y.second.aggregate.accuracy;
        }
        return x.second.aggregate.auc_roc > y.second.aggregate.auc_roc;
    });
    return results;
}

// =====================================================================
// Report serialization
// =====================================================================

inline void to_json(nlohmann::json& j, const stats::MetricReport& m) {
    j = {{"accuracy", m.accuracy},
         {"precision_macro", m.precision_macro},
         {"recall_macro", m.recall_macro},
         {"tp", m.tp},
         {"fp", m.fp},
         {"tn", m.tn},
         {"fn", m.fn}};
    j["auc_roc"] = m.auc_roc ? nlohmann::json(*m.auc_roc) : nlohmann::json(nullptr);
    j["auc_pr"] = m.auc_pr ? nlohmann::json(*m.auc_pr) : nlohmann::json(nullptr);
}

inline void metric_report_from_json(const nlohmann::json& j, stats::MetricReport& m) {
    m.accuracy = j.at("accuracy").get<double>();
    m.precision_macro = j.at("precision_macro").get<double>();
    m.recall_macro = j.at("recall_macro").get<double>();
    m.tp = j.at("tp").get<long>();
    m.fp = j.at("fp").get<long>();
    m.tn = j.at("tn").get<long>();
    m.fn = j.at("fn").get<long>();
    m.auc_roc.reset();
    m.auc_pr.reset();
    if (!j.at("auc_roc").is_null()) m.auc_roc = j.at("auc_roc").get<double>();
    if (!j.at("auc_pr").is_null()) m.auc_pr = j.at("auc_pr").get<double>();
}

inline void to_json(nlohmann::json& j, const FoldResult& f) {
    nlohmann::json metrics;
    to_json(metrics, f.metrics);
    j = {{"repeat", f.repeat},
         {"fold", f.fold},
         {"test_ids", f.test_ids},
         {"y_true", f.y_true},
         {"y_pred", f.y_pred},
         {"scores", f.scores},
         {"metrics", metrics},
         {"selected_features", f.selected_features},
         {"importances", f.importances},
         {"scaler_mean", f.scaler_mean},
         {"scaler_stddev", f.scaler_stddev},
         {"selected_indices", f.selected_indices},
         {"model_hash", f.model_hash}};
}

inline void from_json(const nlohmann::json& j, FoldResult& f) {
    f.repeat = j.at("repeat").get<int>();
    f.fold = j.at("fold").get<int>();
    f.test_ids = j.at("test_ids").get<std::vector<std::string>>();
    f.y_true = j.at("y_true").get<std::vector<int>>();
    f.y_pred = j.at("y_pred").get<std::vector<int>>();
    f.scores = j.at("scores").get<std::vector<double>>();
    metric_report_from_json(j.at("metrics"), f.metrics);
    f.selected_features = j.at("selected_features").get<std::vector<std::string>>();
    f.importances = j.at("importances").get<std::map<std::string, double>>();
    f.scaler_mean = j.at("scaler_mean").get<std::vector<double>>();
    f.scaler_stddev = j.at("scaler_stddev").get<std::vector<double>>();
    f.selected_indices = j.at("selected_indices").get<std::vector<size_t>>();
    f.model_json.clear();
    f.model_hash = j.at("model_hash").get<uint64_t>();
}

inline void to_json(nlohmann::json& j, const Aggregates& a) {
    j = {{"accuracy", a.accuracy},
         {"auc_roc", a.auc_roc},
         {"auc_pr", a.auc_pr},
         {"precision_macro", a.precision_macro},
         {"recall_macro", a.recall_macro}};
}

inline void from_json(const nlohmann::json& j, Aggregates& a) {
    a.accuracy = j.at("accuracy").get<double>();
    a.auc_roc = j.at("auc_roc").get<double>();
    a.auc_pr = j.at("auc_pr").get<double>();
    a.precision_macro = j.at("precision_macro").get<double>();
    a.recall_macro = j.at("recall_macro").get<double>();
}

inline void to_json(nlohmann::json& j, const CVReport& r) {
    j = {{"format", "empath-cv-report"},
         {"version", 1},
         {"config", r.config},
         {"sample_ids", r.sample_ids},
         {"feature_names", r.feature_names},
         {"aggregate", r.aggregate},
         {"folds", r.folds}};
}

inline void from_json(const nlohmann::json& j, CVReport& r) {
    if (j.value("format", "") != "empath-cv-report") {
        throw FormatError("not an empath-cv-report document");
    }
    r.config = j.at("config").get<CVConfig>();
    r.sample_ids = j.at("sample_ids").get<std::vector<std::string>>();
    r.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    r.aggregate = j.at("aggregate").get<Aggregates>();
    r.folds = j.at("folds").get<std::vector<FoldResult>>();
}

inline void write_cv_report(const CVReport& r, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write file: " + path);
    out << nlohmann::json(r).dump(2) << '\n';
}

inline CVReport read_cv_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return j.get<CVReport>();
}

// One line per fold, suitable for spreadsheet inspection.
inline void write_fold_csv(const CVReport& r, const std::string& path) {
    csv::Writer w(path);
    w.row({"repeat", "fold", "n_test", "accuracy", "auc_roc", "auc_pr", "precision_macro",
           "recall_macro", "tp", "fp", "tn", "fn", "model_hash"});
    for (const FoldResult& f : r.folds) {
        w.row({std::to_string(f.repeat), std::to_string(f.fold), std::to_string(f.test_ids.size()),
               format_double(f.metrics.accuracy),
               f.metrics.auc_roc ? format_double(*f.metrics.auc_roc) : "",
               f.metrics.auc_pr ? format_double(*f.metrics.auc_pr) : "",
               format_double(f.metrics.precision_macro), format_double(f.metrics.recall_macro),
               std::to_string(f.metrics.tp), std::to_string(f.metrics.fp),
               std::to_string(f.metrics.tn), std::to_string(f.metrics.fn),
               std::to_string(f.model_hash)});
    }
}

inline void write_summary_csv(const CVReport& r, const std::string& path) {
    csv::Writer w(path);
    w.row({"algorithm", "folds", "repeats", "k_best", "seed", "accuracy", "auc_roc", "auc_pr",
           "precision_macro", "recall_macro"});
    w.row({learn::algorithm_name(r.config.model.algorithm), std::to_string(r.config.folds),
           std::to_string(r.config.repeats), std::to_string(r.config.k_best),
           std::to_string(r.config.seed), format_double(r.aggregate.accuracy),
           format_double(r.aggregate.auc_roc), format_double(r.aggregate.auc_pr),
           format_double(r.aggregate.precision_macro), format_double(r.aggregate.recall_macro)});
}

}  // namespace empath::harness
