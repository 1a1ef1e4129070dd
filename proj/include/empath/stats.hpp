// stats.hpp - evaluation metrics and significance tests
//
// Small-sample exactness matters here: AUC uses the rank statistic with tied
// scores counted half, and the tail probabilities come from the regularized
// incomplete gamma/beta functions rather than normal approximations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "empath/common.hpp"

namespace empath::stats {

// ---------------------------------------------------------------------------
// special functions
// ---------------------------------------------------------------------------

namespace detail {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;
constexpr double kFpMin = 1e-300;

inline double gamma_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Lentz continued fraction for the upper tail Q(s, x), x > s + 1.
inline double gamma_cf(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

inline double beta_cf(double a, double b, double x) {
    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace detail

// P(s, x) = gamma(s, x) / Gamma(s), the lower tail.
inline double regularized_incomplete_gamma(double s, double x) {
    if (s <= 0.0 || x < 0.0 || !std::isfinite(s) || !std::isfinite(x)) {
        throw ValidationError("regularized_incomplete_gamma: need s > 0, x >= 0");
    }
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return detail::gamma_series(s, x);
    return 1.0 - detail::gamma_cf(s, x);
}

// I_x(a, b), the regularized incomplete beta.
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0 || !std::isfinite(x)) {
        throw ValidationError("regularized_incomplete_beta: need a,b > 0 and x in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cf(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

// Upper tail of the chi-square distribution with dof degrees of freedom.
inline double chi_square_sf(double x, double dof) {
    if (dof <= 0.0) throw ValidationError("chi_square_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return 1.0 - regularized_incomplete_gamma(dof / 2.0, x / 2.0);
}

// Two-tailed p for a Student t statistic with (possibly fractional) dof.
inline double t_two_tailed_p(double t, double dof) {
    if (dof <= 0.0) throw ValidationError("t_two_tailed_p: dof must be positive");
    double x = dof / (dof + t * t);
    return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

// ---------------------------------------------------------------------------
// basic sample statistics
// ---------------------------------------------------------------------------

inline double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double sample_variance(const std::vector<double>& x) {
    size_t n = x.size();
    if (n < 2) return 0.0;
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - 1);
}

inline double median(std::vector<double> x) {
    if (x.empty()) throw ValidationError("median of empty sample");
    std::sort(x.begin(), x.end());
    size_t n = x.size();
    return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// ---------------------------------------------------------------------------
// classification metrics
// ---------------------------------------------------------------------------

struct MetricReport {
    double accuracy = 0.0;
    std::optional<double> auc_roc;  // absent when y_true is single-class
    std::optional<double> auc_pr;
    double precision_macro = 0.0;
    double recall_macro = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
};

namespace detail {

// Rank statistic with average ranks for ties:
// AUC = (sum of positive ranks - n_pos(n_pos+1)/2) / (n_pos * n_neg).
inline double auc_roc_rank(const std::vector<int>& y, const std::vector<double>& s) {
    size_t n = y.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return s[a] < s[b]; });
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && s[order[j + 1]] == s[order[i]]) ++j;
        double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    double pos_rank_sum = 0.0;
    double n_pos = 0.0, n_neg = 0.0;
    for (size_t k = 0; k < n; ++k) {
        if (y[k] == 1) {
            pos_rank_sum += rank[k];
            n_pos += 1.0;
        } else {
            n_neg += 1.0;
        }
    }
    return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

// Step-wise (right-continuous) interpolation of the PR curve; tied scores
// enter as one threshold group.
inline double auc_pr_step(const std::vector<int>& y, const std::vector<double>& s) {
    size_t n = y.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return s[a] > s[b]; });
    double total_pos = 0.0;
    for (int v : y) total_pos += (v == 1);
    double tp = 0.0, fp = 0.0, area = 0.0, prev_recall = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && s[order[j + 1]] == s[order[i]]) ++j;
        for (size_t k = i; k <= j; ++k) {
            if (y[order[k]] == 1) tp += 1.0; else fp += 1.0;
        }
        double precision = tp / (tp + fp);
        double recall = tp / total_pos;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return area;
}

}  // namespace detail

inline MetricReport classification_metrics(const std::vector<int>& y_true,
                                           const std::vector<int>& y_pred,
                                           const std::vector<double>& scores) {
    size_t n = y_true.size();
    if (n == 0 || y_pred.size() != n || scores.size() != n) {
        throw ValidationError("classification_metrics: length mismatch or empty input");
    }
    MetricReport r;
    for (size_t i = 0; i < n; ++i) {
        bool t = y_true[i] == 1, p = y_pred[i] == 1;
        if (t && p) ++r.tp;
        else if (!t && p) ++r.fp;
        else if (t && !p) ++r.fn;
        else ++r.tn;
    }
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(n);

    // Macro average over the two classes; an empty denominator contributes 0.
    auto safe_div = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
    double prec_pos = safe_div(r.tp, r.tp + r.fp);
    double prec_neg = safe_div(r.tn, r.tn + r.fn);
    double rec_pos = safe_div(r.tp, r.tp + r.fn);
    double rec_neg = safe_div(r.tn, r.tn + r.fp);
    r.precision_macro = 0.5 * (prec_pos + prec_neg);
    r.recall_macro = 0.5 * (rec_pos + rec_neg);

    bool has_pos = (r.tp + r.fn) > 0, has_neg = (r.tn + r.fp) > 0;
    if (has_pos && has_neg) {
        r.auc_roc = detail::auc_roc_rank(y_true, scores);
        r.auc_pr = detail::auc_pr_step(y_true, scores);
    }
    return r;
}

// ---------------------------------------------------------------------------
// significance tests
// ---------------------------------------------------------------------------

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double dof = 0.0;
    std::string test_name;
};

// Continuity-corrected McNemar over paired correctness vectors. The
// correction base is clamped at zero so |b-c| < 1 cannot go negative.
inline TestResult mcnemar_test(const std::vector<bool>& correct_a,
                               const std::vector<bool>& correct_b) {
    if (correct_a.size() != correct_b.size()) {
        throw ValidationError("mcnemar_test: paired vectors must have equal length");
    }
    double b = 0.0, c = 0.0;
    for (size_t i = 0; i < correct_a.size(); ++i) {
        if (correct_a[i] && !correct_b[i]) b += 1.0;
        if (!correct_a[i] && correct_b[i]) c += 1.0;
    }
    TestResult r;
    r.test_name = "mcnemar";
    r.dof = 1.0;
    if (b + c == 0.0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    double base = std::max(std::fabs(b - c) - 1.0, 0.0);
    r.statistic = base * base / (b + c);
    r.p_value = chi_square_sf(r.statistic, 1.0);
    return r;
}

// Welch's two-sample t-test (unequal variances), Welch-Satterthwaite dof.
inline TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) {
        throw ValidationError("welch_t_test: each sample needs at least 2 values");
    }
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double va = sample_variance(a), vb = sample_variance(b);
    if (va <= 0.0 || vb <= 0.0) {
        throw ValidationError("welch_t_test: zero-variance sample");
    }
    double se2 = va / na + vb / nb;
    TestResult r;
    r.test_name = "welch_t";
    r.statistic = (mean(a) - mean(b)) / std::sqrt(se2);
    r.dof = se2 * se2 /
            (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    r.p_value = t_two_tailed_p(r.statistic, r.dof);
    return r;
}

// One-way ANOVA F between two classes; the selection score in the harness.
// Pooled-constant features score -inf (rank last); zero within-class scatter
// with distinct means scores +inf (rank first).
inline double anova_f_two_class(const std::vector<double>& values, const std::vector<int>& labels) {
    size_t n = values.size();
    if (labels.size() != n || n == 0) throw ValidationError("anova_f_two_class: length mismatch");
    double n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (size_t i = 0; i < n; ++i) {
        if (labels[i] == 1) { n1 += 1; s1 += values[i]; }
        else { n0 += 1; s0 += values[i]; }
    }
    if (n0 == 0 || n1 == 0) throw ValidationError("anova_f_two_class: both classes required");
    double m0 = s0 / n0, m1 = s1 / n1, grand = (s0 + s1) / (n0 + n1);
    double ss_between = n0 * (m0 - grand) * (m0 - grand) + n1 * (m1 - grand) * (m1 - grand);
    double ss_within = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double m = labels[i] == 1 ? m1 : m0;
        ss_within += (values[i] - m) * (values[i] - m);
    }
    double dof_within = n0 + n1 - 2.0;
    if (ss_within <= 0.0) {
        if (ss_between <= 0.0) return -std::numeric_limits<double>::infinity();
        return std::numeric_limits<double>::infinity();
    }
    return ss_between / (ss_within / dof_within);
}

}  // namespace empath::stats
