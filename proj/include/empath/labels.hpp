// labels.hpp - questionnaire scoring, scale consistency, median-split labels
#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "empath/common.hpp"
#include "empath/csv.hpp"
#include "empath/stats.hpp"

namespace empath::labels {

constexpr int kItemCount = 8;
constexpr int kItemMin = 1;
constexpr int kItemMax = 5;

struct QuestionnaireResponse {
    std::string participant_id;
    std::string story_id;
    std::vector<int> items;  // exactly 8 Likert values in [1,5]
};

inline void validate_response(const QuestionnaireResponse& r) {
    if (static_cast<int>(r.items.size()) != kItemCount) {
        throw ValidationError("questionnaire response for " + r.participant_id + "/" + r.story_id +
                              " has " + std::to_string(r.items.size()) + " items, expected 8");
    }
    for (int v : r.items) {
        if (v < kItemMin || v > kItemMax) {
            throw ValidationError("questionnaire item value " + std::to_string(v) +
                                  " outside [1,5] for " + r.participant_id + "/" + r.story_id);
        }
    }
}

// Sum of the 8 Likert items; range [8, 40].
inline int empathy_score(const QuestionnaireResponse& r) {
    validate_response(r);
    int s = 0;
    for (int v : r.items) s += v;
    return s;
}

// alpha = k/(k-1) * (1 - sum(item variances) / variance(totals)), sample
// (n-1) variances throughout. Matrix form: rows = respondents, cols = items.
inline double cronbach_alpha(const std::vector<std::vector<double>>& item_matrix) {
    size_t n = item_matrix.size();
    if (n < 2) throw ValidationError("cronbach_alpha: need at least 2 respondents");
    size_t k = item_matrix[0].size();
    if (k < 2) throw ValidationError("cronbach_alpha: need at least 2 items");
    for (const auto& row : item_matrix) {
        if (row.size() != k) throw ValidationError("cronbach_alpha: ragged item matrix");
    }
    double item_var_sum = 0.0;
    for (size_t j = 0; j < k; ++j) {
        std::vector<double> col(n);
        for (size_t i = 0; i < n; ++i) col[i] = item_matrix[i][j];
        item_var_sum += stats::sample_variance(col);
    }
    std::vector<double> totals(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < k; ++j) totals[i] += item_matrix[i][j];
    }
    double total_var = stats::sample_variance(totals);
    if (total_var <= 0.0) {
        throw ValidationError("cronbach_alpha: zero total-score variance, alpha undefined");
    }
    double kk = static_cast<double>(k);
    return kk / (kk - 1.0) * (1.0 - item_var_sum / total_var);
}

inline double cronbach_alpha(const std::vector<QuestionnaireResponse>& responses) {
    std::vector<std::vector<double>> matrix;
    matrix.reserve(responses.size());
    for (const auto& r : responses) {
        validate_response(r);
        matrix.emplace_back(r.items.begin(), r.items.end());
    }
    return cronbach_alpha(matrix);
}

enum class EmpathyLabel { less_empathic = 0, empathic = 1 };

inline const char* to_string(EmpathyLabel l) {
    return l == EmpathyLabel::empathic ? "empathic" : "less_empathic";
}

struct LabelSet {
    std::map<std::pair<std::string, std::string>, int> scores;  // (participant, story) -> ES
    double median = 0.0;
    std::map<std::pair<std::string, std::string>, EmpathyLabel> labels;
};

// Sample median cutoff; strictly greater scores become empathic. With a
// half-integer median no ties occur and the classes split evenly.
inline LabelSet median_split(const std::map<std::pair<std::string, std::string>, int>& scores) {
    if (scores.size() < 2) throw ValidationError("median_split: need at least 2 scores");
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& [key, s] : scores) values.push_back(static_cast<double>(s));
    LabelSet out;
    out.scores = scores;
    out.median = stats::median(values);
    for (const auto& [key, s] : scores) {
        out.labels[key] = s > out.median ? EmpathyLabel::empathic : EmpathyLabel::less_empathic;
    }
    return out;
}

// ---------------------------------------------------------------------------
// file formats
// ---------------------------------------------------------------------------

// participant_id, story_id, item_1..item_8
inline std::vector<QuestionnaireResponse> read_questionnaire(const std::string& path) {
    csv::Table t = csv::read_file(path);
    int c_pid = t.require_column("participant_id");
    int c_story = t.require_column("story_id");
    std::vector<int> item_cols(kItemCount);
    for (int i = 0; i < kItemCount; ++i) {
        item_cols[i] = t.require_column("item_" + std::to_string(i + 1));
    }
    std::vector<QuestionnaireResponse> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        QuestionnaireResponse r;
        r.participant_id = row[c_pid];
        r.story_id = row[c_story];
        for (int i = 0; i < kItemCount; ++i) {
            r.items.push_back(static_cast<int>(parse_long(row[item_cols[i]])));
        }
        validate_response(r);
        out.push_back(std::move(r));
    }
    return out;
}

inline LabelSet label_responses(const std::vector<QuestionnaireResponse>& responses) {
    std::map<std::pair<std::string, std::string>, int> scores;
    for (const auto& r : responses) {
        auto key = std::make_pair(r.participant_id, r.story_id);
        if (scores.count(key)) {
            throw ValidationError("duplicate questionnaire response for " + r.participant_id + "/" +
                                  r.story_id);
        }
        scores[key] = empathy_score(r);
    }
    return median_split(scores);
}

inline void write_labels(const LabelSet& ls, const std::string& path) {
    csv::Writer w(path);
    w.row({"participant_id", "story_id", "score", "label"});
    for (const auto& [key, score] : ls.scores) {
        w.row({key.first, key.second, std::to_string(score), to_string(ls.labels.at(key))});
    }
}

inline LabelSet read_labels(const std::string& path) {
    csv::Table t = csv::read_file(path);
    int c_pid = t.require_column("participant_id");
    int c_story = t.require_column("story_id");
    int c_score = t.require_column("score");
    int c_label = t.require_column("label");
    LabelSet ls;
    std::vector<double> values;
    for (const auto& row : t.rows) {
        auto key = std::make_pair(row[c_pid], row[c_story]);
        ls.scores[key] = static_cast<int>(parse_long(row[c_score]));
        values.push_back(static_cast<double>(ls.scores[key]));
        if (row[c_label] == "empathic") ls.labels[key] = EmpathyLabel::empathic;
        else if (row[c_label] == "less_empathic") ls.labels[key] = EmpathyLabel::less_empathic;
        else throw FormatError(path + ": unknown label '" + row[c_label] + "'");
    }
    if (ls.scores.empty()) throw ValidationError(path + ": no label rows");
    ls.median = stats::median(values);
    return ls;
}

}  // namespace empath::labels
