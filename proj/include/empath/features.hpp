// features.hpp - fixed-length summary vectors and 1 Hz resampled sequences
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "empath/common.hpp"
#include "empath/csv.hpp"
#include "empath/ingest.hpp"
#include "empath/labels.hpp"
#include "empath/stats.hpp"

namespace empath::features {

inline const std::vector<std::string>& statistic_tags() {
    static const std::vector<std::string> tags = {"mean", "median", "stddev", "autocorr_1s"};
    return tags;
}

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double autocorr_1s = 0.0;
};

// mean / median / sample stddev / lag-L autocorrelation with L = round(fps),
// min 1. r = sum_t (x_t - m)(x_{t+L} - m) / sum_t (x_t - m)^2; series shorter
// than L+1 or with zero variance yields autocorr 0.
inline SummaryStats summarize_series(const std::vector<double>& series, double fps) {
    if (series.empty()) throw ValidationError("summarize_series: empty series");
    if (!(fps > 0.0)) throw ValidationError("summarize_series: fps must be positive");
    for (double v : series) {
        if (!std::isfinite(v)) throw ValidationError("summarize_series: non-finite value in series");
    }
    size_t n = series.size();
    SummaryStats s;
    s.mean = stats::mean(series);
    s.median = stats::median(series);
    double ss = 0.0;
    for (double v : series) ss += (v - s.mean) * (v - s.mean);
    s.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;

    size_t lag = static_cast<size_t>(std::max(1.0, std::round(fps)));
    if (n > lag && ss > 0.0) {
        double num = 0.0;
        for (size_t t = 0; t + lag < n; ++t) {
            num += (series[t] - s.mean) * (series[t + lag] - s.mean);
        }
        s.autocorr_1s = num / ss;
    }
    return s;
}

struct SummarySample {
    std::string participant_id;
    std::string story_id;
    std::vector<double> vector;  // length 4 * F, catalog-major x statistic order
    std::optional<labels::EmpathyLabel> label;

    std::string id() const { return participant_id + "_" + story_id; }
};

inline std::vector<std::string> summary_feature_names(const FeatureCatalog& catalog) {
    std::vector<std::string> names;
    names.reserve(catalog.size() * 4);
    for (const auto& f : catalog.names) {
        for (const auto& tag : statistic_tags()) names.push_back(f + "__" + tag);
    }
    return names;
}

inline std::string base_feature_of(const std::string& summary_name) {
    size_t pos = summary_name.rfind("__");
    if (pos == std::string::npos) throw ValidationError("not a summary feature name: " + summary_name);
    return summary_name.substr(0, pos);
}

// Summary vector over success-filtered frames; catalog order, statistics in
// the order mean, median, stddev, autocorr_1s.
inline SummarySample featurize_session(const ingest::Session& session,
                                       const FeatureCatalog& catalog) {
    SummarySample out;
    out.participant_id = session.meta.participant_id;
    out.story_id = session.meta.story_id;
    std::vector<size_t> rows;
    for (size_t i = 0; i < session.frames.size(); ++i) {
        if (session.frames[i].success) rows.push_back(i);
    }
    if (rows.empty()) {
        throw ValidationError("session " + session.id() + " has no success frames");
    }
    out.vector.reserve(catalog.size() * 4);
    std::vector<double> series(rows.size());
    for (size_t f = 0; f < catalog.size(); ++f) {
        for (size_t k = 0; k < rows.size(); ++k) series[k] = session.frames[rows[k]].values[f];
        SummaryStats s = summarize_series(series, session.nominal_fps);
        out.vector.push_back(s.mean);
        out.vector.push_back(s.median);
        out.vector.push_back(s.stddev);
        out.vector.push_back(s.autocorr_1s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// 1 Hz resampling
// ---------------------------------------------------------------------------

struct ResampledSequence {
    std::string participant_id;
    std::string story_id;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> matrix;  // bins x F; bin t covers [t, t+1)

    std::string id() const { return participant_id + "_" + story_id; }
    size_t bins() const { return matrix.size(); }
};

// Per-bin mean over success frames; an empty bin inherits the previous bin
// (leading empty bins take the next non-empty bin's value).
inline ResampledSequence resample_sequence(const ingest::Session& session,
                                           const FeatureCatalog& catalog) {
    ResampledSequence out;
    out.participant_id = session.meta.participant_id;
    out.story_id = session.meta.story_id;
    out.feature_names = catalog.names;

    double last_ts = -1.0;
    bool any_success = false;
    for (const auto& f : session.frames) {
        if (!f.success) continue;
        any_success = true;
        last_ts = f.timestamp;
    }
    if (!any_success) {
        throw ValidationError("session " + session.id() + " has no success frames");
    }
    size_t n_bins = static_cast<size_t>(std::floor(last_ts)) + 1;
    size_t nf = catalog.size();
    std::vector<std::vector<double>> sums(n_bins, std::vector<double>(nf, 0.0));
    std::vector<long> counts(n_bins, 0);
    for (const auto& f : session.frames) {
        if (!f.success) continue;
        size_t bin = static_cast<size_t>(std::floor(f.timestamp));
        ++counts[bin];
        for (size_t c = 0; c < nf; ++c) sums[bin][c] += f.values[c];
    }
    out.matrix.assign(n_bins, std::vector<double>(nf, 0.0));
    // First pass: bin means; second: fill empties from the left, then seed
    // leading empties from the first filled bin.
    long first_filled = -1;
    for (size_t b = 0; b < n_bins; ++b) {
        if (counts[b] > 0) {
            for (size_t c = 0; c < nf; ++c) out.matrix[b][c] = sums[b][c] / static_cast<double>(counts[b]);
            if (first_filled < 0) first_filled = static_cast<long>(b);
        } else if (first_filled >= 0) {
            out.matrix[b] = out.matrix[b - 1];
        }
    }
    for (long b = first_filled - 1; b >= 0; --b) {
        out.matrix[b] = out.matrix[first_filled];
    }
    return out;
}

// ---------------------------------------------------------------------------
// summary table and file formats
// ---------------------------------------------------------------------------

struct SummaryTable {
    std::vector<std::string> feature_names;  // summary names, feature__stat
    std::vector<SummarySample> samples;

    size_t n_samples() const { return samples.size(); }
    size_t n_features() const { return feature_names.size(); }

    // Labels as 0/1 ints; throws if any sample is unlabeled.
    std::vector<int> label_vector() const {
        std::vector<int> y;
        y.reserve(samples.size());
        for (const auto& s : samples) {
            if (!s.label) throw ValidationError("sample " + s.id() + " has no label");
            y.push_back(*s.label == labels::EmpathyLabel::empathic ? 1 : 0);
        }
        return y;
    }

    std::vector<std::string> sample_ids() const {
        std::vector<std::string> ids;
        ids.reserve(samples.size());
        for (const auto& s : samples) ids.push_back(s.id());
        return ids;
    }

    // Column-restricted copy (keeps sample order and labels).
    SummaryTable restrict_columns(const std::vector<size_t>& cols) const {
        SummaryTable out;
        out.feature_names.reserve(cols.size());
        for (size_t c : cols) out.feature_names.push_back(feature_names[c]);
        out.samples.reserve(samples.size());
        for (const auto& s : samples) {
            SummarySample ns;
            ns.participant_id = s.participant_id;
            ns.story_id = s.story_id;
            ns.label = s.label;
            ns.vector.reserve(cols.size());
            for (size_t c : cols) ns.vector.push_back(s.vector[c]);
            out.samples.push_back(std::move(ns));
        }
        return out;
    }
};

inline SummaryTable featurize_dataset(const ingest::Dataset& ds, const labels::LabelSet* label_set) {
    SummaryTable table;
    table.feature_names = summary_feature_names(ds.catalog);
    table.samples.reserve(ds.sessions.size());
    for (const auto& s : ds.sessions) {
        SummarySample sample = featurize_session(s, ds.catalog);
        if (label_set) {
            auto key = std::make_pair(s.meta.participant_id, s.meta.story_id);
            auto it = label_set->labels.find(key);
            if (it != label_set->labels.end()) sample.label = it->second;
        }
        table.samples.push_back(std::move(sample));
    }
    return table;
}

inline void write_summary_table(const SummaryTable& t, const std::string& path) {
    csv::Writer w(path);
    std::vector<std::string> header = {"participant_id", "story_id", "label"};
    header.insert(header.end(), t.feature_names.begin(), t.feature_names.end());
    w.row(header);
    std::vector<std::string> row;
    for (const auto& s : t.samples) {
        row.clear();
        row.push_back(s.participant_id);
        row.push_back(s.story_id);
        row.push_back(s.label ? labels::to_string(*s.label) : "");
        for (double v : s.vector) row.push_back(format_double(v));
        w.row(row);
    }
}

inline SummaryTable read_summary_table(const std::string& path) {
    csv::Table t = csv::read_file(path);
    int c_pid = t.require_column("participant_id");
    int c_story = t.require_column("story_id");
    int c_label = t.require_column("label");
    SummaryTable out;
    for (size_t i = 0; i < t.header.size(); ++i) {
        if (static_cast<int>(i) == c_pid || static_cast<int>(i) == c_story ||
            static_cast<int>(i) == c_label) {
            continue;
        }
        out.feature_names.push_back(t.header[i]);
    }
    for (const auto& row : t.rows) {
        SummarySample s;
        s.participant_id = row[c_pid];
        s.story_id = row[c_story];
        if (row[c_label] == "empathic") s.label = labels::EmpathyLabel::empathic;
        else if (row[c_label] == "less_empathic") s.label = labels::EmpathyLabel::less_empathic;
        else if (!row[c_label].empty()) throw FormatError(path + ": unknown label '" + row[c_label] + "'");
        s.vector.reserve(out.feature_names.size());
        for (size_t i = 0; i < t.header.size(); ++i) {
            if (static_cast<int>(i) == c_pid || static_cast<int>(i) == c_story ||
                static_cast<int>(i) == c_label) {
                continue;
            }
            bool ok = false;
            double v = parse_double(row[i], &ok);
            if (!ok || !std::isfinite(v)) {
                throw ValidationError(path + ": non-finite summary value for sample " + s.id());
            }
            s.vector.push_back(v);
        }
        out.samples.push_back(std::move(s));
    }
    if (out.samples.empty()) throw ValidationError(path + ": no samples");
    return out;
}

inline void write_resampled(const ResampledSequence& r, const std::string& path) {
    csv::Writer w(path);
    std::vector<std::string> header = {"bin"};
    header.insert(header.end(), r.feature_names.begin(), r.feature_names.end());
    w.row(header);
    std::vector<std::string> row;
    for (size_t b = 0; b < r.matrix.size(); ++b) {
        row.clear();
        row.push_back(std::to_string(b));
        for (double v : r.matrix[b]) row.push_back(format_double(v));
        w.row(row);
    }
}

inline ResampledSequence read_resampled(const std::string& path, const std::string& participant_id,
                                        const std::string& story_id) {
    csv::Table t = csv::read_file(path);
    if (t.header.empty() || t.header[0] != "bin") throw FormatError(path + ": first column must be 'bin'");
    ResampledSequence r;
    r.participant_id = participant_id;
    r.story_id = story_id;
    r.feature_names.assign(t.header.begin() + 1, t.header.end());
    for (const auto& row : t.rows) {
        std::vector<double> vals;
        vals.reserve(r.feature_names.size());
        for (size_t i = 1; i < row.size(); ++i) vals.push_back(parse_double(row[i]));
        r.matrix.push_back(std::move(vals));
    }
    return r;
}

}  // namespace empath::features
