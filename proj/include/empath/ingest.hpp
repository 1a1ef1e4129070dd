// ingest.hpp - frame-level visual feature files: parsing, validation, cleaning
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "empath/catalog.hpp"
#include "empath/common.hpp"
#include "empath/csv.hpp"

namespace empath::ingest {

constexpr double kConstantTolerance = 1e-12;  // pooled max-min at or below this is "constant"
constexpr double kLowQualityThreshold = 0.5;  // sessions below this success fraction get flagged

struct FrameRecord {
    long frame_index = 0;
    double timestamp = 0.0;
    double confidence = 0.0;
    bool success = false;
    std::vector<double> values;

    bool operator==(const FrameRecord& o) const {
        if (frame_index != o.frame_index || success != o.success) return false;
        if (timestamp != o.timestamp || confidence != o.confidence) return false;
        if (values.size() != o.values.size()) return false;
        for (size_t i = 0; i < values.size(); ++i) {
            bool both_nan = std::isnan(values[i]) && std::isnan(o.values[i]);
            if (!both_nan && values[i] != o.values[i]) return false;
        }
        return true;
    }
};

struct SessionMeta {
    std::string participant_id;
    std::string story_id;        // S1 / S2 / S3
    std::string narrative_voice;  // 1PNV / 3PNV

    bool operator==(const SessionMeta& o) const = default;
};

struct Session {
    SessionMeta meta;
    std::vector<FrameRecord> frames;
    double nominal_fps = 0.0;
    double success_fraction = 0.0;

    std::string id() const { return meta.participant_id + "_" + meta.story_id; }
    bool low_quality() const { return success_fraction < kLowQualityThreshold; }

    bool operator==(const Session& o) const {
        return meta == o.meta && frames == o.frames && nominal_fps == o.nominal_fps;
    }
};

struct Dataset {
    FeatureCatalog catalog;
    std::vector<Session> sessions;
};

inline void validate_meta(const SessionMeta& meta) {
    if (meta.participant_id.empty()) throw ValidationError("empty participant_id");
    if (meta.story_id != "S1" && meta.story_id != "S2" && meta.story_id != "S3") {
        throw ValidationError("story_id must be one of S1/S2/S3, got '" + meta.story_id + "'");
    }
    if (meta.narrative_voice != "1PNV" && meta.narrative_voice != "3PNV") {
        throw ValidationError("narrative_voice must be 1PNV or 3PNV, got '" + meta.narrative_voice + "'");
    }
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace detail {

struct HeaderLayout {
    int frame = -1;
    int face_id = -1;
    int timestamp = -1;
    int confidence = -1;
    int success = -1;
    std::vector<int> feature_cols;        // positions of feature columns
    std::vector<std::string> feature_names;
    size_t total = 0;
};

inline HeaderLayout parse_header(const std::string& line, const std::string& path) {
    auto cells = split(line, ',');
    HeaderLayout h;
    h.total = cells.size();
    std::set<std::string> seen;
    for (size_t i = 0; i < cells.size(); ++i) {
        std::string name = trim(cells[i]);
        if (name.empty()) throw FormatError(path + ": empty header column at position " + std::to_string(i + 1));
        if (!seen.insert(name).second) throw FormatError(path + ": duplicate header column '" + name + "'");
        int idx = static_cast<int>(i);
        if (name == "frame") h.frame = idx;
        else if (name == "face_id") h.face_id = idx;
        else if (name == "timestamp") h.timestamp = idx;
        else if (name == "confidence") h.confidence = idx;
        else if (name == "success") h.success = idx;
        else {
            h.feature_cols.push_back(idx);
            h.feature_names.push_back(name);
        }
    }
    if (h.timestamp < 0) throw FormatError(path + ": header missing 'timestamp' column");
    if (h.confidence < 0) throw FormatError(path + ": header missing 'confidence' column");
    if (h.success < 0) throw FormatError(path + ": header missing 'success' column");
    if (h.feature_cols.empty()) throw FormatError(path + ": no feature columns in header");
    return h;
}

}  // namespace detail

// Parses one OpenFace-convention CSV into a Session. Frames keep file order;
// nominal_fps = (frames - 1) / (last_ts - first_ts).
inline Session parse_session(const std::string& path, const SessionMeta& meta,
                             FeatureCatalog* catalog_out = nullptr) {
    validate_meta(meta);
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open session file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto layout = detail::parse_header(line, path);
    FeatureCatalog catalog = FeatureCatalog::from_names(layout.feature_names);

    Session session;
    session.meta = meta;
    long data_row = 0;
    long success_count = 0;
    std::vector<std::string> cells;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++data_row;
        cells = split(line, ',');
        if (cells.size() != layout.total) {
            throw FormatError(path + ": row " + std::to_string(data_row) + " has " +
                              std::to_string(cells.size()) + " cells, expected " +
                              std::to_string(layout.total));
        }
        FrameRecord frame;
        frame.frame_index = layout.frame >= 0 ? parse_long(cells[layout.frame]) : data_row;
        bool ok = false;
        frame.timestamp = parse_double(cells[layout.timestamp], &ok);
        if (!ok || !std::isfinite(frame.timestamp) || frame.timestamp < 0.0) {
            throw ValidationError(path + ": bad timestamp at row " + std::to_string(data_row));
        }
        frame.confidence = parse_double(cells[layout.confidence], &ok);
        if (!ok || !(frame.confidence >= 0.0 && frame.confidence <= 1.0)) {
            throw ValidationError(path + ": confidence outside [0,1] at row " + std::to_string(data_row));
        }
        double succ = parse_double(cells[layout.success], &ok);
        if (!ok || (succ != 0.0 && succ != 1.0)) {
            throw ValidationError(path + ": success must be 0 or 1 at row " + std::to_string(data_row));
        }
        frame.success = succ == 1.0;
        if (!session.frames.empty() && frame.timestamp <= session.frames.back().timestamp) {
            throw ValidationError(path + ": timestamp not strictly increasing at row " +
                                  std::to_string(data_row));
        }
        frame.values.resize(layout.feature_cols.size());
        for (size_t f = 0; f < layout.feature_cols.size(); ++f) {
            double v = parse_double(cells[layout.feature_cols[f]]);  // unparseable -> NaN, cleaned later
            const FeatureClass& fc = catalog.classes[f];
            if (std::isfinite(v) && fc.fau_kind == FauKind::presence && v != 0.0 && v != 1.0) {
                throw ValidationError(path + ": presence feature " + catalog.names[f] +
                                      " has non-binary value at row " + std::to_string(data_row));
            }
            if (std::isfinite(v) && fc.fau_kind == FauKind::intensity && (v < 0.0 || v > 5.0)) {
                throw ValidationError(path + ": intensity feature " + catalog.names[f] +
                                      " outside [0,5] at row " + std::to_string(data_row));
            }
            frame.values[f] = v;
        }
        if (frame.success) ++success_count;
        session.frames.push_back(std::move(frame));
    }
    if (session.frames.empty()) throw ValidationError(path + ": no data rows (empty session)");
    if (session.frames.size() < 2) {
        throw ValidationError(path + ": single-frame session, nominal_fps undefined");
    }
    double span = session.frames.back().timestamp - session.frames.front().timestamp;
    session.nominal_fps = static_cast<double>(session.frames.size() - 1) / span;
    session.success_fraction =
        static_cast<double>(success_count) / static_cast<double>(session.frames.size());
    if (catalog_out) *catalog_out = std::move(catalog);
    return session;
}

// Writes a Session back in the same format with full double precision, so
// parse -> write -> parse is the identity.
inline void write_session(const Session& session, const FeatureCatalog& catalog,
                          const std::string& path) {
    csv::Writer w(path);
    std::vector<std::string> header = {"frame", "face_id", "timestamp", "confidence", "success"};
    header.insert(header.end(), catalog.names.begin(), catalog.names.end());
    w.row(header);
    std::vector<std::string> row;
    for (const auto& f : session.frames) {
        row.clear();
        row.push_back(std::to_string(f.frame_index));
        row.push_back("0");
        row.push_back(format_double(f.timestamp));
        row.push_back(format_double(f.confidence));
        row.push_back(f.success ? "1" : "0");
        for (double v : f.values) row.push_back(format_double(v));
        w.row(row);
    }
}

// ---------------------------------------------------------------------------
// dataset load / store (sidecar metadata file maps file -> session identity)
// ---------------------------------------------------------------------------

inline Dataset load_dataset(const std::string& data_dir) {
    namespace fs = std::filesystem;
    fs::path root(data_dir);
    csv::Table meta = csv::read_file((root / "metadata.csv").string());
    int c_file = meta.require_column("file");
    int c_pid = meta.require_column("participant_id");
    int c_story = meta.require_column("story_id");
    int c_voice = meta.require_column("narrative_voice");

    Dataset ds;
    bool first = true;
    for (const auto& row : meta.rows) {
        SessionMeta sm{row[c_pid], row[c_story], row[c_voice]};
        FeatureCatalog catalog;
        Session s = parse_session((root / row[c_file]).string(), sm, &catalog);
        if (first) {
            ds.catalog = std::move(catalog);
            first = false;
        } else if (!(ds.catalog == catalog)) {
            throw ValidationError("session " + s.id() + " has a different feature catalog");
        }
        ds.sessions.push_back(std::move(s));
    }
    if (ds.sessions.empty()) throw ValidationError("metadata.csv lists no sessions");
    return ds;
}

inline void write_dataset(const Dataset& ds, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path root(out_dir);
    fs::create_directories(root / "sessions");
    csv::Writer meta((root / "metadata.csv").string());
    meta.row({"file", "participant_id", "story_id", "narrative_voice"});
    for (const auto& s : ds.sessions) {
        std::string rel = "sessions/" + s.id() + ".csv";
        write_session(s, ds.catalog, (root / rel).string());
        meta.row({rel, s.meta.participant_id, s.meta.story_id, s.meta.narrative_voice});
    }
}

// ---------------------------------------------------------------------------
// cleaning
// ---------------------------------------------------------------------------

struct RemovedFeature {
    std::string name;
    std::string reason;  // "all_non_finite" | "constant"
};

namespace detail {

// Session-local imputation value for one retained column: median of finite
// values; presence features take the majority finite value (ties -> 0) to
// keep them binary.
inline double session_impute_value(const Session& s, size_t col, const FeatureClass& fc, bool& found) {
    std::vector<double> finite;
    finite.reserve(s.frames.size());
    long ones = 0, zeros = 0;
    for (const auto& f : s.frames) {
        double v = f.values[col];
        if (std::isfinite(v)) {
            finite.push_back(v);
            if (fc.fau_kind == FauKind::presence) (v == 1.0 ? ones : zeros)++;
        }
    }
    found = !finite.empty();
    if (!found) return 0.0;
    if (fc.fau_kind == FauKind::presence) return ones > zeros ? 1.0 : 0.0;
    std::sort(finite.begin(), finite.end());
    size_t n = finite.size();
    double med = n % 2 ? finite[n / 2] : 0.5 * (finite[n / 2 - 1] + finite[n / 2]);
    return med;
}

}  // namespace detail

// Removes columns that are entirely non-finite or pooled-constant across all
// frames of all sessions, then imputes remaining non-finite entries with the
// session-level median (dataset-level fallback when a session has no finite
// value in that column).
inline std::pair<Dataset, std::vector<RemovedFeature>> clean_features(const Dataset& input) {
    if (input.sessions.empty()) throw ValidationError("clean_features: empty dataset");
    size_t n_features = input.catalog.size();

    std::vector<double> mn(n_features, std::numeric_limits<double>::infinity());
    std::vector<double> mx(n_features, -std::numeric_limits<double>::infinity());
    std::vector<long> finite_count(n_features, 0);
    for (const auto& s : input.sessions) {
        for (const auto& f : s.frames) {
            for (size_t c = 0; c < n_features; ++c) {
                double v = f.values[c];
                if (!std::isfinite(v)) continue;
                ++finite_count[c];
                if (v < mn[c]) mn[c] = v;
                if (v > mx[c]) mx[c] = v;
            }
        }
    }

    std::vector<bool> keep(n_features, false);
    std::vector<RemovedFeature> removed;
    std::vector<size_t> kept_cols;
    for (size_t c = 0; c < n_features; ++c) {
        if (finite_count[c] == 0) {
            removed.push_back({input.catalog.names[c], "all_non_finite"});
        } else if (mx[c] - mn[c] <= kConstantTolerance) {
            removed.push_back({input.catalog.names[c], "constant"});
        } else {
            keep[c] = true;
            kept_cols.push_back(c);
        }
    }
    if (kept_cols.empty()) throw ValidationError("clean_features: all features degenerate");

    Dataset out;
    std::vector<std::string> kept_names;
    kept_names.reserve(kept_cols.size());
    for (size_t c : kept_cols) kept_names.push_back(input.catalog.names[c]);
    out.catalog = FeatureCatalog::from_names(std::move(kept_names));

    // Dataset-level fallback imputation values.
    std::vector<double> pooled_impute(kept_cols.size(), 0.0);
    for (size_t k = 0; k < kept_cols.size(); ++k) {
        size_t c = kept_cols[k];
        if (finite_count[c] == 0) continue;
        std::vector<double> finite;
        finite.reserve(static_cast<size_t>(finite_count[c]));
        for (const auto& s : input.sessions) {
            for (const auto& f : s.frames) {
                if (std::isfinite(f.values[c])) finite.push_back(f.values[c]);
            }
        }
        std::sort(finite.begin(), finite.end());
        size_t n = finite.size();
        if (input.catalog.classes[c].fau_kind == FauKind::presence) {
            long ones = 0;
            for (double v : finite) ones += v == 1.0;
            pooled_impute[k] = ones > static_cast<long>(n) - ones ? 1.0 : 0.0;
        } else {
            pooled_impute[k] = n % 2 ? finite[n / 2] : 0.5 * (finite[n / 2 - 1] + finite[n / 2]);
        }
    }

    out.sessions.reserve(input.sessions.size());
    for (const auto& s : input.sessions) {
        Session ns;
        ns.meta = s.meta;
        ns.nominal_fps = s.nominal_fps;
        ns.success_fraction = s.success_fraction;
        ns.frames.reserve(s.frames.size());

        std::vector<double> impute(kept_cols.size());
        std::vector<bool> needs_impute(kept_cols.size(), false);
        for (size_t k = 0; k < kept_cols.size(); ++k) {
            size_t c = kept_cols[k];
            bool has_nonfinite = false;
            for (const auto& f : s.frames) {
                if (!std::isfinite(f.values[c])) { has_nonfinite = true; break; }
            }
            if (!has_nonfinite) continue;
            needs_impute[k] = true;
            bool found = false;
            impute[k] = detail::session_impute_value(s, c, input.catalog.classes[c], found);
            if (!found) impute[k] = pooled_impute[k];
        }

        for (const auto& f : s.frames) {
            FrameRecord nf;
            nf.frame_index = f.frame_index;
            nf.timestamp = f.timestamp;
            nf.confidence = f.confidence;
            nf.success = f.success;
            nf.values.resize(kept_cols.size());
            for (size_t k = 0; k < kept_cols.size(); ++k) {
                double v = f.values[kept_cols[k]];
                nf.values[k] = (needs_impute[k] && !std::isfinite(v)) ? impute[k] : v;
            }
            ns.frames.push_back(std::move(nf));
        }
        out.sessions.push_back(std::move(ns));
    }
    return {std::move(out), std::move(removed)};
}

}  // namespace empath::ingest
