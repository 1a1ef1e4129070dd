// synth.hpp - synthetic frame-level datasets with planted class effects
//
// Stands in for the human-subject recordings: every session is an AR(1)
// (exponentially smoothed white noise) process per feature, clipped to the
// feature's legal range, with optional class-dependent means. Emits the exact
// file layout ingest consumes plus a questionnaire whose summed scores
// reproduce the planted classes under the median split (at balance 0.5).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "empath/catalog.hpp"
#include "empath/common.hpp"
#include "empath/ingest.hpp"
#include "empath/labels.hpp"
#include "empath/rng.hpp"

namespace empath::synth {

// =====================================================================
// Config
// =====================================================================

struct Effect {
    std::string feature;
    double empathic_mean = 0.0;
    double less_empathic_mean = 0.0;
    double noise_stddev = 0.1;
    double smoothing = 0.6;  // AR(1) coefficient in [0, 1)
};

struct SynthConfig {
    int participants = 40;
    int stories_per_participant = 3;  // story ids S1..S3
    double duration = 180.0;          // seconds per session
    double fps = 30.0;
    std::string schema = "full";  // "full" (709 columns) or "minimal" (68 columns)
    std::vector<Effect> effects;
    double balance = 0.5;  // fraction of empathic sessions
    uint64_t seed = 0;
};

inline void to_json(nlohmann::json& j, const Effect& e) {
    j = {{"feature", e.feature},
         {"empathic_mean", e.empathic_mean},
         {"less_empathic_mean", e.less_empathic_mean},
         {"noise_stddev", e.noise_stddev},
         {"smoothing", e.smoothing}};
}

inline void from_json(const nlohmann::json& j, Effect& e) {
    e.feature = j.at("feature").get<std::string>();
    e.empathic_mean = j.at("empathic_mean").get<double>();
    e.less_empathic_mean = j.at("less_empathic_mean").get<double>();
    e.noise_stddev = j.value("noise_stddev", 0.1);
    e.smoothing = j.value("smoothing", 0.6);
}

inline void to_json(nlohmann::json& j, const SynthConfig& c) {
    j = {{"participants", c.participants},
         {"stories_per_participant", c.stories_per_participant},
         {"duration", c.duration},
         {"fps", c.fps},
         {"schema", c.schema},
         {"effects", c.effects},
         {"balance", c.balance},
         {"seed", c.seed}};
}

inline void from_json(const nlohmann::json& j, SynthConfig& c) {
    c.participants = j.value("participants", 40);
    c.stories_per_participant = j.value("stories_per_participant", 3);
    c.duration = j.value("duration", 180.0);
    c.fps = j.value("fps", 30.0);
    c.schema = j.value("schema", std::string("full"));
    c.effects = j.value("effects", std::vector<Effect>{});
    c.balance = j.value("balance", 0.5);
    c.seed = j.value("seed", uint64_t{0});
}

// =====================================================================
// Feature schemas
// =====================================================================

namespace schema_detail {

inline void push_range(std::vector<std::string>& v, const std::string& prefix, int lo, int hi) {
    for (int i = lo; i <= hi; ++i) v.push_back(prefix + std::to_string(i));
}

}  // namespace schema_detail

// The full OpenFace 2.x visual block: 709 columns.
inline std::vector<std::string> full_schema() {
    using schema_detail::push_range;
    std::vector<std::string> v;
    v.insert(v.end(), {"gaze_0_x", "gaze_0_y", "gaze_0_z", "gaze_1_x", "gaze_1_y", "gaze_1_z",
                       "gaze_angle_x", "gaze_angle_y"});
    push_range(v, "eye_lmk_x_", 0, 55);
    push_range(v, "eye_lmk_y_", 0, 55);
    push_range(v, "eye_lmk_X_", 0, 55);
    push_range(v, "eye_lmk_Y_", 0, 55);
    push_range(v, "eye_lmk_Z_", 0, 55);
    v.insert(v.end(), {"pose_Tx", "pose_Ty", "pose_Tz", "pose_Rx", "pose_Ry", "pose_Rz"});
    push_range(v, "x_", 0, 67);
    push_range(v, "y_", 0, 67);
    push_range(v, "X_", 0, 67);
    push_range(v, "Y_", 0, 67);
    push_range(v, "Z_", 0, 67);
    v.insert(v.end(), {"p_scale", "p_rx", "p_ry", "p_rz", "p_tx", "p_ty"});
    push_range(v, "p_", 0, 33);
    for (const char* au : {"01", "02", "04", "05", "06", "07", "09", "10", "12", "14", "15", "17",
                           "20", "23", "25", "26", "45"}) {
        v.push_back(std::string("AU") + au + "_r");
    }
    for (const char* au : {"01", "02", "04", "05", "06", "07", "09", "10", "12", "14", "15", "17",
                           "20", "23", "25", "26", "28", "45"}) {
        v.push_back(std::string("AU") + au + "_c");
    }
    return v;
}

// A 68-column cut that still covers all five feature groups; keeps the
// acceptance pipelines fast.
inline std::vector<std::string> minimal_schema() {
    using schema_detail::push_range;
    std::vector<std::string> v;
    v.insert(v.end(), {"gaze_0_x", "gaze_0_y", "gaze_0_z", "gaze_1_x", "gaze_1_y", "gaze_1_z",
                       "gaze_angle_x", "gaze_angle_y"});
    push_range(v, "eye_lmk_x_", 0, 3);
    push_range(v, "eye_lmk_X_", 0, 3);
    v.insert(v.end(), {"pose_Tx", "pose_Ty", "pose_Tz", "pose_Rx", "pose_Ry", "pose_Rz"});
    push_range(v, "x_", 0, 3);
    push_range(v, "y_", 0, 3);
    v.insert(v.end(), {"X_0", "Y_0", "Z_0", "Z_1"});
    v.insert(v.end(), {"p_scale", "p_rx", "p_ry", "p_rz", "p_tx", "p_ty"});
    push_range(v, "p_", 0, 9);
    for (const char* au : {"01", "02", "04", "06", "12", "14", "15", "17", "25"}) {
        v.push_back(std::string("AU") + au + "_r");
    }
    for (const char* au : {"01", "04", "12", "14", "15", "23", "25", "28", "45"}) {
        v.push_back(std::string("AU") + au + "_c");
    }
    return v;
}

inline std::vector<std::string> schema_features(const std::string& schema) {
    if (schema == "full") return full_schema();
    if (schema == "minimal") return minimal_schema();
    throw ValidationError("unknown schema '" + schema + "' (expected full or minimal)");
}

// =====================================================================
// Generation
// =====================================================================

struct SynthResult {
    ingest::Dataset dataset;
    labels::LabelSet truth;  // planted classes, keyed like median_split output
    std::vector<labels::QuestionnaireResponse> questionnaire;
};

namespace gen_detail {

// Class-independent base level for a non-effect feature, hashed from its name
// so columns differ but remain reproducible.
struct BaseProcess {
    double mean = 0.0;
    double stddev = 0.1;
    double smoothing = 0.6;
    double presence_rate = 0.0;  // presence features only
};

inline BaseProcess base_process(const std::string& name, const FeatureClass& fc) {
    double u = static_cast<double>(fnv1a(name) >> 11) * 0x1.0p-53;  // stable in [0,1)
    BaseProcess p;
    if (fc.fau_kind == FauKind::presence) {
        p.presence_rate = 0.15 + 0.35 * u;  // keep both values likely over a session
        return p;
    }
    if (fc.fau_kind == FauKind::intensity) {
        p.mean = 0.4 + 1.6 * u;  // well inside [0, 5]
        p.stddev = 0.3;
        return p;
    }
    switch (fc.group) {
        case FeatureGroup::head_pose: p.mean = (u - 0.5) * 100.0; p.stddev = 5.0; break;
        case FeatureGroup::facial_landmark: p.mean = u * 200.0; p.stddev = 2.0; break;
        case FeatureGroup::pdm_parameter: p.mean = (u - 0.5) * 2.0; p.stddev = 0.2; break;
        case FeatureGroup::eye_gaze: p.mean = (u - 0.5) * 0.8; p.stddev = 0.1; break;
        case FeatureGroup::facial_action_unit: break;  // handled above
    }
    return p;
}

// Stationary AR(1) around `mean`: marginal stddev is exactly `stddev` and the
// lag-k autocorrelation is smoothing^k (before clipping).
class Ar1 {
public:
    Ar1(double mean, double stddev, double smoothing, Rng& rng)
        : mean_(mean), stddev_(stddev), phi_(smoothing), rng_(rng) {
        e_ = stddev_ * rng_.normal();
        innovation_ = stddev_ * std::sqrt(std::max(0.0, 1.0 - phi_ * phi_));
    }

    double next() {
        double v = mean_ + e_;
        e_ = phi_ * e_ + innovation_ * rng_.normal();
        return v;
    }

private:
    double mean_, stddev_, phi_;
    double e_, innovation_ = 0.0;
    Rng& rng_;
};

}  // namespace gen_detail

inline void validate_config(const SynthConfig& c, const FeatureCatalog& catalog) {
    if (c.participants < 1) throw ValidationError("synth: participants must be >= 1");
    if (c.stories_per_participant < 1 || c.stories_per_participant > 3) {
        throw ValidationError("synth: stories_per_participant must be in [1, 3] (story ids S1..S3)");
    }
    if (c.participants * c.stories_per_participant < 2) {
        throw ValidationError("synth: need at least 2 sessions (one per class)");
    }
    if (!(c.duration > 0.0) || !(c.fps > 0.0)) {
        throw ValidationError("synth: duration and fps must be positive");
    }
    double frames = c.duration * c.fps;
    if (frames < 2.0) throw ValidationError("synth: need at least 2 frames per session");
    if (std::fabs(frames - std::round(frames)) > 1e-9) {
        throw ValidationError("synth: duration * fps must be a whole frame count");
    }
    if (!(c.balance > 0.0 && c.balance < 1.0)) {
        throw ValidationError("synth: balance must be in (0, 1)");
    }
    std::map<std::string, int> seen;
    for (const Effect& e : c.effects) {
        int idx = catalog.index_of(e.feature);
        if (idx < 0) {
            throw ValidationError("synth: effect feature '" + e.feature + "' not in schema");
        }
        if (seen.count(e.feature)) {
            throw ValidationError("synth: duplicate effect for feature '" + e.feature + "'");
        }
        seen[e.feature] = 1;
        const FeatureClass& fc = catalog.classes[static_cast<size_t>(idx)];
        auto check_mean = [&](double m) {
            if (fc.fau_kind == FauKind::presence && m != 0.0 && m != 1.0) {
                throw ValidationError("synth: presence feature '" + e.feature +
                                      "' needs means of exactly 0 or 1");
            }
            if (fc.fau_kind == FauKind::intensity && (m < 0.0 || m > 5.0)) {
                throw ValidationError("synth: intensity mean for '" + e.feature +
                                      "' outside [0, 5]");
            }
        };
        check_mean(e.empathic_mean);
        check_mean(e.less_empathic_mean);
        if (!(e.noise_stddev >= 0.0)) throw ValidationError("synth: noise_stddev must be >= 0");
        if (!(e.smoothing >= 0.0 && e.smoothing < 1.0)) {
            throw ValidationError("synth: smoothing must be in [0, 1)");
        }
    }
}

inline SynthResult generate_dataset(const SynthConfig& config) {
    FeatureCatalog catalog = FeatureCatalog::from_names(schema_features(config.schema));
    validate_config(config, catalog);

    size_t n_features = catalog.size();
    size_t n_sessions =
        static_cast<size_t>(config.participants) * static_cast<size_t>(config.stories_per_participant);
    long frames = static_cast<long>(std::llround(config.duration * config.fps));

    // Effect lookup by catalog index.
    std::vector<const Effect*> effect_of(n_features, nullptr);
    for (const Effect& e : config.effects) {
        effect_of[static_cast<size_t>(catalog.index_of(e.feature))] = &e;
    }

    // Plant classes: shuffle session slots, first floor(balance * n) empathic.
    // floor (not round) keeps the strictly-greater median split consistent
    // with the planted classes when n is odd.
    size_t n_empathic = static_cast<size_t>(std::floor(config.balance * static_cast<double>(n_sessions)));
    n_empathic = std::max<size_t>(1, std::min(n_empathic, n_sessions - 1));
    std::vector<size_t> slots(n_sessions);
    for (size_t i = 0; i < n_sessions; ++i) slots[i] = i;
    {
        Rng class_rng(derive_seed(config.seed, 0xc1a55));
        class_rng.shuffle(slots);
    }
    std::vector<bool> is_empathic(n_sessions, false);
    for (size_t i = 0; i < n_empathic; ++i) is_empathic[slots[i]] = true;

    SynthResult out;
    out.dataset.catalog = catalog;
    out.dataset.sessions.resize(n_sessions);

    int pid_width = config.participants >= 100 ? 3 : 2;
    Rng score_rng(derive_seed(config.seed, 0x5c09e));
    std::map<std::pair<std::string, std::string>, int> scores;
    for (size_t s = 0; s < n_sessions; ++s) {
        int p = static_cast<int>(s) / config.stories_per_participant;
        int story = static_cast<int>(s) % config.stories_per_participant;
        std::string pnum = std::to_string(p + 1);
        size_t pad = pnum.size() < static_cast<size_t>(pid_width)
                         ? static_cast<size_t>(pid_width) - pnum.size()
                         : 0;
        std::string pid = "P" + std::string(pad, '0') + pnum;
        std::string sid = "S" + std::to_string(story + 1);

        ingest::Session& session = out.dataset.sessions[s];
        session.meta = {pid, sid, (p + story) % 2 == 0 ? "1PNV" : "3PNV"};

        // Questionnaire: empathic scores land in [28, 36], less-empathic in
        // [12, 20]; the bands never overlap, so the global median falls
        // between them (balance 0.5) and the split recovers the classes.
        int score = is_empathic[s] ? 28 + static_cast<int>(score_rng.index(9))
                                   : 12 + static_cast<int>(score_rng.index(9));
        scores[{pid, sid}] = score;
        labels::QuestionnaireResponse qr;
        qr.participant_id = pid;
        qr.story_id = sid;
        int base = score / labels::kItemCount;
        int rem = score % labels::kItemCount;
        qr.items.assign(labels::kItemCount, base);
        for (int k = 0; k < rem; ++k) {
            qr.items[(static_cast<int>(s) + k) % labels::kItemCount] += 1;
        }
        out.questionnaire.push_back(std::move(qr));

        // Frames: one column at a time so each feature has its own derived
        // stream and sessions generate independently.
        session.frames.resize(static_cast<size_t>(frames));
        for (long t = 0; t < frames; ++t) {
            ingest::FrameRecord& fr = session.frames[static_cast<size_t>(t)];
            fr.frame_index = t + 1;
            fr.timestamp = static_cast<double>(t) / config.fps;
            fr.confidence = 0.98;
            fr.success = true;
            fr.values.resize(n_features);
        }
        for (size_t f = 0; f < n_features; ++f) {
            Rng rng(derive_seed(config.seed, s, f));
            const FeatureClass& fc = catalog.classes[f];
            const Effect* eff = effect_of[f];
            if (fc.fau_kind == FauKind::presence) {
                if (eff) {  // validated binary: constant stream per class
                    double v = is_empathic[s] ? eff->empathic_mean : eff->less_empathic_mean;
                    for (long t = 0; t < frames; ++t) {
                        session.frames[static_cast<size_t>(t)].values[f] = v;
                    }
                } else {
                    double rate = gen_detail::base_process(catalog.names[f], fc).presence_rate;
                    for (long t = 0; t < frames; ++t) {
                        session.frames[static_cast<size_t>(t)].values[f] =
                            rng.uniform() < rate ? 1.0 : 0.0;
                    }
                }
                continue;
            }
            double mean, stddev, smoothing;
            if (eff) {
                mean = is_empathic[s] ? eff->empathic_mean : eff->less_empathic_mean;
                stddev = eff->noise_stddev;
                smoothing = eff->smoothing;
            } else {
                gen_detail::BaseProcess bp = gen_detail::base_process(catalog.names[f], fc);
                mean = bp.mean;
                stddev = bp.stddev;
                smoothing = bp.smoothing;
            }
            gen_detail::Ar1 process(mean, stddev, smoothing, rng);
            bool clip = fc.fau_kind == FauKind::intensity;
            for (long t = 0; t < frames; ++t) {
                double v = process.next();
                if (clip) v = std::clamp(v, 0.0, 5.0);
                session.frames[static_cast<size_t>(t)].values[f] = v;
            }
        }
        session.nominal_fps =
            static_cast<double>(frames - 1) /
            (session.frames.back().timestamp - session.frames.front().timestamp);
        session.success_fraction = 1.0;
    }

    // Truth carries the planted classes; the median over the emitted scores is
    // recorded so downstream consumers see the same cutoff the labels module
    // would compute.
    out.truth.scores = scores;
    out.truth.median = labels::median_split(scores).median;
    for (size_t s = 0; s < n_sessions; ++s) {
        const auto& meta = out.dataset.sessions[s].meta;
        out.truth.labels[{meta.participant_id, meta.story_id}] =
            is_empathic[s] ? labels::EmpathyLabel::empathic : labels::EmpathyLabel::less_empathic;
    }
    return out;
}

// Emits the ingest layout (sessions/ + metadata.csv) plus questionnaire.csv
// and truth_labels.csv.
inline void write_synth(const SynthResult& r, const std::string& out_dir) {
    namespace fs = std::filesystem;
    ingest::write_dataset(r.dataset, out_dir);
    fs::path root(out_dir);
    {
        csv::Writer w((root / "questionnaire.csv").string());
        std::vector<std::string> header = {"participant_id", "story_id"};
        for (int k = 1; k <= labels::kItemCount; ++k) header.push_back("item_" + std::to_string(k));
        w.row(header);
        for (const auto& qr : r.questionnaire) {
            std::vector<std::string> row = {qr.participant_id, qr.story_id};
            for (int v : qr.items) row.push_back(std::to_string(v));
            w.row(row);
        }
    }
    labels::write_labels(r.truth, (root / "truth_labels.csv").string());
}

}  // namespace empath::synth
