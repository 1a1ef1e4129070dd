// catalog.hpp - feature naming conventions and the five-way grouping
#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "empath/common.hpp"

namespace empath {

enum class FeatureGroup { eye_gaze, facial_action_unit, facial_landmark, head_pose, pdm_parameter };

enum class FauKind { none, intensity, presence };

inline const char* to_string(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::eye_gaze: return "eye_gaze";
        case FeatureGroup::facial_action_unit: return "facial_action_unit";
        case FeatureGroup::facial_landmark: return "facial_landmark";
        case FeatureGroup::head_pose: return "head_pose";
        case FeatureGroup::pdm_parameter: return "pdm_parameter";
    }
    return "?";
}

inline const std::vector<FeatureGroup>& all_feature_groups() {
    static const std::vector<FeatureGroup> groups = {
        FeatureGroup::eye_gaze, FeatureGroup::facial_action_unit, FeatureGroup::facial_landmark,
        FeatureGroup::head_pose, FeatureGroup::pdm_parameter};
    return groups;
}

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// AU<digits>_r or AU<digits>_c
inline FauKind classify_fau(std::string_view name) {
    if (name.size() < 5 || name.substr(0, 2) != "AU") return FauKind::none;
    std::string_view tail = name.substr(name.size() - 2);
    if (tail != "_r" && tail != "_c") return FauKind::none;
    if (!all_digits(name.substr(2, name.size() - 4))) return FauKind::none;
    return tail == "_r" ? FauKind::intensity : FauKind::presence;
}

}  // namespace detail

struct FeatureClass {
    FeatureGroup group;
    FauKind fau_kind = FauKind::none;
};

// Classifies an OpenFace-style column name. Throws listed by the caller for
// anything that matches no convention.
inline bool classify_feature(const std::string& name, FeatureClass& out) {
    if (name.rfind("gaze_", 0) == 0) {
        out = {FeatureGroup::eye_gaze};
        return true;
    }
    if (name.rfind("eye_lmk_", 0) == 0) {
        out = {FeatureGroup::facial_landmark};
        return true;
    }
    if (name.rfind("pose_", 0) == 0) {
        out = {FeatureGroup::head_pose};
        return true;
    }
    FauKind fk = detail::classify_fau(name);
    if (fk != FauKind::none) {
        out = {FeatureGroup::facial_action_unit, fk};
        return true;
    }
    if (name.rfind("p_", 0) == 0) {
        out = {FeatureGroup::pdm_parameter};
        return true;
    }
    // 2-D and 3-D face landmarks: x_0..x_67, y_*, X_*, Y_*, Z_*
    if (name.size() >= 3 && name[1] == '_' &&
        (name[0] == 'x' || name[0] == 'y' || name[0] == 'X' || name[0] == 'Y' || name[0] == 'Z') &&
        detail::all_digits(std::string_view(name).substr(2))) {
        out = {FeatureGroup::facial_landmark};
        return true;
    }
    return false;
}

struct FeatureCatalog {
    std::vector<std::string> names;
    std::vector<FeatureClass> classes;  // aligned with names

    size_t size() const { return names.size(); }

    int index_of(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return static_cast<int>(i);
        }
        return -1;
    }

    static FeatureCatalog from_names(std::vector<std::string> names) {
        FeatureCatalog cat;
        cat.classes.reserve(names.size());
        std::string unclassified;
        for (const auto& n : names) {
            FeatureClass fc;
            if (!classify_feature(n, fc)) {
                if (!unclassified.empty()) unclassified += ", ";
                unclassified += n;
                fc = {FeatureGroup::eye_gaze};
            }
            cat.classes.push_back(fc);
        }
        if (!unclassified.empty()) {
            throw ValidationError("unclassified feature columns: " + unclassified);
        }
        cat.names = std::move(names);
        return cat;
    }

    bool operator==(const FeatureCatalog& o) const { return names == o.names; }
};

// Five-way partition of the catalog; validates names so a hand-built catalog
// with unknown entries fails here too.
inline std::map<FeatureGroup, std::vector<std::string>> group_features(const FeatureCatalog& catalog) {
    std::map<FeatureGroup, std::vector<std::string>> out;
    for (FeatureGroup g : all_feature_groups()) out[g] = {};
    std::string unclassified;
    for (const auto& n : catalog.names) {
        FeatureClass fc;
        if (!classify_feature(n, fc)) {
            if (!unclassified.empty()) unclassified += ", ";
            unclassified += n;
            continue;
        }
        out[fc.group].push_back(n);
    }
    if (!unclassified.empty()) {
        throw ValidationError("unclassified feature columns: " + unclassified);
    }
    return out;
}

}  // namespace empath
