// common.hpp - error hierarchy, string helpers, numeric text round-trip
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace empath {

// Error categories map to CLI exit codes: usage 2, validation 3, internal 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

// Malformed input files (bad header, unparseable rows).
struct FormatError : ValidationError {
    using ValidationError::ValidationError;
};

// Operation not defined for the object (e.g. importances of the chance baseline).
struct UnsupportedError : Error {
    using Error::Error;
};

inline std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

// Shortest text form that parses back to the identical double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view raw, bool* ok = nullptr) {
    std::string t = trim(raw);
    if (ok) *ok = true;
    if (t.empty()) {
        if (ok) *ok = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::string lower = t;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "nan" || lower == "-nan" || lower == "na") return std::numeric_limits<double>::quiet_NaN();
    if (lower == "inf" || lower == "+inf") return std::numeric_limits<double>::infinity();
    if (lower == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        if (ok) *ok = false;
        return std::numeric_limits<double>::quiet_NaN();
    }
    return v;
}

inline long parse_long(std::string_view raw) {
    std::string t = trim(raw);
    long v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw FormatError("expected integer, got '" + t + "'");
    }
    return v;
}

// FNV-1a, used for content digests in report files.
inline uint64_t fnv1a(std::string_view s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace empath
