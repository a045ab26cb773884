#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "shootout/util.hpp"

namespace shootout {

// The three forecast categories. Totally ordered: 0 < 1 < 2.
enum class Category : int { Nonsignificant = 0, Significant = 1, Severe = 2 };

inline int category_code(Category c) { return static_cast<int>(c); }

struct InvalidCategory : Error {
    using Error::Error;
};

inline Category category_from_code(int code) {
    if (code < 0 || code > 2)
        throw InvalidCategory("category code out of range: " + std::to_string(code));
    return static_cast<Category>(code);
}

// Forecast targets. Overall is a separately forecast region, not a computed
// union of Z1..Z4.
enum class Zone : int { Z1 = 0, Z2 = 1, Z3 = 2, Z4 = 3, Overall = 4 };

inline const std::vector<Zone>& all_zones() {
    static const std::vector<Zone> z{Zone::Z1, Zone::Z2, Zone::Z3, Zone::Z4, Zone::Overall};
    return z;
}

inline const std::vector<Zone>& sub_zones() {
    static const std::vector<Zone> z{Zone::Z1, Zone::Z2, Zone::Z3, Zone::Z4};
    return z;
}

std::string zone_name(Zone z);
Zone parse_zone(std::string_view name);

struct NotNormalized : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};

// Mutually exclusive, exhaustive probabilities for categories 0/1/2.
struct ProbTriple {
    double p0 = 1.0;
    double p1 = 0.0;
    double p2 = 0.0;

    double operator[](int i) const { return i == 0 ? p0 : (i == 1 ? p1 : p2); }
    double p(Category c) const { return (*this)[category_code(c)]; }
    double p_event() const { return p1 + p2; }

    bool operator==(const ProbTriple&) const = default;
};

constexpr double kTripleTolerance = 1e-9;

ProbTriple make_prob_triple(double p0, double p1, double p2);

// Renormalizes raw non-negative scores into a valid triple.
ProbTriple normalize_triple(double s0, double s1, double s2);

using FeatureMap = std::map<std::string, double>;
using AnswerValue = std::variant<double, std::string>;
using AnswerMap = std::map<std::string, AnswerValue>;

struct SoundingLevel {
    double pressure_hpa = 0;
    double height_m = 0;
    double temp_c = 0;
    double dewpoint_c = 0;
    double wind_kt = 0;
    double wind_deg = 0;
};

// One forecast day's input snapshot: everything a system may see before its
// forecast is issued.
struct Scenario {
    std::string date;  // ISO yyyy-mm-dd; sorts chronologically as text
    std::map<Zone, FeatureMap> features;
    std::vector<SoundingLevel> sounding;
    std::map<std::string, AnswerMap> answers;  // operator id -> answers
    std::string climatology_tag;
};

struct ForecastSet {
    std::string forecaster_id;
    std::string date;
    std::map<Zone, ProbTriple> entries;
    std::int64_t runtime_ms = 0;
    int questions_asked = 0;
    std::string operator_id;
};

struct CoverageSpec {
    std::string forecaster_id;
    std::set<Zone> zones;
};

struct UnknownForecaster : Error {
    using Error::Error;
};

// Declared zone sets for the built-in systems. WILLARD forecasts only the
// overall region; OCI skips zone 1; everyone else covers all four zones.
CoverageSpec default_coverage(const std::string& forecaster_id);

}  // namespace shootout
