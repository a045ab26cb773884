#include "shootout/domain.hpp"

#include <cmath>

namespace shootout {

std::string zone_name(Zone z) {
    switch (z) {
        case Zone::Z1: return "Z1";
        case Zone::Z2: return "Z2";
        case Zone::Z3: return "Z3";
        case Zone::Z4: return "Z4";
        case Zone::Overall: return "Overall";
    }
    throw Error("bad zone value");
}

Zone parse_zone(std::string_view name) {
    if (name == "Z1") return Zone::Z1;
    if (name == "Z2") return Zone::Z2;
    if (name == "Z3") return Zone::Z3;
    if (name == "Z4") return Zone::Z4;
    if (name == "Overall") return Zone::Overall;
    throw Error("unknown zone: '" + std::string(name) + "'");
}

ProbTriple make_prob_triple(double p0, double p1, double p2) {
    if (!std::isfinite(p0) || !std::isfinite(p1) || !std::isfinite(p2))
        throw OutOfRange("probability component not finite");
    for (double p : {p0, p1, p2})
        if (p < 0.0 || p > 1.0)
            throw OutOfRange("probability component outside [0,1]: " + format_double(p));
    double sum = p0 + p1 + p2;
    if (std::fabs(sum - 1.0) > kTripleTolerance)
        throw NotNormalized("probabilities sum to " + format_double(sum) + ", expected 1");
    return ProbTriple{p0, p1, p2};
}

ProbTriple normalize_triple(double s0, double s1, double s2) {
    if (s0 < 0 || s1 < 0 || s2 < 0) throw OutOfRange("negative score");
    double sum = s0 + s1 + s2;
    if (sum <= 0) throw OutOfRange("all scores zero; nothing to normalize");
    double p0 = s0 / sum;
    double p1 = s1 / sum;
    // Close the last component exactly so the invariant never trips on roundoff.
    double p2 = 1.0 - p0 - p1;
    if (p2 < 0) p2 = 0;
    return make_prob_triple(p0, p1, p2);
}

CoverageSpec default_coverage(const std::string& forecaster_id) {
    if (forecaster_id == "willard") return {forecaster_id, {Zone::Overall}};
    if (forecaster_id == "oci") return {forecaster_id, {Zone::Z2, Zone::Z3, Zone::Z4}};
    static const std::set<std::string> full = {"alps",  "swap",   "kasspr",       "convex",
                                               "gopad", "gopad_static", "gopad_learning",
                                               "climatology"};
    if (full.count(forecaster_id))
        return {forecaster_id, {Zone::Z1, Zone::Z2, Zone::Z3, Zone::Z4}};
    throw UnknownForecaster("no declared coverage for forecaster '" + forecaster_id + "'");
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        } else {
            out += f;
        }
    }
    return out;
}

}  // namespace shootout
