#include "shootout/classify.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

namespace shootout {

std::string report_kind_name(ReportKind k) {
    switch (k) {
        case ReportKind::Hail: return "hail";
        case ReportKind::Wind: return "wind";
        case ReportKind::RainRate: return "rain_rate";
        case ReportKind::FunnelCloud: return "funnel_cloud";
        case ReportKind::Tornado: return "tornado";
    }
    throw Error("bad report kind");
}

ReportKind parse_report_kind(std::string_view name) {
    if (name == "hail") return ReportKind::Hail;
    if (name == "wind") return ReportKind::Wind;
    if (name == "rain_rate") return ReportKind::RainRate;
    if (name == "funnel_cloud") return ReportKind::FunnelCloud;
    if (name == "tornado") return ReportKind::Tornado;
    throw Error("unknown report kind: '" + std::string(name) + "'");
}

Category classify_report(const EventReport& report) {
    switch (report.kind) {
        case ReportKind::Hail:
            if (report.magnitude >= 0.75) return Category::Severe;
            if (report.magnitude >= 0.25) return Category::Significant;
            return Category::Nonsignificant;
        case ReportKind::Wind:
            // The written definitions leave fractional speeds in (49,50) open;
            // we put the significant/severe boundary exactly at 50 kt.
            if (report.magnitude >= 50.0) return Category::Severe;
            if (report.magnitude >= 35.0) return Category::Significant;
            return Category::Nonsignificant;
        case ReportKind::RainRate:
            // Rain has no severe tier.
            return report.magnitude >= 2.0 ? Category::Significant : Category::Nonsignificant;
        case ReportKind::FunnelCloud:
            return Category::Significant;
        case ReportKind::Tornado:
            return Category::Severe;
    }
    return Category::Nonsignificant;
}

Observation aggregate_day(Zone zone, const std::vector<EventReport>& reports, TimeWindow window) {
    Observation obs;
    obs.zone = zone;
    obs.category = Category::Nonsignificant;
    std::set<std::tuple<Zone, int, ReportKind, double>> seen;
    for (const EventReport& r : reports) {
        if (r.zone != zone)
            throw ZoneMismatch("report zone " + zone_name(r.zone) + " differs from " +
                               zone_name(zone));
        obs.date = r.date;
        if (!window.contains(r.time_utc)) continue;
        if (!seen.insert({r.zone, r.time_utc, r.kind, r.magnitude}).second) continue;
        Category c = classify_report(r);
        if (category_code(c) > 0) obs.supporting_reports.push_back(r);
        obs.category = std::max(obs.category, c);
    }
    return obs;
}

Observation overall_observation(const std::map<Zone, Observation>& per_zone) {
    Observation out;
    out.zone = Zone::Overall;
    out.category = Category::Nonsignificant;
    for (Zone z : sub_zones()) {
        auto it = per_zone.find(z);
        if (it == per_zone.end()) throw MissingZone("missing observation for " + zone_name(z));
        out.date = it->second.date;
        out.category = std::max(out.category, it->second.category);
    }
    return out;
}

std::vector<EventReport> read_report_ledger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open observation ledger: " + path);
    std::vector<EventReport> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("date,", 0) == 0) continue;  // header
        auto f = split_csv_line(line);
        if (f.size() != 6)
            throw Error(path + ":" + std::to_string(lineno) + ": expected 6 fields, got " +
                        std::to_string(f.size()));
        EventReport r;
        r.date = f[0];
        r.zone = parse_zone(f[1]);
        r.time_utc = static_cast<int>(parse_double(f[2]));
        r.kind = parse_report_kind(f[3]);
        r.magnitude = f[4].empty() ? 0.0 : parse_double(f[4]);
        r.source = f[5];
        if (r.time_utc < 0 || r.time_utc > 1440)
            throw Error(path + ":" + std::to_string(lineno) + ": time_utc outside 0..1440");
        if (r.magnitude < 0)
            throw Error(path + ":" + std::to_string(lineno) + ": negative magnitude");
        out.push_back(std::move(r));
    }
    return out;
}

void write_report_ledger(const std::string& path, const std::vector<EventReport>& reports) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write observation ledger: " + path);
    out << "date,zone,time_utc,kind,magnitude,source\n";
    for (const EventReport& r : reports) {
        out << join_csv({r.date, zone_name(r.zone), std::to_string(r.time_utc),
                         report_kind_name(r.kind), format_double(r.magnitude), r.source})
            << "\n";
    }
}

}  // namespace shootout
