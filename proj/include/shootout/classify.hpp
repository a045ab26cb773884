#pragma once

#include <map>
#include <string>
#include <vector>

#include "shootout/domain.hpp"

namespace shootout {

enum class ReportKind { Hail, Wind, RainRate, FunnelCloud, Tornado };

std::string report_kind_name(ReportKind k);
ReportKind parse_report_kind(std::string_view name);

// A single raw weather report. Magnitudes: hail in inches diameter, wind in
// knots, rain in inches per hour; funnel cloud and tornado reports carry no
// magnitude.
struct EventReport {
    std::string date;
    Zone zone = Zone::Z1;
    int time_utc = 0;  // minutes, 0..1440
    ReportKind kind = ReportKind::Hail;
    double magnitude = 0;
    std::string source;
};

struct Observation {
    std::string date;
    Zone zone = Zone::Z1;
    Category category = Category::Nonsignificant;
    std::vector<EventReport> supporting_reports;
};

// Forecast valid period in minutes UTC; end past 1440 means the window wraps
// into the next day. Endpoints are included.
struct TimeWindow {
    int start_min = 1140;  // 1900 GMT
    int end_min = 1560;    // 0200 GMT next day

    bool contains(int t) const {
        if (t >= start_min && t <= end_min) return true;
        if (end_min > 1440 && t <= end_min - 1440) return true;
        return false;
    }
};

struct ZoneMismatch : Error {
    using Error::Error;
};
struct MissingZone : Error {
    using Error::Error;
};

// Category per the experiment definitions: severe for hail >= 0.75 in, wind
// >= 50 kt, or a tornado; significant for 0.25 <= hail < 0.75, 35 <= wind
// < 50, rain rate >= 2 in/hr, or a funnel cloud; nonsignificant otherwise.
Category classify_report(const EventReport& report);

// Max category over in-window reports; no reports means category 0.
// Duplicate reports (same zone/time/kind/magnitude) count once.
Observation aggregate_day(Zone zone, const std::vector<EventReport>& reports, TimeWindow window);

// Overall region truth is taken as the max over the four zone observations.
Observation overall_observation(const std::map<Zone, Observation>& per_zone);

// Observation ledger CSV: date,zone,time_utc,kind,magnitude,source
std::vector<EventReport> read_report_ledger(const std::string& path);
void write_report_ledger(const std::string& path, const std::vector<EventReport>& reports);

}  // namespace shootout
