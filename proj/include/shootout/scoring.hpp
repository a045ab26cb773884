#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shootout/domain.hpp"

namespace shootout {

struct EmptySeries : Error {
    using Error::Error;
};
struct EmptyHistory : Error {
    using Error::Error;
};
struct ZeroReference : Error {
    using Error::Error;
};
struct NoOverlap : Error {
    using Error::Error;
};

// Per-zone base rate of the event "category >= 1".
std::map<Zone, double> climatology_reference(const std::vector<std::pair<Zone, Category>>& history);

// Mean of (p - o)^2 over the series; in [0,1].
double brier_binary(const std::vector<std::pair<double, int>>& series);

// Mean over days of sum_c (p_c - 1{c = observed})^2; in [0,2]. With merge12,
// categories 1 and 2 collapse to a single event component.
double brier_multi(const std::vector<std::pair<ProbTriple, Category>>& series,
                   bool merge12 = false);

// 1 - bs/bs_ref; zero when both scores are zero.
double skill_score(double bs, double bs_ref);

struct ReliabilityRow {
    double bin_center = 0;
    double mean_forecast = 0;
    double observed_freq = 0;
    int n = 0;
};

// Equal-width probability bins over [0,1]; empty bins emitted with n = 0.
std::vector<ReliabilityRow> reliability_table(const std::vector<std::pair<double, int>>& series,
                                              int bins);

struct ScoreboardOptions {
    enum class Mode { Binary, Multi };
    Mode mode = Mode::Binary;
    bool merge12 = false;
    std::set<Zone> exclude_zones;
    // Reference base rates per zone; computed in-sample from the observations
    // when absent (fine for fixtures, leaky for learning-system comparisons).
    std::optional<std::map<Zone, double>> base_rates;
};

struct SkillRow {
    std::string forecaster_id;
    Zone zone = Zone::Z1;
    int n = 0;
    double brier = 0;
    double brier_ref = 0;
    double bss = 0;
    double coverage = 0;  // scored cells / observed days in this zone
};

struct SkillReport {
    std::vector<SkillRow> rows;  // sorted by (forecaster, zone); no overall ranking
};

using ObservationKey = std::pair<std::string, Zone>;  // (date, zone)

// Scores each forecaster only on the (date, zone) cells it forecast and that
// have an observation.
SkillReport scoreboard(const std::vector<ForecastSet>& forecasts,
                       const std::map<ObservationKey, Category>& observations,
                       const ScoreboardOptions& options);

std::string skill_report_csv(const SkillReport& report);
std::string skill_report_text(const SkillReport& report);
std::string reliability_csv(const std::vector<ReliabilityRow>& rows);

}  // namespace shootout
