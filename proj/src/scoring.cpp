#include "shootout/scoring.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace shootout {

std::map<Zone, double> climatology_reference(
    const std::vector<std::pair<Zone, Category>>& history) {
    if (history.empty()) throw EmptyHistory("no observation history");
    std::map<Zone, std::pair<int, int>> tallies;  // zone -> (events, days)
    for (auto& [zone, cat] : history) {
        auto& [events, days] = tallies[zone];
        ++days;
        if (category_code(cat) >= 1) ++events;
    }
    std::map<Zone, double> out;
    for (auto& [zone, t] : tallies) out[zone] = double(t.first) / double(t.second);
    return out;
}

double brier_binary(const std::vector<std::pair<double, int>>& series) {
    if (series.empty()) throw EmptySeries("brier_binary on empty series");
    double sum = 0;
    for (auto& [p, o] : series) {
        if (p < 0 || p > 1) throw OutOfRange("forecast probability outside [0,1]");
        if (o != 0 && o != 1) throw OutOfRange("binary outcome must be 0 or 1");
        sum += (p - o) * (p - o);
    }
    return sum / double(series.size());
}

double brier_multi(const std::vector<std::pair<ProbTriple, Category>>& series, bool merge12) {
    if (series.empty()) throw EmptySeries("brier_multi on empty series");
    double sum = 0;
    for (auto& [triple, observed] : series) {
        if (merge12) {
            double o = category_code(observed) >= 1 ? 1.0 : 0.0;
            double p = triple.p_event();
            sum += (triple.p0 - (1.0 - o)) * (triple.p0 - (1.0 - o)) + (p - o) * (p - o);
        } else {
            for (int c = 0; c < 3; ++c) {
                double o = category_code(observed) == c ? 1.0 : 0.0;
                sum += (triple[c] - o) * (triple[c] - o);
            }
        }
    }
    return sum / double(series.size());
}

double skill_score(double bs, double bs_ref) {
    if (bs < 0 || bs_ref < 0) throw OutOfRange("Brier scores must be non-negative");
    if (bs_ref == 0) {
        if (bs == 0) return 0;
        throw ZeroReference("reference Brier score is zero but forecast score is not");
    }
    return 1.0 - bs / bs_ref;
}

std::vector<ReliabilityRow> reliability_table(const std::vector<std::pair<double, int>>& series,
                                              int bins) {
    if (bins < 2) throw Error("reliability table needs at least 2 bins");
    std::vector<ReliabilityRow> rows(bins);
    std::vector<double> sum_p(bins, 0);
    std::vector<int> events(bins, 0);
    double width = 1.0 / bins;
    for (int b = 0; b < bins; ++b) rows[b].bin_center = (b + 0.5) * width;
    for (auto& [p, o] : series) {
        int b = std::min(bins - 1, int(p / width));
        ++rows[b].n;
        sum_p[b] += p;
        events[b] += o;
    }
    for (int b = 0; b < bins; ++b) {
        if (rows[b].n > 0) {
            rows[b].mean_forecast = sum_p[b] / rows[b].n;
            rows[b].observed_freq = double(events[b]) / rows[b].n;
        }
    }
    return rows;
}

SkillReport scoreboard(const std::vector<ForecastSet>& forecasts,
                       const std::map<ObservationKey, Category>& observations,
                       const ScoreboardOptions& options) {
    // Observation tallies per zone, for reference forecasts and coverage.
    std::map<Zone, int> obs_days;
    std::map<Zone, std::array<int, 3>> cat_counts;
    for (auto& [key, cat] : observations) {
        if (options.exclude_zones.count(key.second)) continue;
        ++obs_days[key.second];
        ++cat_counts[key.second][category_code(cat)];
    }

    auto base_rate = [&](Zone z) -> double {
        if (options.base_rates) {
            auto it = options.base_rates->find(z);
            if (it == options.base_rates->end())
                throw Error("no base rate configured for zone " + zone_name(z));
            return it->second;
        }
        auto& c = cat_counts.at(z);
        return double(c[1] + c[2]) / double(obs_days.at(z));
    };
    auto reference_triple = [&](Zone z) -> ProbTriple {
        auto& c = cat_counts.at(z);
        double n = obs_days.at(z);
        if (options.base_rates) {
            // Split the configured event rate by the observed severe share.
            double f = base_rate(z);
            int events = c[1] + c[2];
            double severe = events > 0 ? double(c[2]) / events : 0.0;
            double p2 = f * severe;
            return make_prob_triple(1.0 - f, f - p2, p2);
        }
        return make_prob_triple(c[0] / n, c[1] / n, c[2] / n);
    };

    // (forecaster, zone) -> paired series.
    std::map<std::pair<std::string, Zone>, std::vector<std::pair<ProbTriple, Category>>> cells;
    std::set<std::string> forecaster_ids;
    for (const ForecastSet& fs : forecasts) {
        forecaster_ids.insert(fs.forecaster_id);
        for (auto& [zone, triple] : fs.entries) {
            if (options.exclude_zones.count(zone)) continue;
            auto it = observations.find({fs.date, zone});
            if (it == observations.end()) continue;  // coverage masking
            cells[{fs.forecaster_id, zone}].push_back({triple, it->second});
        }
    }

    SkillReport report;
    for (const std::string& id : forecaster_ids) {
        bool any = false;
        for (auto& [key, series] : cells) {
            if (key.first != id) continue;
            any = true;
            Zone z = key.second;
            SkillRow row;
            row.forecaster_id = id;
            row.zone = z;
            row.n = int(series.size());
            row.coverage = double(series.size()) / double(obs_days.at(z));
            if (options.mode == ScoreboardOptions::Mode::Binary) {
                std::vector<std::pair<double, int>> fc, ref;
                double f = base_rate(z);
                for (auto& [triple, cat] : series) {
                    int o = category_code(cat) >= 1 ? 1 : 0;
                    fc.push_back({triple.p_event(), o});
                    ref.push_back({f, o});
                }
                row.brier = brier_binary(fc);
                row.brier_ref = brier_binary(ref);
            } else {
                ProbTriple ref_triple = reference_triple(z);
                std::vector<std::pair<ProbTriple, Category>> ref;
                for (auto& [triple, cat] : series) ref.push_back({ref_triple, cat});
                row.brier = brier_multi(series, options.merge12);
                row.brier_ref = brier_multi(ref, options.merge12);
            }
            row.bss = skill_score(row.brier, row.brier_ref);
            report.rows.push_back(row);
        }
        if (!any)
            throw NoOverlap("forecaster '" + id + "' shares no (date, zone) cells with the observations");
    }
    std::sort(report.rows.begin(), report.rows.end(), [](const SkillRow& a, const SkillRow& b) {
        return std::tie(a.forecaster_id, a.zone) < std::tie(b.forecaster_id, b.zone);
    });
    return report;
}

std::string skill_report_csv(const SkillReport& report) {
    std::string out = "forecaster,zone,n,brier,brier_ref,bss,coverage\n";
    for (const SkillRow& r : report.rows)
        out += join_csv({r.forecaster_id, zone_name(r.zone), std::to_string(r.n),
                         format_double(r.brier), format_double(r.brier_ref), format_double(r.bss),
                         format_double(r.coverage)}) +
               "\n";
    return out;
}

std::string skill_report_text(const SkillReport& report) {
    std::ostringstream out;
    auto pad = [](std::string s, size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    out << pad("forecaster", 16) << pad("zone", 9) << pad("n", 5) << pad("brier", 9)
        << pad("brier_ref", 11) << pad("bss", 9) << "coverage\n";
    for (const SkillRow& r : report.rows)
        out << pad(r.forecaster_id, 16) << pad(zone_name(r.zone), 9)
            << pad(std::to_string(r.n), 5) << pad(num(r.brier), 9) << pad(num(r.brier_ref), 11)
            << pad(num(r.bss), 9) << num(r.coverage) << "\n";
    return out.str();
}

std::string reliability_csv(const std::vector<ReliabilityRow>& rows) {
    std::string out = "bin_center,mean_forecast,observed_freq,n\n";
    for (const ReliabilityRow& r : rows)
        out += join_csv({format_double(r.bin_center), format_double(r.mean_forecast),
                         format_double(r.observed_freq), std::to_string(r.n)}) +
               "\n";
    return out;
}

}  // namespace shootout
