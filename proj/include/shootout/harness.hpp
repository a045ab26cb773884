#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "shootout/classify.hpp"
#include "shootout/forecasters.hpp"
#include "shootout/scoring.hpp"

namespace shootout {

struct ParseError : Error {
    using Error::Error;
};
struct DuplicateDate : Error {
    using Error::Error;
};
struct SingleOperator : Error {
    using Error::Error;
};
struct HashMismatch : Error {
    using Error::Error;
};
struct VersionMismatch : Error {
    using Error::Error;
};

constexpr int kSnapshotVersion = 1;

// Scenario file: one JSON object per day.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario read_scenario_file(const std::string& path);
void write_scenario_file(const std::string& path, const Scenario& s);

struct Ingested {
    std::vector<Scenario> scenarios;                      // sorted by date
    std::vector<EventReport> reports;                     // raw ledger rows
    std::map<std::string, std::map<Zone, Observation>> observations;  // date -> zone -> obs
};

// Loads every *.json scenario in the directory and aggregates the observation
// ledger per zone and day (Overall derived as the max over zones).
Ingested ingest(const std::string& scenario_dir, const std::string& observation_file,
                TimeWindow window = {});

struct ExperimentConfig {
    std::string scenario_dir;
    std::string observation_file;
    std::string out_dir;
    std::vector<ForecasterRegistration> registrations;
    std::map<Zone, double> base_rates;  // scoreboard reference + climatology systems
    TimeWindow window;
    ScoreboardOptions::Mode score_mode = ScoreboardOptions::Mode::Binary;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct LedgerRow {
    std::string date;
    std::string forecaster_id;
    int questions_asked = 0;
    std::string state_hash_before;
    std::string state_hash_after;
    std::int64_t runtime_ms = 0;  // written to the timing side file only
};

struct DayResult {
    std::vector<ForecastSet> forecasts;  // one per registration, in config order
    std::vector<std::string> failures;   // per-forecaster diagnostics
};

class Experiment {
public:
    explicit Experiment(const ExperimentConfig& config);

    // Same-snapshot forecasting for one day; learning state is untouched.
    DayResult run_day(const Scenario& scenario);

    // Applies the day's verification to every learning forecaster.
    void feedback_day(const std::string& date, const std::map<Zone, Observation>& observed);

    nlohmann::json snapshot(const std::string& after_date) const;
    void restore(const nlohmann::json& snapshot_json);
    std::string state_hash(const std::string& forecaster_id) const;

    const std::vector<std::unique_ptr<Forecaster>>& forecasters() const { return forecasters_; }
    const std::vector<LedgerRow>& ledger() const { return ledger_; }
    const ExperimentConfig& config() const { return config_; }

private:
    ExperimentConfig config_;
    std::vector<std::unique_ptr<Forecaster>> forecasters_;
    std::vector<LedgerRow> ledger_;
    std::set<std::string> feedback_dates_;  // idempotence guard
};

// Full daily loop plus artifacts: forecasts.csv, ledger.csv, timings.csv,
// per-day state snapshots, briefings, skill report, reliability tables.
// start_after skips days up to and including that date (snapshot replay).
void run_experiment(const ExperimentConfig& config, Experiment& experiment,
                    const std::string& start_after = "");

inline void run_experiment(const ExperimentConfig& config) {
    Experiment e(config);
    run_experiment(config, e);
}

void write_snapshot_file(const std::string& path, const nlohmann::json& snapshot);
nlohmann::json read_snapshot_file(const std::string& path);  // verifies version + hash

// forecasts.csv: date,forecaster,zone,p0,p1,p2,operator,questions
void write_forecasts_csv(const std::string& path, const std::vector<ForecastSet>& forecasts);
std::vector<ForecastSet> read_forecasts_csv(const std::string& path);

struct DivergenceRow {
    std::string forecaster_id;
    double mean_abs_diff = 0;  // per-category probability difference over operator pairs
    double max_abs_diff = 0;
    int comparisons = 0;
};

// Re-runs each forecaster per operator answer set from identical initial
// state and measures how far the forecasts drift apart.
std::vector<DivergenceRow> operator_divergence(const std::vector<Scenario>& scenarios,
                                               const std::vector<ForecasterRegistration>& regs);

}  // namespace shootout
