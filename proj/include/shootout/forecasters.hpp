#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "shootout/classify.hpp"
#include "shootout/domain.hpp"

namespace shootout {

// One registration per participating system.
struct ForecasterRegistration {
    std::string id;
    std::string kind;  // linear | rule_backward | staged_pipeline | analog |
                       // induction | parcel | climatology
    std::string config_path;
    CoverageSpec coverage;
    bool learning = false;
    std::string operator_id;  // preferred operator; first in the scenario when empty
};

struct MissingTrace : Error {
    using Error::Error;
};

// A pluggable forecasting system. forecast() never mutates learning state;
// verification arrives later through feedback(). Implementations cache the
// day's traces so feedback and explanations can refer back to them.
class Forecaster {
public:
    explicit Forecaster(ForecasterRegistration reg) : reg_(std::move(reg)) {}
    virtual ~Forecaster() = default;

    const ForecasterRegistration& registration() const { return reg_; }

    virtual ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) = 0;
    virtual void feedback(const std::string& date, const std::map<Zone, Observation>& observed) {}

    virtual nlohmann::json state_snapshot() const { return nlohmann::json::object(); }
    virtual void state_restore(const nlohmann::json& snapshot) {}

    // Explanation for an already-forecast date (trace-backed where the
    // system is rule-based).
    virtual std::string explain_forecast(const std::string& date) const;

    // True when the system consumes operator answers (interview-style input).
    virtual bool uses_answers() const { return false; }

protected:
    void remember_explanation(const std::string& date, std::string text);

    ForecasterRegistration reg_;
    std::map<std::string, std::string> explanations_;  // date -> text
};

std::unique_ptr<Forecaster> make_forecaster(const ForecasterRegistration& reg);

// Feature view a system sees for one zone: the zone's scenario features plus
// sounding-derived indices plus the chosen operator's numeric answers.
FeatureMap assemble_features(const Scenario& scenario, Zone zone, const std::string& operator_id,
                             const FeatureMap& derived_indices);
FeatureMap assemble_features(const Scenario& scenario, Zone zone, const std::string& operator_id,
                             const FeatureMap& derived_indices, bool include_answers);

// Sounding-derived indices for the day (empty map when the scenario carries
// no sounding).
FeatureMap scenario_indices(const Scenario& scenario, const std::string& operator_id);

std::string pick_operator(const Scenario& scenario, const std::string& preferred);

nlohmann::json load_json_file(const std::string& path);
std::string load_text_file(const std::string& path);
std::string sibling_path(const std::string& config_path, const std::string& relative);

}  // namespace shootout
