#include "shootout/forecasters.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shootout/analog.hpp"
#include "shootout/induct.hpp"
#include "shootout/inference.hpp"
#include "shootout/linear.hpp"
#include "shootout/parcel.hpp"

namespace shootout {

using nlohmann::json;

std::string Forecaster::explain_forecast(const std::string& date) const {
    auto it = explanations_.find(date);
    if (it == explanations_.end())
        throw MissingTrace("no forecast recorded for " + reg_.id + " on " + date);
    return it->second;
}

void Forecaster::remember_explanation(const std::string& date, std::string text) {
    explanations_[date] = std::move(text);
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
    return j;
}

std::string load_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string sibling_path(const std::string& config_path, const std::string& relative) {
    std::filesystem::path p(relative);
    if (p.is_absolute()) return relative;
    return (std::filesystem::path(config_path).parent_path() / p).string();
}

std::string pick_operator(const Scenario& scenario, const std::string& preferred) {
    if (scenario.answers.empty()) return preferred;
    if (!preferred.empty() && scenario.answers.count(preferred)) return preferred;
    return scenario.answers.begin()->first;
}

FeatureMap scenario_indices(const Scenario& scenario, const std::string&) {
    if (scenario.sounding.size() < 2) return {};
    const SoundingLevel& sfc = scenario.sounding.front();
    BuoyancyProfile profile = parcel_profile(scenario.sounding, sfc.temp_c, sfc.dewpoint_c);
    UpdraftResult up = integrate_updraft(profile, 1e-5, 10.0);
    return convective_indices(profile, up);
}

FeatureMap assemble_features(const Scenario& scenario, Zone zone, const std::string& operator_id,
                             const FeatureMap& derived_indices, bool include_answers) {
    FeatureMap out;
    auto zit = scenario.features.find(zone);
    if (zit != scenario.features.end()) out = zit->second;
    for (auto& [name, value] : derived_indices) out.emplace(name, value);
    if (include_answers) {
        auto ait = scenario.answers.find(operator_id);
        if (ait != scenario.answers.end())
            for (auto& [q, v] : ait->second)
                if (std::holds_alternative<double>(v)) out.emplace(q, std::get<double>(v));
    }
    return out;
}

FeatureMap assemble_features(const Scenario& scenario, Zone zone, const std::string& operator_id,
                             const FeatureMap& derived_indices) {
    return assemble_features(scenario, zone, operator_id, derived_indices, false);
}

namespace {

ProbTriple triple_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw Error("expected a 3-element probability array");
    return make_prob_triple(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

std::vector<std::pair<double, double>> knots_from_json(const json& j) {
    std::vector<std::pair<double, double>> knots;
    for (auto& k : j) knots.push_back({k[0].get<double>(), k[1].get<double>()});
    return knots;
}

ForecastSet start_set(const ForecasterRegistration& reg, const Scenario& scenario,
                      const std::string& operator_id) {
    ForecastSet fs;
    fs.forecaster_id = reg.id;
    fs.date = scenario.date;
    fs.operator_id = operator_id;
    return fs;
}

// ---------------------------------------------------------------------------

class LinearForecaster : public Forecaster {
public:
    LinearForecaster(ForecasterRegistration reg, const json& cfg) : Forecaster(std::move(reg)) {
        spec_.variables = cfg.at("variables").get<std::vector<std::string>>();
        spec_.weights = cfg.at("weights").get<std::vector<double>>();
        for (auto& s : cfg.at("scaling")) spec_.scaling.push_back({s[0], s[1]});
        spec_.calibration = make_calibration(knots_from_json(cfg.at("calibration")));
        spec_.severe_share = make_calibration(knots_from_json(cfg.at("severe_share")));
        if (cfg.contains("inhibitions"))
            for (auto& inh : cfg.at("inhibitions"))
                spec_.inhibitions.push_back(
                    {parse_predicate(inh.at("when").get<std::string>()), inh.at("factor")});
        validate_linear_spec(spec_);
    }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        ForecastSet fs = start_set(reg_, scenario, operator_id);
        FeatureMap indices = scenario_indices(scenario, operator_id);
        std::string note;
        for (Zone z : reg_.coverage.zones) {
            FeatureMap f = assemble_features(scenario, z, operator_id, indices, false);
            double raw = linear_score(spec_, f);
            double s = apply_inhibitions(spec_, f, raw);
            fs.entries[z] = calibrated_forecast(spec_, f);
            note += zone_name(z) + ": score " + format_double(raw) + ", after inhibitions " +
                    format_double(s) + "\n";
        }
        remember_explanation(scenario.date, note);
        return fs;
    }

private:
    LinearModelSpec spec_;
};

// ---------------------------------------------------------------------------

class RuleBackwardForecaster : public Forecaster {
public:
    RuleBackwardForecaster(ForecasterRegistration reg, const json& cfg)
        : Forecaster(std::move(reg)) {
        rules_ = parse_rules(load_text_file(sibling_path(reg_.config_path, cfg.at("rules"))));
        state_.eta = cfg.value("eta", 0.05);
        state_.w_min = cfg.value("w_min", 0.01);
        state_.w_max = cfg.value("w_max", 1.0);
        state_.w_init = cfg.value("w_init", 0.5);
        if (cfg.contains("eta_penalty")) state_.eta_penalty = cfg.at("eta_penalty").get<double>();
        if (cfg.value("weights_from_confidence", true))
            state_ = confidence_from_rules(rules_, state_);
        prior_ = cfg.contains("prior") ? triple_from_json(cfg.at("prior")) : ProbTriple{1, 0, 0};
    }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        ForecastSet fs = start_set(reg_, scenario, operator_id);
        FeatureMap indices = scenario_indices(scenario, operator_id);
        std::string note;
        auto& day_traces = traces_[scenario.date];
        day_traces.clear();
        for (Zone z : reg_.coverage.zones) {
            FeatureMap f = assemble_features(scenario, z, operator_id, indices, false);
            auto [triple, trace] = backward_chain(rules_, f, state_, prior_);
            fs.entries[z] = triple;
            note += "--- " + zone_name(z) + " ---\n" + explain(trace);
            day_traces[z] = std::move(trace);
        }
        remember_explanation(scenario.date, note);
        return fs;
    }

    void feedback(const std::string& date, const std::map<Zone, Observation>& observed) override {
        auto it = traces_.find(date);
        if (it == traces_.end()) throw MissingTrace(reg_.id + ": no trace for " + date);
        for (auto& [zone, trace] : it->second) {
            auto oit = observed.find(zone);
            if (oit == observed.end()) continue;
            state_ = update_confidence(state_, trace, oit->second.category);
        }
    }

    json state_snapshot() const override {
        json w = json::object();
        for (auto& [id, v] : state_.weights) w[id] = v;
        return {{"weights", w}, {"history_len", state_.history_len}};
    }

    void state_restore(const json& snapshot) override {
        state_.weights.clear();
        for (auto& [id, v] : snapshot.at("weights").items()) state_.weights[id] = v.get<double>();
        state_.history_len = snapshot.value("history_len", 0L);
    }

private:
    RuleSet rules_;
    ConfidenceState state_;
    ProbTriple prior_;
    std::map<std::string, std::map<Zone, Trace>> traces_;
};

// ---------------------------------------------------------------------------

class StagedPipelineForecaster : public Forecaster {
public:
    StagedPipelineForecaster(ForecasterRegistration reg, const json& cfg)
        : Forecaster(std::move(reg)) {
        RuleSet rules =
            parse_rules(load_text_file(sibling_path(reg_.config_path, cfg.at("rules"))));
        spec_ = make_pipeline_spec(
            rules, cfg.value("required_fraction", 0.5),
            cfg.contains("base_severe") ? triple_from_json(cfg.at("base_severe"))
                                        : ProbTriple{0.2, 0.3, 0.5},
            cfg.contains("base_nonsevere") ? triple_from_json(cfg.at("base_nonsevere"))
                                           : ProbTriple{0.85, 0.12, 0.03});
    }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        ForecastSet fs = start_set(reg_, scenario, operator_id);
        FeatureMap indices = scenario_indices(scenario, operator_id);
        std::string note;
        for (Zone z : reg_.coverage.zones) {
            FeatureMap f = assemble_features(scenario, z, operator_id, indices, false);
            PipelineResult res = staged_pipeline(spec_, f);
            fs.entries[z] = res.triple;
            note += "--- " + zone_name(z) + " (" +
                    (res.label == PipelineLabel::Severe ? "severe" : "not severe") + ") ---\n" +
                    explain(res.trace);
        }
        remember_explanation(scenario.date, note);
        return fs;
    }

private:
    PipelineSpec spec_;
};

// ---------------------------------------------------------------------------

class AnalogForecaster : public Forecaster {
public:
    AnalogForecaster(ForecasterRegistration reg, const json& cfg) : Forecaster(std::move(reg)) {
        library_ = read_library(sibling_path(reg_.config_path, cfg.at("library")));
        library_.frozen = cfg.value("frozen", false);
        ridge_ = cfg.value("ridge", -1.0);  // negative = auto
        blend_ = cfg.value("blend_model", 0.9);
        prior_ = cfg.contains("prior") ? triple_from_json(cfg.at("prior"))
                                       : ProbTriple{0.7, 0.2, 0.1};
        dirty_ = true;
    }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        if (dirty_) {
            model_ = fit_discriminant(library_, ridge_ >= 0 ? ridge_ : default_ridge(library_));
            dirty_ = false;
        }
        ForecastSet fs = start_set(reg_, scenario, operator_id);
        FeatureMap indices = scenario_indices(scenario, operator_id);
        std::string note;
        auto& day_vectors = vectors_[scenario.date];
        day_vectors.clear();
        for (Zone z : reg_.coverage.zones) {
            FeatureMap f = assemble_features(scenario, z, operator_id, indices, false);
            std::vector<double> x;
            for (const std::string& name : model_.feature_names) {
                auto it = f.find(name);
                if (it == f.end())
                    throw Error(reg_.id + ": feature '" + name + "' missing for zone " +
                                zone_name(z));
                x.push_back(it->second);
            }
            ProbTriple m = predict(model_, x);
            // Blend with the climatology prior so unseen classes never score
            // a hard zero.
            fs.entries[z] = normalize_triple(blend_ * m.p0 + (1 - blend_) * prior_.p0,
                                             blend_ * m.p1 + (1 - blend_) * prior_.p1,
                                             blend_ * m.p2 + (1 - blend_) * prior_.p2);
            note += zone_name(z) + ": model (" + format_double(m.p0) + ", " + format_double(m.p1) +
                    ", " + format_double(m.p2) + ") over " + std::to_string(library_.rows.size()) +
                    " analog days\n";
            day_vectors[z] = std::move(x);
        }
        remember_explanation(scenario.date, note);
        return fs;
    }

    void feedback(const std::string& date, const std::map<Zone, Observation>& observed) override {
        if (library_.frozen) return;  // the static variant ignores verification
        auto it = vectors_.find(date);
        if (it == vectors_.end()) throw MissingTrace(reg_.id + ": no forecast vectors for " + date);
        for (auto& [zone, x] : it->second) {
            auto oit = observed.find(zone);
            if (oit == observed.end()) continue;
            library_ = absorb_verification(library_, x, oit->second.category, date);
        }
        dirty_ = true;
    }

    json state_snapshot() const override {
        json rows = json::array();
        for (auto& r : library_.rows)
            rows.push_back({{"date", r.date},
                            {"category", category_code(r.category)},
                            {"features", r.features}});
        return {{"feature_names", library_.feature_names}, {"rows", rows}};
    }

    void state_restore(const json& snapshot) override {
        library_.feature_names = snapshot.at("feature_names").get<std::vector<std::string>>();
        library_.rows.clear();
        for (auto& r : snapshot.at("rows"))
            library_.rows.push_back({r.at("features").get<std::vector<double>>(),
                                     category_from_code(r.at("category").get<int>()),
                                     r.at("date").get<std::string>()});
        dirty_ = true;
    }

private:
    AnalogLibrary library_;
    DiscriminantModel model_;
    double ridge_ = -1;
    double blend_ = 0.9;
    ProbTriple prior_;
    bool dirty_ = true;
    std::map<std::string, std::map<Zone, std::vector<double>>> vectors_;
};

// ---------------------------------------------------------------------------

class InductionForecaster : public Forecaster {
public:
    InductionForecaster(ForecasterRegistration reg, const json& cfg) : Forecaster(std::move(reg)) {
        hierarchy_ =
            parse_hierarchy(load_text_file(sibling_path(reg_.config_path, cfg.at("hierarchy"))));
        for (auto& [label, t] : cfg.at("class_triples").items())
            class_triples_[label] = triple_from_json(t);
    }

    bool uses_answers() const override { return true; }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        ForecastSet fs = start_set(reg_, scenario, operator_id);
        FeatureMap indices = scenario_indices(scenario, operator_id);

        const AnswerMap* answers = nullptr;
        auto ait = scenario.answers.find(operator_id);
        if (ait != scenario.answers.end()) answers = &ait->second;
        FeatureMap overall =
            assemble_features(scenario, Zone::Overall, operator_id, indices, false);

        Oracle oracle = [&](const std::string& q) -> std::optional<AttrValue> {
            if (answers) {
                auto qit = answers->find(q);
                if (qit != answers->end()) {
                    if (std::holds_alternative<double>(qit->second))
                        return AttrValue{std::get<double>(qit->second)};
                    return AttrValue{std::get<std::string>(qit->second)};
                }
            }
            auto fit = overall.find(q);
            if (fit != overall.end()) return AttrValue{fit->second};
            return std::nullopt;
        };

        InterviewResult res = interview(hierarchy_, oracle);
        auto tit = class_triples_.find(res.label);
        if (tit == class_triples_.end())
            throw Error(reg_.id + ": no probability triple configured for class '" + res.label +
                        "'");
        for (Zone z : reg_.coverage.zones) fs.entries[z] = tit->second;
        fs.questions_asked = res.questions_asked;

        std::string note = "class " + res.label + " after " +
                           std::to_string(res.questions_asked) + " questions\n";
        for (auto& step : res.trail) note += "  " + step + "\n";
        remember_explanation(scenario.date, note);
        return fs;
    }

private:
    ModuleHierarchy hierarchy_;
    std::map<std::string, ProbTriple> class_triples_;
};

// ---------------------------------------------------------------------------

class ParcelForecaster : public Forecaster {
public:
    ParcelForecaster(ForecasterRegistration reg, const json& cfg) : Forecaster(std::move(reg)) {
        rules_ = parse_rules(load_text_file(sibling_path(reg_.config_path, cfg.at("rules"))));
        state_ = confidence_from_rules(rules_);
        prior_ = cfg.contains("prior") ? triple_from_json(cfg.at("prior"))
                                       : ProbTriple{0.8, 0.15, 0.05};
        drag_k_ = cfg.value("drag_k", 1e-5);
        dz_ = cfg.value("dz", 10.0);
        eval_time_min_ = cfg.value("eval_time_min", 1140.0);
        if (cfg.contains("mixing")) {
            const json& m = cfg.at("mixing");
            mixing_ = MixingSpec{m.value("start_min", 600.0), m.value("end_min", 1140.0),
                                 m.at("target_temp_c").get<double>(),
                                 m.at("target_dewpoint_c").get<double>()};
        }
    }

    bool uses_answers() const override { return true; }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        if (scenario.sounding.size() < 2)
            throw Error(reg_.id + ": scenario " + scenario.date + " has no usable sounding");
        ForecastSet fs = start_set(reg_, scenario, operator_id);

        const AnswerMap* answers = nullptr;
        auto ait = scenario.answers.find(operator_id);
        if (ait != scenario.answers.end()) answers = &ait->second;
        auto numeric_answer = [&](const char* key) -> std::optional<double> {
            if (!answers) return std::nullopt;
            auto it = answers->find(key);
            if (it == answers->end() || !std::holds_alternative<double>(it->second))
                return std::nullopt;
            return std::get<double>(it->second);
        };

        const SoundingLevel& sfc = scenario.sounding.front();
        double t = sfc.temp_c, td = sfc.dewpoint_c;
        if (mixing_) {
            MixingSpec m = *mixing_;
            if (auto v = numeric_answer("mixed_temp_target")) m.target_temp_c = *v;
            if (auto v = numeric_answer("mixed_dewpoint_target")) m.target_dewpoint_c = *v;
            std::tie(t, td) = mix_boundary_layer(t, td, m, eval_time_min_);
        }
        // Operator override of the model-derived surface values.
        if (auto v = numeric_answer("surface_temp_override")) t = *v;
        if (auto v = numeric_answer("surface_dewpoint_override")) td = *v;

        BuoyancyProfile profile = parcel_profile(scenario.sounding, t, td, dz_);
        UpdraftResult up = integrate_updraft(profile, drag_k_, dz_);
        FeatureMap indices = convective_indices(profile, up);

        std::string note = "mixed surface T " + format_double(t) + " C, Td " + format_double(td) +
                           " C; w_max " + format_double(up.w_max) + " m/s\n";
        auto& day_traces = traces_[scenario.date];
        day_traces.clear();
        for (Zone z : reg_.coverage.zones) {
            FeatureMap f = assemble_features(scenario, z, operator_id, indices, true);
            auto [triple, trace] = backward_chain(rules_, f, state_, prior_);
            fs.entries[z] = triple;
            note += "--- " + zone_name(z) + " ---\n" + explain(trace);
            day_traces[z] = std::move(trace);
        }
        remember_explanation(scenario.date, note);
        return fs;
    }

private:
    RuleSet rules_;
    ConfidenceState state_;
    ProbTriple prior_;
    double drag_k_ = 1e-5, dz_ = 10.0, eval_time_min_ = 1140.0;
    std::optional<MixingSpec> mixing_;
    std::map<std::string, std::map<Zone, Trace>> traces_;
};

// ---------------------------------------------------------------------------

class ClimatologyForecaster : public Forecaster {
public:
    ClimatologyForecaster(ForecasterRegistration reg, const json& cfg)
        : Forecaster(std::move(reg)) {
        double severe_share = cfg.value("severe_share", 0.3);
        for (auto& [zone_text, rate] : cfg.at("base_rates").items()) {
            double f = rate.get<double>();
            double p2 = f * severe_share;
            triples_[parse_zone(zone_text)] = make_prob_triple(1.0 - f, f - p2, p2);
        }
    }

    ForecastSet forecast(const Scenario& scenario, const std::string& operator_id) override {
        ForecastSet fs = start_set(reg_, scenario, operator_id);
        for (Zone z : reg_.coverage.zones) {
            auto it = triples_.find(z);
            if (it == triples_.end())
                throw Error(reg_.id + ": no base rate for zone " + zone_name(z));
            fs.entries[z] = it->second;
        }
        remember_explanation(scenario.date, "fixed climatological base rates\n");
        return fs;
    }

private:
    std::map<Zone, ProbTriple> triples_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ForecasterRegistration& reg) {
    if (reg.coverage.zones.empty()) throw Error(reg.id + ": empty coverage");
    json cfg = load_json_file(reg.config_path);
    if (reg.kind == "linear") return std::make_unique<LinearForecaster>(reg, cfg);
    if (reg.kind == "rule_backward") return std::make_unique<RuleBackwardForecaster>(reg, cfg);
    if (reg.kind == "staged_pipeline")
        return std::make_unique<StagedPipelineForecaster>(reg, cfg);
    if (reg.kind == "analog") return std::make_unique<AnalogForecaster>(reg, cfg);
    if (reg.kind == "induction") return std::make_unique<InductionForecaster>(reg, cfg);
    if (reg.kind == "parcel") return std::make_unique<ParcelForecaster>(reg, cfg);
    if (reg.kind == "climatology") return std::make_unique<ClimatologyForecaster>(reg, cfg);
    throw Error(reg.id + ": unknown forecaster kind '" + reg.kind + "'");
}

}  // namespace shootout
