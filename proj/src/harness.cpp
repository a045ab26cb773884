#include "shootout/harness.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>

namespace shootout {

namespace fs = std::filesystem;
using nlohmann::json;

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.date = j.at("date").get<std::string>();
    s.climatology_tag = j.value("climatology_tag", "");
    for (auto& [zone_text, fmap] : j.at("features").items()) {
        Zone z = parse_zone(zone_text);
        FeatureMap features;
        for (auto& [name, v] : fmap.items()) features[name] = v.get<double>();
        if (features.empty()) throw ParseError("zone " + zone_text + " has an empty feature map");
        s.features[z] = std::move(features);
    }
    if (j.contains("sounding"))
        for (auto& lvl : j.at("sounding"))
            s.sounding.push_back({lvl.at("pressure_hpa"), lvl.at("height_m"), lvl.at("temp_c"),
                                  lvl.at("dewpoint_c"), lvl.value("wind_kt", 0.0),
                                  lvl.value("wind_deg", 0.0)});
    for (auto& [op, amap] : j.at("answers").items()) {
        AnswerMap answers;
        for (auto& [q, v] : amap.items()) {
            if (v.is_number())
                answers[q] = v.get<double>();
            else
                answers[q] = v.get<std::string>();
        }
        s.answers[op] = std::move(answers);
    }
    if (s.answers.empty()) throw ParseError("scenario " + s.date + " has no operator answer sets");
    if (s.features.empty()) throw ParseError("scenario " + s.date + " has no zone features");
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["date"] = s.date;
    j["climatology_tag"] = s.climatology_tag;
    json features = json::object();
    for (auto& [zone, fmap] : s.features) {
        json zf = json::object();
        for (auto& [name, v] : fmap) zf[name] = v;
        features[zone_name(zone)] = zf;
    }
    j["features"] = features;
    json sounding = json::array();
    for (auto& lvl : s.sounding)
        sounding.push_back({{"pressure_hpa", lvl.pressure_hpa},
                            {"height_m", lvl.height_m},
                            {"temp_c", lvl.temp_c},
                            {"dewpoint_c", lvl.dewpoint_c},
                            {"wind_kt", lvl.wind_kt},
                            {"wind_deg", lvl.wind_deg}});
    j["sounding"] = sounding;
    json answers = json::object();
    for (auto& [op, amap] : s.answers) {
        json a = json::object();
        for (auto& [q, v] : amap) {
            if (std::holds_alternative<double>(v))
                a[q] = std::get<double>(v);
            else
                a[q] = std::get<std::string>(v);
        }
        answers[op] = a;
    }
    j["answers"] = answers;
    return j;
}

Scenario read_scenario_file(const std::string& path) {
    try {
        return scenario_from_json(load_json_file(path));
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_scenario_file(const std::string& path, const Scenario& s) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scenario file: " + path);
    out << scenario_to_json(s).dump(2) << "\n";
}

Ingested ingest(const std::string& scenario_dir, const std::string& observation_file,
                TimeWindow window) {
    Ingested result;
    if (!fs::is_directory(scenario_dir))
        throw ParseError("scenario directory does not exist: " + scenario_dir);
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(scenario_dir))
        if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    std::set<std::string> dates;
    for (const std::string& p : paths) {
        Scenario s = read_scenario_file(p);
        if (!dates.insert(s.date).second)
            throw DuplicateDate("duplicate scenario date " + s.date + " (" + p + ")");
        result.scenarios.push_back(std::move(s));
    }
    std::sort(result.scenarios.begin(), result.scenarios.end(),
              [](const Scenario& a, const Scenario& b) { return a.date < b.date; });

    if (!observation_file.empty()) {
        result.reports = read_report_ledger(observation_file);
        std::map<std::string, std::map<Zone, std::vector<EventReport>>> grouped;
        for (const EventReport& r : result.reports) grouped[r.date][r.zone].push_back(r);
        std::set<std::string> all_dates;
        for (auto& s : result.scenarios) all_dates.insert(s.date);
        for (auto& [date, g] : grouped) all_dates.insert(date);
        for (const std::string& date : all_dates) {
            std::map<Zone, Observation> day;
            for (Zone z : sub_zones()) {
                std::vector<EventReport> reports;
                auto git = grouped.find(date);
                if (git != grouped.end()) {
                    auto zit = git->second.find(z);
                    if (zit != git->second.end()) reports = zit->second;
                }
                Observation obs = aggregate_day(z, reports, window);
                obs.date = date;
                day[z] = std::move(obs);
            }
            day[Zone::Overall] = overall_observation(day);
            result.observations[date] = std::move(day);
        }
    }
    return result;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    json j = load_json_file(path);
    ExperimentConfig cfg;
    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty() || fs::path(p).is_absolute()) return p;
        return (base / p).string();
    };
    cfg.scenario_dir = resolve(j.value("scenarios", ""));
    cfg.observation_file = resolve(j.value("observations", ""));
    cfg.out_dir = resolve(j.value("out", ""));
    if (j.contains("window")) {
        cfg.window.start_min = j.at("window")[0];
        cfg.window.end_min = j.at("window")[1];
    }
    if (j.contains("base_rates"))
        for (auto& [zone_text, r] : j.at("base_rates").items())
            cfg.base_rates[parse_zone(zone_text)] = r.get<double>();
    if (j.value("score_mode", "binary") == "multi")
        cfg.score_mode = ScoreboardOptions::Mode::Multi;
    auto dir = fs::path(path).parent_path();
    for (auto& r : j.at("forecasters")) {
        ForecasterRegistration reg;
        reg.id = r.at("id").get<std::string>();
        reg.kind = r.at("kind").get<std::string>();
        fs::path cp = r.at("config").get<std::string>();
        reg.config_path = cp.is_absolute() ? cp.string() : (dir / cp).string();
        reg.learning = r.value("learning", false);
        reg.operator_id = r.value("operator", "");
        reg.coverage.forecaster_id = reg.id;
        if (r.contains("zones"))
            for (auto& z : r.at("zones"))
                reg.coverage.zones.insert(parse_zone(z.get<std::string>()));
        else
            reg.coverage = default_coverage(reg.id);
        cfg.registrations.push_back(std::move(reg));
    }
    std::set<std::string> ids;
    for (auto& r : cfg.registrations)
        if (!ids.insert(r.id).second) throw Error("duplicate forecaster id '" + r.id + "'");
    return cfg;
}

Experiment::Experiment(const ExperimentConfig& config) : config_(config) {
    for (const ForecasterRegistration& reg : config.registrations)
        forecasters_.push_back(make_forecaster(reg));
}

std::string Experiment::state_hash(const std::string& forecaster_id) const {
    for (const auto& f : forecasters_)
        if (f->registration().id == forecaster_id)
            return fnv1a_hex(f->state_snapshot().dump());
    throw UnknownForecaster("no forecaster '" + forecaster_id + "'");
}

DayResult Experiment::run_day(const Scenario& scenario) {
    DayResult result;
    for (auto& f : forecasters_) {
        const ForecasterRegistration& reg = f->registration();
        LedgerRow row;
        row.date = scenario.date;
        row.forecaster_id = reg.id;
        row.state_hash_before = fnv1a_hex(f->state_snapshot().dump());
        std::string op = pick_operator(scenario, reg.operator_id);
        auto t0 = std::chrono::steady_clock::now();
        try {
            ForecastSet fset = f->forecast(scenario, op);
            auto dt = std::chrono::steady_clock::now() - t0;
            fset.runtime_ms = std::max<std::int64_t>(
                1, std::chrono::duration_cast<std::chrono::milliseconds>(dt).count());
            row.runtime_ms = fset.runtime_ms;
            row.questions_asked = fset.questions_asked;
            // Contract check: entries must match declared coverage.
            std::set<Zone> got;
            for (auto& [z, t] : fset.entries) got.insert(z);
            if (got != reg.coverage.zones)
                throw Error(reg.id + ": forecast entries do not match declared coverage");
            result.forecasts.push_back(std::move(fset));
        } catch (const std::exception& e) {
            // One system failing must not take the others down with it.
            result.failures.push_back(reg.id + " " + scenario.date + ": " + e.what());
        }
        row.state_hash_after = row.state_hash_before;  // forecasting never mutates state
        ledger_.push_back(std::move(row));
    }
    return result;
}

void Experiment::feedback_day(const std::string& date,
                              const std::map<Zone, Observation>& observed) {
    if (!feedback_dates_.insert(date).second)
        throw Error("feedback already applied for " + date);
    for (auto& f : forecasters_) {
        if (!f->registration().learning) continue;
        std::string before = fnv1a_hex(f->state_snapshot().dump());
        f->feedback(date, observed);
        std::string after = fnv1a_hex(f->state_snapshot().dump());
        for (auto it = ledger_.rbegin(); it != ledger_.rend(); ++it) {
            if (it->date == date && it->forecaster_id == f->registration().id) {
                it->state_hash_after = after;
                break;
            }
        }
        (void)before;
    }
}

json Experiment::snapshot(const std::string& after_date) const {
    json states = json::object();
    for (const auto& f : forecasters_) states[f->registration().id] = f->state_snapshot();
    json j;
    j["version"] = kSnapshotVersion;
    j["after_date"] = after_date;
    j["states"] = states;
    return j;
}

void Experiment::restore(const json& snapshot_json) {
    const json& states = snapshot_json.at("states");
    for (auto& f : forecasters_) {
        const std::string& id = f->registration().id;
        if (states.contains(id)) f->state_restore(states.at(id));
    }
}

void write_snapshot_file(const std::string& path, const json& snapshot) {
    json j = snapshot;
    std::string payload = j["states"].dump();
    j["content_hash"] = fnv1a_hex(payload);
    std::ofstream out(path);
    if (!out) throw Error("cannot write snapshot: " + path);
    out << j.dump(2) << "\n";
}

json read_snapshot_file(const std::string& path) {
    json j = load_json_file(path);
    int version = j.value("version", -1);
    if (version != kSnapshotVersion)
        throw VersionMismatch("snapshot " + path + " has version " + std::to_string(version) +
                              ", this build reads version " + std::to_string(kSnapshotVersion));
    std::string expected = j.value("content_hash", "");
    std::string actual = fnv1a_hex(j.at("states").dump());
    if (expected != actual)
        throw HashMismatch("snapshot " + path + " content hash " + actual + " != recorded " +
                           expected);
    return j;
}

void write_forecasts_csv(const std::string& path, const std::vector<ForecastSet>& forecasts) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write forecasts: " + path);
    out << "date,forecaster,zone,p0,p1,p2,operator,questions\n";
    for (const ForecastSet& fs : forecasts)
        for (auto& [zone, t] : fs.entries)
            out << join_csv({fs.date, fs.forecaster_id, zone_name(zone), format_double(t.p0),
                             format_double(t.p1), format_double(t.p2), fs.operator_id,
                             std::to_string(fs.questions_asked)})
                << "\n";
}

std::vector<ForecastSet> read_forecasts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open forecasts: " + path);
    std::map<std::pair<std::string, std::string>, ForecastSet> sets;  // (date, forecaster)
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || lineno == 1) continue;
        auto f = split_csv_line(line);
        if (f.size() != 8)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 8 fields");
        ForecastSet& fs = sets[{f[0], f[1]}];
        fs.date = f[0];
        fs.forecaster_id = f[1];
        fs.operator_id = f[6];
        fs.questions_asked = int(parse_double(f[7]));
        fs.entries[parse_zone(f[2])] =
            make_prob_triple(parse_double(f[3]), parse_double(f[4]), parse_double(f[5]));
    }
    std::vector<ForecastSet> out;
    for (auto& [key, fs] : sets) out.push_back(std::move(fs));
    return out;
}

namespace {

std::string briefing_text(const Scenario& scenario, const DayResult& day,
                          const std::map<Zone, Observation>* yesterday,
                          const std::string& yesterday_date) {
    std::string out = "SHOOTOUT daily briefing, " + scenario.date + "\n\n";
    out += "forecaster      zone      p0     p1     p2\n";
    auto fmt = [](double v) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return std::string(buf);
    };
    for (const ForecastSet& fs : day.forecasts)
        for (auto& [zone, t] : fs.entries) {
            std::string line = fs.forecaster_id;
            line.resize(16, ' ');
            std::string zn = zone_name(zone);
            zn.resize(10, ' ');
            out += line + zn + fmt(t.p0) + "  " + fmt(t.p1) + "  " + fmt(t.p2) + "\n";
        }
    if (!day.failures.empty()) {
        out += "\nmissing forecasts:\n";
        for (auto& f : day.failures) out += "  " + f + "\n";
    }
    if (yesterday) {
        out += "\nverification for " + yesterday_date + ":\n";
        for (auto& [zone, obs] : *yesterday)
            out += "  " + zone_name(zone) + ": category " +
                   std::to_string(category_code(obs.category)) + "\n";
    }
    return out;
}

}  // namespace

void run_experiment(const ExperimentConfig& config, Experiment& experiment,
                    const std::string& start_after) {
    Ingested data = ingest(config.scenario_dir, config.observation_file, config.window);

    fs::create_directories(config.out_dir);
    fs::create_directories(fs::path(config.out_dir) / "states");
    fs::create_directories(fs::path(config.out_dir) / "briefings");

    std::vector<ForecastSet> all_forecasts;
    std::vector<std::string> all_failures;
    const std::map<Zone, Observation>* prev_obs = nullptr;
    std::string prev_date;

    for (const Scenario& scenario : data.scenarios) {
        if (!start_after.empty() && scenario.date <= start_after) continue;
        DayResult day = experiment.run_day(scenario);
        for (auto& f : day.failures) all_failures.push_back(f);

        std::ofstream brief(fs::path(config.out_dir) / "briefings" / (scenario.date + ".txt"));
        brief << briefing_text(scenario, day, prev_obs, prev_date);

        for (ForecastSet& fs : day.forecasts) all_forecasts.push_back(std::move(fs));

        auto oit = data.observations.find(scenario.date);
        if (oit != data.observations.end()) {
            experiment.feedback_day(scenario.date, oit->second);
            prev_obs = &oit->second;
            prev_date = scenario.date;
        }
        write_snapshot_file(
            (fs::path(config.out_dir) / "states" / (scenario.date + ".json")).string(),
            experiment.snapshot(scenario.date));
    }

    write_forecasts_csv((fs::path(config.out_dir) / "forecasts.csv").string(), all_forecasts);

    {
        std::ofstream ledger(fs::path(config.out_dir) / "ledger.csv");
        ledger << "date,forecaster,questions,state_hash_before,state_hash_after\n";
        std::ofstream timings(fs::path(config.out_dir) / "timings.csv");
        timings << "date,forecaster,runtime_ms\n";
        for (const LedgerRow& row : experiment.ledger()) {
            ledger << join_csv({row.date, row.forecaster_id, std::to_string(row.questions_asked),
                                row.state_hash_before, row.state_hash_after})
                   << "\n";
            timings << join_csv(
                           {row.date, row.forecaster_id, std::to_string(row.runtime_ms)})
                    << "\n";
        }
    }
    if (!all_failures.empty()) {
        std::ofstream fail(fs::path(config.out_dir) / "failures.txt");
        for (auto& f : all_failures) fail << f << "\n";
    }

    // Scoring artifacts.
    std::map<ObservationKey, Category> obs_by_key;
    for (auto& [date, day] : data.observations)
        for (auto& [zone, obs] : day) obs_by_key[{date, zone}] = obs.category;

    if (!all_forecasts.empty() && !obs_by_key.empty()) {
        ScoreboardOptions options;
        options.mode = config.score_mode;
        if (!config.base_rates.empty()) options.base_rates = config.base_rates;
        SkillReport report = scoreboard(all_forecasts, obs_by_key, options);
        std::ofstream(fs::path(config.out_dir) / "skill_report.csv") << skill_report_csv(report);
        std::ofstream(fs::path(config.out_dir) / "skill_report.txt") << skill_report_text(report);

        std::map<std::string, std::vector<std::pair<double, int>>> by_forecaster;
        for (const ForecastSet& fs : all_forecasts)
            for (auto& [zone, t] : fs.entries) {
                auto it = obs_by_key.find({fs.date, zone});
                if (it == obs_by_key.end()) continue;
                by_forecaster[fs.forecaster_id].push_back(
                    {t.p_event(), category_code(it->second) >= 1 ? 1 : 0});
            }
        for (auto& [id, series] : by_forecaster)
            std::ofstream(fs::path(config.out_dir) / ("reliability_" + id + ".csv"))
                << reliability_csv(reliability_table(series, 10));
    } else {
        // Empty runs still produce well-formed outputs.
        std::ofstream(fs::path(config.out_dir) / "skill_report.csv")
            << "forecaster,zone,n,brier,brier_ref,bss,coverage\n";
        std::ofstream(fs::path(config.out_dir) / "skill_report.txt") << "";
    }
}

std::vector<DivergenceRow> operator_divergence(const std::vector<Scenario>& scenarios,
                                               const std::vector<ForecasterRegistration>& regs) {
    bool multi = false;
    for (const Scenario& s : scenarios)
        if (s.answers.size() >= 2) multi = true;
    if (!multi) throw SingleOperator("no scenario carries answer sets from two or more operators");

    std::vector<DivergenceRow> rows;
    for (const ForecasterRegistration& reg : regs) {
        auto f = make_forecaster(reg);
        DivergenceRow row;
        row.forecaster_id = reg.id;
        double sum = 0;
        long terms = 0;
        for (const Scenario& s : scenarios) {
            if (s.answers.size() < 2) continue;
            std::vector<ForecastSet> per_op;
            for (auto& [op, answers] : s.answers) per_op.push_back(f->forecast(s, op));
            for (size_t i = 0; i < per_op.size(); ++i)
                for (size_t j = i + 1; j < per_op.size(); ++j) {
                    ++row.comparisons;
                    for (auto& [zone, a] : per_op[i].entries) {
                        const ProbTriple& b = per_op[j].entries.at(zone);
                        for (int c = 0; c < 3; ++c) {
                            double d = std::abs(a[c] - b[c]);
                            sum += d;
                            ++terms;
                            row.max_abs_diff = std::max(row.max_abs_diff, d);
                        }
                    }
                }
        }
        row.mean_abs_diff = terms ? sum / double(terms) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace shootout
