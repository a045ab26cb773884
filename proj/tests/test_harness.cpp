#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "shootout/gen.hpp"
#include "shootout/harness.hpp"

using namespace shootout;
namespace fs = std::filesystem;

namespace {

const fs::path& season_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "shootout_hn_season";
        fs::remove_all(d);
        GenOptions opt;
        opt.days = 6;
        opt.seed = 11;
        opt.out_dir = d.string();
        generate_season(opt);
        return d;
    }();
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("scenario json round-trip") {
    Ingested data = ingest((season_dir() / "scenarios").string(),
                           (season_dir() / "obs.csv").string(), TimeWindow{});
    REQUIRE(data.scenarios.size() == 6);
    const Scenario& s = data.scenarios[2];
    Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(back.date == s.date);
    CHECK(back.features == s.features);
    CHECK(back.answers == s.answers);
    CHECK(back.sounding.size() == s.sounding.size());
}

TEST_CASE("ingest sorts, aggregates and validates") {
    Ingested data = ingest((season_dir() / "scenarios").string(),
                           (season_dir() / "obs.csv").string(), TimeWindow{});
    for (size_t i = 1; i < data.scenarios.size(); ++i)
        CHECK(data.scenarios[i - 1].date < data.scenarios[i].date);
    for (auto& [date, zones] : data.observations) {
        REQUIRE(zones.size() == 5);
        Category mx = Category::Nonsignificant;
        for (Zone z : sub_zones()) mx = std::max(mx, zones.at(z).category);
        CHECK(zones.at(Zone::Overall).category == mx);
    }
}

TEST_CASE("ingest errors") {
    fs::path d = fs::temp_directory_path() / "shootout_ingest_err";
    fs::remove_all(d);
    fs::create_directories(d / "scenarios");
    // empty directory is a valid empty run
    Ingested empty = ingest((d / "scenarios").string(), "", TimeWindow{});
    CHECK(empty.scenarios.empty());

    std::ofstream(d / "scenarios" / "bad.json") << "{ not json";
    try {
        ingest((d / "scenarios").string(), "", TimeWindow{});
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }

    fs::remove(d / "scenarios" / "bad.json");
    Scenario s = ingest((season_dir() / "scenarios").string(), "", TimeWindow{}).scenarios[0];
    write_scenario_file((d / "scenarios" / "a.json").string(), s);
    write_scenario_file((d / "scenarios" / "b.json").string(), s);
    CHECK_THROWS_AS(ingest((d / "scenarios").string(), "", TimeWindow{}), DuplicateDate);
    fs::remove_all(d);
}

TEST_CASE("run_day isolates per-forecaster failures") {
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    Experiment e(cfg);
    Scenario broken = data.scenarios[0];
    for (auto& [zone, fm] : broken.features) fm.erase("cape");
    DayResult r = e.run_day(broken);
    CHECK(!r.failures.empty());
    bool convex_ok = false;
    for (auto& f : r.forecasts)
        if (f.forecaster_id == "convex" && !f.entries.empty()) convex_ok = true;
    CHECK(convex_ok);  // sounding-driven system unaffected by the missing feature
}

TEST_CASE("feedback is idempotent per date") {
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    Experiment e(cfg);
    e.run_day(data.scenarios[0]);
    e.feedback_day(data.scenarios[0].date, data.observations.at(data.scenarios[0].date));
    std::string h1 = e.state_hash("swap");
    CHECK_THROWS(
        e.feedback_day(data.scenarios[0].date, data.observations.at(data.scenarios[0].date)));
    CHECK(e.state_hash("swap") == h1);
}

TEST_CASE("snapshot files verify version and hash") {
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    Experiment e(cfg);
    fs::path p = fs::temp_directory_path() / "snap_rt.json";
    write_snapshot_file(p.string(), e.snapshot("1989-06-01"));
    nlohmann::json back = read_snapshot_file(p.string());
    CHECK(back.at("after_date") == "1989-06-01");
    Experiment e2(cfg);
    e2.restore(back);
    CHECK(e2.state_hash("swap") == e.state_hash("swap"));

    // tamper
    nlohmann::json j = nlohmann::json::parse(read_file(p));
    j["states"]["swap"]["weights"]["swap_base0"] = 0.999;
    std::ofstream(p) << j.dump(2);
    CHECK_THROWS_AS(read_snapshot_file(p.string()), HashMismatch);

    j = e.snapshot("1989-06-01");
    j["version"] = 99;
    std::ofstream(p) << j.dump(2);
    try {
        read_snapshot_file(p.string());
        FAIL("expected VersionMismatch");
    } catch (const VersionMismatch& err) {
        std::string msg = err.what();
        CHECK(msg.find("99") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
    }
    fs::remove(p);
}

TEST_CASE("forecasts csv round-trip preserves every digit") {
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    Experiment e(cfg);
    DayResult r = e.run_day(data.scenarios[0]);
    fs::path p = fs::temp_directory_path() / "fc_rt.csv";
    write_forecasts_csv(p.string(), r.forecasts);
    auto back = read_forecasts_csv(p.string());
    REQUIRE(back.size() == r.forecasts.size());
    auto key_map = [](const std::vector<ForecastSet>& v) {
        std::map<std::pair<std::string, std::string>, std::map<Zone, ProbTriple>> m;
        for (auto& f : v) m[{f.date, f.forecaster_id}] = f.entries;
        return m;
    };
    CHECK(key_map(back) == key_map(r.forecasts));
    fs::remove(p);
}

TEST_CASE("zero-day run produces well-formed empty artifacts") {
    fs::path d = fs::temp_directory_path() / "shootout_zero";
    fs::remove_all(d);
    fs::create_directories(d / "scenarios");
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    cfg.scenario_dir = (d / "scenarios").string();
    cfg.observation_file = "";
    cfg.out_dir = (d / "out").string();
    run_experiment(cfg);
    CHECK(read_file(d / "out" / "forecasts.csv") ==
          "date,forecaster,zone,p0,p1,p2,operator,questions\n");
    CHECK(fs::exists(d / "out" / "ledger.csv"));
    fs::remove_all(d);
}

TEST_CASE("full run artifacts and cardinality") {
    fs::path out = fs::temp_directory_path() / "shootout_hn_out";
    fs::remove_all(out);
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    cfg.out_dir = out.string();
    run_experiment(cfg);
    auto forecasts = read_forecasts_csv((out / "forecasts.csv").string());
    CHECK(forecasts.size() == 6 * cfg.registrations.size());
    std::string skill = read_file(out / "skill_report.csv");
    size_t rows = std::count(skill.begin(), skill.end(), '\n') - 1;
    size_t expect = 0;
    for (auto& r : cfg.registrations) expect += r.coverage.zones.size();
    CHECK(rows == expect);
    // ledger carries no runtimes; timings.csv does
    std::string ledger = read_file(out / "ledger.csv");
    CHECK(ledger.find("runtime") == std::string::npos);
    std::string timings = read_file(out / "timings.csv");
    CHECK(timings.find("runtime_ms") != std::string::npos);
    CHECK(fs::exists(out / "states" / "1989-06-06.json"));
    CHECK(fs::exists(out / "briefings" / "1989-06-03.txt"));
    fs::remove_all(out);
}

TEST_CASE("replay from a mid-season snapshot matches the straight run") {
    fs::path out_a = fs::temp_directory_path() / "shootout_replay_a";
    fs::path out_b = fs::temp_directory_path() / "shootout_replay_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    cfg.out_dir = out_a.string();
    run_experiment(cfg);

    nlohmann::json snap = read_snapshot_file((out_a / "states" / "1989-06-03.json").string());
    cfg.out_dir = out_b.string();
    Experiment resumed(cfg);
    resumed.restore(snap);
    run_experiment(cfg, resumed, "1989-06-03");

    auto full = read_forecasts_csv((out_a / "forecasts.csv").string());
    auto tail = read_forecasts_csv((out_b / "forecasts.csv").string());
    std::vector<ForecastSet> expect;
    for (auto& f : full)
        if (f.date > "1989-06-03") expect.push_back(f);
    REQUIRE(tail.size() == expect.size());
    for (size_t i = 0; i < tail.size(); ++i) {
        CHECK(tail[i].forecaster_id == expect[i].forecaster_id);
        CHECK(tail[i].entries == expect[i].entries);
    }
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("operator divergence fixtures") {
    ExperimentConfig cfg = load_experiment_config((season_dir() / "config.json").string());
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);

    // identical answer sets
    auto rows = operator_divergence(data.scenarios, cfg.registrations);
    for (auto& r : rows) CHECK_MESSAGE(r.max_abs_diff == 0, r.forecaster_id);

    // force op2 down the strong-outlook interview path
    std::vector<Scenario> tweaked = data.scenarios;
    for (auto& s : tweaked) {
        auto& a = s.answers.at("op2");
        a["q_moisture"] = std::string("favorable");
        a["q_synoptic_lift"] = 0.9;
        a["q_cap_strength"] = 0.0;
        a["q_guidance"] = std::string("strong");
    }
    auto rows2 = operator_divergence(tweaked, cfg.registrations);
    std::map<std::string, double> by_id;
    for (auto& r : rows2) by_id[r.forecaster_id] = r.max_abs_diff;
    CHECK(by_id.at("willard") > 0);
    CHECK(by_id.at("alps") == 0);
    CHECK(by_id.at("oci") == 0);
    CHECK(by_id.at("swap") == 0);
    CHECK(by_id.at("kasspr") == 0);
    CHECK(by_id.at("gopad") == 0);

    // single operator cannot diverge
    std::vector<Scenario> solo = data.scenarios;
    for (auto& s : solo) s.answers.erase("op2");
    CHECK_THROWS_AS(operator_divergence(solo, cfg.registrations), SingleOperator);
}
