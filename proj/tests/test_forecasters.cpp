#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "shootout/forecasters.hpp"
#include "shootout/linear.hpp"
#include "shootout/gen.hpp"
#include "shootout/harness.hpp"

using namespace shootout;
namespace fs = std::filesystem;

namespace {

// one shared synthetic season for the forecaster-level tests
const fs::path& season_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "shootout_fc_season";
        fs::remove_all(d);
        GenOptions opt;
        opt.days = 8;
        opt.seed = 7;
        opt.out_dir = d.string();
        generate_season(opt);
        return d;
    }();
    return dir;
}

ExperimentConfig config_full() {
    return load_experiment_config((season_dir() / "config_full.json").string());
}

const ForecasterRegistration& reg_of(const ExperimentConfig& cfg, const std::string& id) {
    for (auto& r : cfg.registrations)
        if (r.id == id) return r;
    throw Error("no registration " + id);
}

}  // namespace

TEST_CASE("factory covers every kind and rejects unknowns") {
    ExperimentConfig cfg = config_full();
    for (auto& r : cfg.registrations) CHECK(make_forecaster(r) != nullptr);
    ForecasterRegistration bogus{"x", "oracle", "nope.json", {}, false, ""};
    CHECK_THROWS(make_forecaster(bogus));
}

TEST_CASE("climatology forecasts its configured base rates") {
    ExperimentConfig cfg = config_full();
    auto f = make_forecaster(reg_of(cfg, "climatology"));
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    ForecastSet set = f->forecast(data.scenarios[0], "op1");
    ProbTriple z1 = set.entries.at(Zone::Z1);
    CHECK(z1.p_event() == doctest::Approx(0.18).epsilon(1e-9));
    CHECK(z1.p2 == doctest::Approx(0.18 * 0.35).epsilon(1e-9));
}

TEST_CASE("forecast is deterministic from identical state") {
    ExperimentConfig cfg = config_full();
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    for (auto& r : cfg.registrations) {
        auto a = make_forecaster(r);
        auto b = make_forecaster(r);
        ForecastSet fa = a->forecast(data.scenarios[0], "op1");
        ForecastSet fb = b->forecast(data.scenarios[0], "op1");
        CHECK_MESSAGE(fa.entries == fb.entries, r.id);
    }
}

TEST_CASE("missing required feature names the variable") {
    ExperimentConfig cfg = config_full();
    auto f = make_forecaster(reg_of(cfg, "alps"));
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    Scenario broken = data.scenarios[0];
    for (auto& [zone, fm] : broken.features) fm.erase("cape");
    CHECK_THROWS_AS(f->forecast(broken, "op1"), MissingVariable);
}

TEST_CASE("swap feedback moves exactly the fired weights") {
    ExperimentConfig cfg = config_full();
    auto f = make_forecaster(reg_of(cfg, "swap"));
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    nlohmann::json before = f->state_snapshot();
    f->forecast(data.scenarios[0], "op1");
    f->feedback(data.scenarios[0].date, data.observations.at(data.scenarios[0].date));
    nlohmann::json after = f->state_snapshot();
    CHECK(before.at("weights") != after.at("weights"));
    int changed = 0;
    for (auto& [id, w] : before.at("weights").items())
        if (after.at("weights").at(id) != w) ++changed;
    CHECK(changed >= 1);
    // every change is a whole number of eta steps, at most one per zone
    for (auto& [id, w] : before.at("weights").items()) {
        double d = std::abs(after.at("weights").at(id).get<double>() - w.get<double>());
        CHECK(d <= 4 * 0.05 + 1e-12);
        CHECK(std::abs(d / 0.05 - std::round(d / 0.05)) < 1e-9);
    }
}

TEST_CASE("state snapshot round-trips") {
    ExperimentConfig cfg = config_full();
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    for (auto& r : cfg.registrations) {
        auto a = make_forecaster(r);
        a->forecast(data.scenarios[0], "op1");
        if (r.learning) a->feedback(data.scenarios[0].date, data.observations.at(data.scenarios[0].date));
        auto b = make_forecaster(r);
        b->state_restore(a->state_snapshot());
        CHECK_MESSAGE(a->state_snapshot() == b->state_snapshot(), r.id);
        ForecastSet fa = a->forecast(data.scenarios[1], "op1");
        ForecastSet fb = b->forecast(data.scenarios[1], "op1");
        CHECK_MESSAGE(fa.entries == fb.entries, r.id);
    }
}

TEST_CASE("static analog library never changes state") {
    ExperimentConfig cfg = config_full();
    ForecasterRegistration r = reg_of(cfg, "gopad");
    r.id = "gopad_static";
    r.config_path = (fs::path(r.config_path).parent_path() / "gopad_static.json").string();
    r.learning = false;
    r.coverage = default_coverage("gopad_static");
    auto f = make_forecaster(r);
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    nlohmann::json before = f->state_snapshot();
    f->forecast(data.scenarios[0], "op1");
    f->feedback(data.scenarios[0].date, data.observations.at(data.scenarios[0].date));
    CHECK(f->state_snapshot() == before);
}

TEST_CASE("only interview-style systems consume answers") {
    ExperimentConfig cfg = config_full();
    for (auto& r : cfg.registrations) {
        auto f = make_forecaster(r);
        bool expects = r.kind == "induction" || r.kind == "parcel";
        CHECK_MESSAGE(f->uses_answers() == expects, r.id);
    }
}

TEST_CASE("willard counts lazy interview questions") {
    ExperimentConfig cfg = config_full();
    auto f = make_forecaster(reg_of(cfg, "willard"));
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    ForecastSet set = f->forecast(data.scenarios[0], "op1");
    CHECK(set.questions_asked >= 1);
    CHECK(set.entries.count(Zone::Overall) == 1);
    CHECK(set.entries.size() == 1);
}

TEST_CASE("assemble_features merges answers only when asked to") {
    Scenario s;
    s.date = "1989-06-01";
    for (Zone z : sub_zones()) s.features[z] = {{"cape", 1000}};
    s.features[Zone::Overall] = {{"cape", 1200}};
    s.answers["op1"] = {{"q_lift", 0.7}, {"q_text", std::string("yes")}};
    FeatureMap without = assemble_features(s, Zone::Z1, "op1", {{"w_max", 12.0}});
    CHECK(without.count("q_lift") == 0);
    CHECK(without.at("w_max") == 12.0);
    CHECK(without.at("cape") == 1000);
    FeatureMap with = assemble_features(s, Zone::Z1, "op1", {}, true);
    CHECK(with.at("q_lift") == 0.7);
    CHECK(with.count("q_text") == 0);  // text answers are not numeric features
}

TEST_CASE("operator selection") {
    Scenario s;
    s.answers["op1"] = {};
    s.answers["op2"] = {};
    CHECK(pick_operator(s, "op2") == "op2");
    CHECK(pick_operator(s, "") == "op1");
    CHECK(pick_operator(s, "ghost") == "op1");
}

TEST_CASE("explanations recall the forecast day") {
    ExperimentConfig cfg = config_full();
    Ingested data = ingest(cfg.scenario_dir, cfg.observation_file, cfg.window);
    for (const char* id : {"swap", "kasspr", "convex", "willard"}) {
        auto f = make_forecaster(reg_of(cfg, id));
        f->forecast(data.scenarios[0], "op1");
        CHECK_MESSAGE(!f->explain_forecast(data.scenarios[0].date).empty(), id);
        CHECK_THROWS_AS(f->explain_forecast("1999-01-01"), MissingTrace);
    }
}
