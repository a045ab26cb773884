#include "shootout/gen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "shootout/analog.hpp"
#include "shootout/classify.hpp"
#include "shootout/harness.hpp"

namespace shootout {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Hand-rolled draws on top of mt19937_64 keep the byte stream independent of
// the standard library's distribution implementations.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform() { return double(engine() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = std::max(uniform(), 1e-12), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    bool bernoulli(double p) { return uniform() < p; }
};

std::string date_for(const std::string& start, int offset) {
    int y = std::stoi(start.substr(0, 4));
    int m = std::stoi(start.substr(5, 2));
    int d = std::stoi(start.substr(8, 2)) + offset;
    static const int month_len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    while (true) {
        int len = month_len[m - 1] + ((m == 2 && y % 4 == 0) ? 1 : 0);
        if (d <= len) break;
        d -= len;
        if (++m > 12) {
            m = 1;
            ++y;
        }
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

struct DayDraw {
    double u_day = 0;                       // shared storm potential
    std::array<double, 4> u_zone{};         // per-zone potential
    std::array<Category, 4> category{};     // verified outcome per zone
    std::array<FeatureMap, 4> features{};
};

// Per-zone event thresholds as quantiles of the zone-potential distribution,
// so realized event rates track the configured base rates.
std::array<double, 4> zone_thresholds(const GenOptions& opt) {
    Rng rng(opt.seed ^ 0xd1b54a32d192ed03ull);
    std::vector<double> sample(20000);
    for (double& v : sample) {
        double u_day = rng.uniform();
        v = std::clamp(0.7 * u_day + 0.3 * rng.uniform(), 0.0, 1.0);
    }
    std::sort(sample.begin(), sample.end());
    std::array<double, 4> t{};
    for (int z = 0; z < 4; ++z) {
        auto idx = std::size_t((1.0 - opt.base_rates[z]) * (sample.size() - 1));
        t[z] = sample[idx];
    }
    return t;
}

DayDraw draw_day(Rng& rng, const GenOptions& opt, const std::array<double, 4>& thresholds) {
    DayDraw day;
    day.u_day = rng.uniform();
    for (int z = 0; z < 4; ++z) {
        double u = std::clamp(0.7 * day.u_day + 0.3 * rng.uniform(), 0.0, 1.0);
        day.u_zone[z] = u;
        // latent-threshold outcome: the event is a nearly deterministic
        // function of the zone potential, blurred by a little noise
        double latent = u + (0.1 / opt.coupling) * rng.normal();
        Category cat = Category::Nonsignificant;
        if (latent > thresholds[z])
            cat = rng.bernoulli(opt.severe_share) ? Category::Severe : Category::Significant;
        day.category[z] = cat;

        FeatureMap& f = day.features[z];
        f["cape"] = std::max(0.0, 200 + 2800 * u + 100 * rng.normal());
        f["shear"] = std::max(0.0, 5 + 35 * u + 3 * rng.normal());
        f["surface_temp"] = 18 + 17 * u + 1.5 * rng.normal();
        f["humidity"] = std::clamp(20 + 70 * u + 5 * rng.normal(), 0.0, 100.0);
        f["wind_speed"] = std::max(0.0, 4 + 18 * u + 2 * rng.normal());
        f["upslope"] = u > 0.45 ? 1.0 : 0.0;
        f["noise_signal"] = rng.uniform();
    }
    return day;
}

FeatureMap overall_features(const DayDraw& day) {
    FeatureMap out;
    for (auto& [name, v] : day.features[0]) {
        double sum = 0;
        for (int z = 0; z < 4; ++z) sum += day.features[z].at(name);
        out[name] = sum / 4.0;
    }
    return out;
}

std::vector<SoundingLevel> make_sounding(const DayDraw& day) {
    double ts = 10 + 20 * day.u_day;
    double lapse = 6.0 + 3.5 * day.u_day;  // steeper on stormy days
    double dewpoint_dep = 12 - 8 * day.u_day;
    std::vector<SoundingLevel> s;
    for (int k = 0; k <= 5; ++k) {
        double z = 1000.0 * k;
        s.push_back({850 - 90 * k, z, ts - lapse * z / 1000.0,
                     ts - dewpoint_dep - (lapse + 1.5) * z / 1000.0, 10 + 5 * k, 250});
    }
    return s;
}

AnswerMap make_answers(const DayDraw& day, const FeatureMap& overall) {
    AnswerMap a;
    a["q_moisture"] = overall.at("humidity") < 35 ? std::string("unfavorable")
                                                  : std::string("favorable");
    a["q_synoptic_lift"] = day.u_day;
    a["q_cap_strength"] = std::max(0.0, 12 - 10 * day.u_day);
    a["q_guidance"] = day.u_day < 0.4   ? std::string("weak")
                      : day.u_day < 0.7 ? std::string("moderate")
                                        : std::string("strong");
    a["q_upslope"] = overall.at("upslope") > 0 ? std::string("yes") : std::string("no");
    a["mixed_temp_target"] = 10 + 20 * day.u_day + 6.0;
    a["mixed_dewpoint_target"] = 10 + 20 * day.u_day - (12 - 8 * day.u_day) + 2.0;
    return a;
}

const std::vector<std::string> kLibraryFeatures = {"cape",     "shear",      "surface_temp",
                                                   "humidity", "wind_speed", "upslope"};

void append_reports(std::vector<EventReport>& reports, const std::string& date, Zone zone,
                    Category cat, Rng& rng) {
    // inside the 1900-0200 GMT window; times past midnight wrap to next-day minutes
    int t = 1160 + int(rng.uniform() * 360);
    if (t > 1440) t -= 1440;
    if (cat == Category::Severe) {
        double hail = 0.75 + rng.uniform() * 1.25;
        reports.push_back({date, zone, t, ReportKind::Hail, std::round(hail * 100) / 100, "spotter"});
        if (rng.bernoulli(0.3))
            reports.push_back({date, zone, (t + 20) % 1441, ReportKind::Wind,
                               std::round(50 + rng.uniform() * 20), "mesonet"});
    } else if (cat == Category::Significant) {
        if (rng.bernoulli(0.5))
            reports.push_back(
                {date, zone, t, ReportKind::Wind, std::round(35 + rng.uniform() * 14), "mesonet"});
        else
            reports.push_back({date, zone, t, ReportKind::Hail,
                               std::round((0.25 + rng.uniform() * 0.45) * 100) / 100, "spotter"});
    } else if (rng.bernoulli(0.15)) {
        // sub-threshold chatter that must classify as category 0
        reports.push_back({date, zone, t, ReportKind::Hail, 0.1, "spotter"});
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

// --- fixture model specs -------------------------------------------------

json linear_spec_json(const GenOptions& opt, bool informed, double mean_threshold) {
    json j;
    if (informed) {
        j["variables"] = {"cape", "shear", "surface_temp", "humidity", "wind_speed", "upslope"};
        j["weights"] = {0.3, 0.2, 0.1, 0.2, 0.1, 0.1};
        j["scaling"] = {{200, 3000}, {5, 40}, {18, 35}, {20, 90}, {4, 22}, {0, 1}};
        // steep ramp around the latent event threshold
        double w = 0.12;
        json cal = json::array();
        cal.push_back({0.0, 0.02});
        cal.push_back({std::max(0.0, mean_threshold - w), 0.05});
        cal.push_back({std::min(1.0, mean_threshold + w), 0.95});
        cal.push_back({1.0, 0.98});
        j["calibration"] = cal;
    } else {
        j["variables"] = {"noise_signal"};
        j["weights"] = {1.0};
        j["scaling"] = {{0.0, 1.0}};
        j["calibration"] = {{0.0, 0.02}, {1.0, 0.98}};  // confidently uninformed
    }
    j["severe_share"] = {{0.0, opt.severe_share}, {1.0, opt.severe_share}};
    return j;
}

std::string swap_rules_text() {
    return "# graded hypothesis base: the always-true rows keep the triple soft,\n"
           "# confidence weights adjust with daily verification\n"
           "HYPOTHESIS swap_base0 FOR 0 WHEN cape >= 0 CONFIDENCE 0.5\n"
           "HYPOTHESIS swap_base1 FOR 1 WHEN cape >= 0 CONFIDENCE 0.2\n"
           "HYPOTHESIS swap_base2 FOR 2 WHEN cape >= 0 CONFIDENCE 0.1\n"
           "HYPOTHESIS swap_quiet FOR 0 WHEN cape < 900 CONFIDENCE 0.5\n"
           "HYPOTHESIS swap_moderate FOR 1 WHEN cape IN [1400, 2400] CONFIDENCE 0.5\n"
           "HYPOTHESIS swap_sheared FOR 1 WHEN shear > 25 AND cape > 1400 CONFIDENCE 0.4\n"
           "HYPOTHESIS swap_unstable FOR 2 WHEN cape > 2400 CONFIDENCE 0.5\n"
           "HYPOTHESIS swap_updraft FOR 2 WHEN w_max > 40 AND humidity > 45 CONFIDENCE 0.4\n";
}

std::string kasspr_rules_text() {
    return "NECESSARY k_moisture WHEN humidity >= 28\n"
           "NECESSARY k_instability WHEN cape > 400\n"
           "SUFFICIENT k_cape WHEN cape > 2200\n"
           "SUFFICIENT k_shear WHEN shear > 26\n"
           "SUFFICIENT k_updraft WHEN w_max > 40\n"
           "SUFFICIENT k_upslope WHEN upslope = 1\n"
           "MODIFIER k_extreme WHEN cape > 2500 SCALE 0 BY 0.6, 2 BY 1.6\n"
           "MODIFIER k_moist WHEN humidity > 70 SCALE 2 BY 1.2\n"
           "MODIFIER k_dry WHEN humidity < 40 SCALE 2 BY 0.7\n";
}

std::string convex_rules_text() {
    return "HYPOTHESIS cx_base FOR 0 WHEN w_max >= 0 CONFIDENCE 0.6\n"
           "HYPOTHESIS cx_watch FOR 1 WHEN w_max >= 0 CONFIDENCE 0.15\n"
           "HYPOTHESIS cx_tail FOR 2 WHEN w_max >= 0 CONFIDENCE 0.05\n"
           "HYPOTHESIS cx_capped FOR 0 WHEN w_max < 24 OR cap_strength > 0.02 CONFIDENCE 0.8\n"
           "HYPOTHESIS cx_moderate FOR 1 WHEN w_max > 26 CONFIDENCE 0.5\n"
           "HYPOTHESIS cx_organized FOR 1 WHEN w_max > 35 AND q_synoptic_lift > 0.4 "
           "CONFIDENCE 0.3\n"
           "HYPOTHESIS cx_strong FOR 2 WHEN w_max > 42 CONFIDENCE 0.45\n";
}

std::string willard_hierarchy_text() {
    return "module outlook root\n"
           "  critical q_moisture unfavorable -> 0\n"
           "  test trigger\n"
           "    0: leaf 0\n"
           "    1: test q_guidance\n"
           "      moderate: leaf 1\n"
           "      strong: leaf 2\n"
           "      weak: leaf 1\n"
           "module trigger\n"
           "  test q_synoptic_lift <= 0.45\n"
           "    le: leaf 0\n"
           "    gt: test q_cap_strength <= 6\n"
           "      le: leaf 1\n"
           "      gt: leaf 0\n";
}

json registration(const std::string& id, const std::string& kind, const std::string& config,
                  bool learning, std::vector<std::string> zones = {}) {
    json r{{"id", id}, {"kind", kind}, {"config", config}, {"learning", learning}};
    if (!zones.empty()) r["zones"] = zones;
    return r;
}

}  // namespace

void generate_season(const GenOptions& opt) {
    fs::create_directories(opt.out_dir);
    fs::create_directories(fs::path(opt.out_dir) / "scenarios");
    fs::create_directories(fs::path(opt.out_dir) / "models");

    const std::array<double, 4> thresholds = zone_thresholds(opt);

    // Analog library from a pre-season history stream.
    Rng lib_rng(opt.seed ^ 0x9e3779b97f4a7c15ull);
    AnalogLibrary library;
    library.feature_names = kLibraryFeatures;
    for (int d = 0; d < opt.library_days; ++d) {
        DayDraw day = draw_day(lib_rng, opt, thresholds);
        std::string date = date_for("1986-06-01", d);
        for (int z = 0; z < 4; ++z) {
            std::vector<double> x;
            for (auto& name : kLibraryFeatures) x.push_back(day.features[z].at(name));
            library.rows.push_back({std::move(x), day.category[z], date});
        }
    }
    write_library((fs::path(opt.out_dir) / "models" / "gopad_library.csv").string(), library);

    // The season itself.
    Rng rng(opt.seed);
    std::vector<EventReport> reports;
    for (int d = 0; d < opt.days; ++d) {
        std::string date = date_for(opt.start_date, d);
        DayDraw day = draw_day(rng, opt, thresholds);

        Scenario s;
        s.date = date;
        s.climatology_tag = "summer";
        for (int z = 0; z < 4; ++z) s.features[sub_zones()[z]] = day.features[z];
        s.features[Zone::Overall] = overall_features(day);
        s.sounding = make_sounding(day);
        AnswerMap answers = make_answers(day, s.features[Zone::Overall]);
        s.answers["op1"] = answers;
        s.answers["op2"] = answers;  // identical by construction; divergence 0
        write_scenario_file((fs::path(opt.out_dir) / "scenarios" / (date + ".json")).string(), s);

        for (int z = 0; z < 4; ++z)
            append_reports(reports, date, sub_zones()[z], day.category[z], rng);
    }
    write_report_ledger((fs::path(opt.out_dir) / "obs.csv").string(), reports);

    double mean_threshold =
        (thresholds[0] + thresholds[1] + thresholds[2] + thresholds[3]) / 4.0;

    // Model fixtures.
    const fs::path models = fs::path(opt.out_dir) / "models";
    write_text(models / "alps.json", linear_spec_json(opt, true, mean_threshold).dump(2) + "\n");
    {
        json oci = linear_spec_json(opt, true, mean_threshold);
        oci["inhibitions"] = {{{"when", "humidity < 30 AND shear > 25"}, {"factor", 0.5}},
                              {{"when", "cap_strength > 0.05"}, {"factor", 0.7}}};
        write_text(models / "oci.json", oci.dump(2) + "\n");
    }
    write_text(models / "noise.json", linear_spec_json(opt, false, 0.0).dump(2) + "\n");
    write_text(models / "swap.rules", swap_rules_text());
    write_text(models / "swap.json",
               json{{"rules", "swap.rules"}, {"eta", 0.05}, {"w_min", 0.01}, {"w_max", 1.0},
                    {"w_init", 0.5}, {"prior", {0.7, 0.2, 0.1}}}
                       .dump(2) +
                   "\n");
    write_text(models / "kasspr.rules", kasspr_rules_text());
    write_text(models / "kasspr.json",
               json{{"rules", "kasspr.rules"},
                    {"required_fraction", 0.5},
                    {"base_severe", {0.25, 0.45, 0.3}},
                    {"base_nonsevere", {0.85, 0.12, 0.03}}}
                       .dump(2) +
                   "\n");
    write_text(models / "convex.rules", convex_rules_text());
    write_text(models / "convex.json",
               json{{"rules", "convex.rules"},
                    {"prior", {0.8, 0.15, 0.05}},
                    {"drag_k", 1e-5},
                    {"dz", 10.0},
                    {"eval_time_min", 1140.0},
                    {"mixing",
                     {{"start_min", 600.0},
                      {"end_min", 1140.0},
                      {"target_temp_c", 28.0},
                      {"target_dewpoint_c", 12.0}}}}
                       .dump(2) +
                   "\n");
    write_text(models / "willard.hierarchy", willard_hierarchy_text());
    write_text(models / "willard.json",
               json{{"hierarchy", "willard.hierarchy"},
                    {"class_triples",
                     {{"0", {0.85, 0.12, 0.03}},
                      {"1", {0.45, 0.4, 0.15}},
                      {"2", {0.2, 0.35, 0.45}}}}}
                       .dump(2) +
                   "\n");
    write_text(models / "gopad.json",
               json{{"library", "gopad_library.csv"}, {"blend_model", 0.9},
                    {"prior", {0.7, 0.2, 0.1}}, {"frozen", false}}
                       .dump(2) +
                   "\n");
    write_text(models / "gopad_static.json",
               json{{"library", "gopad_library.csv"}, {"blend_model", 0.9},
                    {"prior", {0.7, 0.2, 0.1}}, {"frozen", true}}
                       .dump(2) +
                   "\n");

    // Base rates for the scoreboard reference and the climatology system;
    // Overall event rate assumes independent zones.
    json base_rates;
    double none = 1;
    for (int z = 0; z < 4; ++z) {
        base_rates[zone_name(sub_zones()[z])] = opt.base_rates[z];
        none *= 1.0 - opt.base_rates[z];
    }
    base_rates["Overall"] = 1.0 - none;
    write_text(models / "climatology.json",
               json{{"base_rates", base_rates}, {"severe_share", opt.severe_share}}.dump(2) +
                   "\n");

    json systems = json::array(
        {registration("alps", "linear", "models/alps.json", false),
         registration("oci", "linear", "models/oci.json", false),
         registration("swap", "rule_backward", "models/swap.json", true),
         registration("kasspr", "staged_pipeline", "models/kasspr.json", false),
         registration("gopad", "analog", "models/gopad.json", true),
         registration("willard", "induction", "models/willard.json", false),
         registration("convex", "parcel", "models/convex.json", false)});

    json config{{"scenarios", "scenarios"},
                {"observations", "obs.csv"},
                {"out", "out"},
                {"base_rates", base_rates},
                {"window", {1140, 1560}},
                {"forecasters", systems}};
    write_text(fs::path(opt.out_dir) / "config.json", config.dump(2) + "\n");

    json full_systems = systems;
    full_systems.push_back(registration("climatology", "climatology", "models/climatology.json",
                                        false));
    full_systems.push_back(registration("noise", "linear", "models/noise.json", false,
                                        {"Z1", "Z2", "Z3", "Z4"}));
    json full = config;
    full["forecasters"] = full_systems;
    full["out"] = "out_full";
    write_text(fs::path(opt.out_dir) / "config_full.json", full.dump(2) + "\n");
}

}  // namespace shootout
