#include "shootout/parcel.hpp"

#include <algorithm>
#include <cmath>

namespace shootout {

std::pair<double, double> mix_boundary_layer(double morning_temp_c, double morning_dewpoint_c,
                                             const MixingSpec& spec, double t_min) {
    if (!(spec.start_min < spec.end_min)) throw Error("mixing spec: start must precede end");
    double a;
    if (t_min <= spec.start_min)
        a = 0;
    else if (t_min >= spec.end_min)
        a = 1;
    else
        a = (t_min - spec.start_min) / (spec.end_min - spec.start_min);
    return {morning_temp_c + a * (spec.target_temp_c - morning_temp_c),
            morning_dewpoint_c + a * (spec.target_dewpoint_c - morning_dewpoint_c)};
}

namespace {

double env_temp_at(const std::vector<SoundingLevel>& s, double z) {
    if (z <= s.front().height_m) return s.front().temp_c;
    for (size_t i = 1; i < s.size(); ++i) {
        if (z <= s[i].height_m) {
            double a = (z - s[i - 1].height_m) / (s[i].height_m - s[i - 1].height_m);
            return s[i - 1].temp_c + a * (s[i].temp_c - s[i - 1].temp_c);
        }
    }
    return s.back().temp_c;
}

}  // namespace

BuoyancyProfile parcel_profile(const std::vector<SoundingLevel>& sounding, double surface_temp_c,
                               double surface_dewpoint_c, double dz) {
    if (sounding.size() < 2) throw InvalidSounding("sounding needs at least 2 levels");
    if (dz <= 0) throw Error("dz must be positive");
    for (size_t i = 1; i < sounding.size(); ++i)
        if (!(sounding[i].height_m > sounding[i - 1].height_m))
            throw InvalidSounding("sounding heights must be strictly increasing");

    double lcl = kLclMetersPerDegree * std::max(0.0, surface_temp_c - surface_dewpoint_c);
    double temp_at_lcl = surface_temp_c - kDryLapseCPerKm * lcl / 1000.0;
    double top = sounding.back().height_m;

    BuoyancyProfile out;
    for (double z = 0; z <= top + 1e-9; z += dz) {
        double parcel_t = z <= lcl ? surface_temp_c - kDryLapseCPerKm * z / 1000.0
                                   : temp_at_lcl - kMoistLapseCPerKm * (z - lcl) / 1000.0;
        double env_t = env_temp_at(sounding, z);
        out.heights.push_back(z);
        out.buoyancy.push_back(kGravity * (parcel_t - env_t) / (env_t + 273.15));
    }
    return out;
}

namespace {

double buoyancy_at(const BuoyancyProfile& p, double z) {
    if (z <= p.heights.front()) return p.buoyancy.front();
    if (z >= p.heights.back()) return p.buoyancy.back();
    // uniform grid
    double step = p.heights[1] - p.heights[0];
    size_t i = std::min(p.heights.size() - 2, static_cast<size_t>(z / step));
    while (p.heights[i + 1] < z) ++i;
    while (p.heights[i] > z && i > 0) --i;
    double a = (z - p.heights[i]) / (p.heights[i + 1] - p.heights[i]);
    return p.buoyancy[i] + a * (p.buoyancy[i + 1] - p.buoyancy[i]);
}

}  // namespace

UpdraftResult integrate_updraft(const BuoyancyProfile& profile, double drag_k, double dz) {
    if (dz <= 0) throw Error("dz must be positive");
    if (drag_k < 0) throw Error("drag coefficient must be non-negative");
    if (profile.heights.empty()) throw Error("empty buoyancy profile");

    UpdraftResult res;
    double top = profile.heights.back();
    double u = 0;  // w^2
    double z = 0;
    res.heights.push_back(z);
    res.w.push_back(0);
    while (z + dz <= top + 1e-9) {
        u += dz * (2.0 * buoyancy_at(profile, z) - 2.0 * drag_k * u);
        z += dz;
        if (u <= 0) {
            res.heights.push_back(z);
            res.w.push_back(0);
            if (res.w_max > 0) break;  // updraft terminated
            u = 0;                     // still waiting for positive buoyancy
            continue;
        }
        double w = std::sqrt(u);
        res.heights.push_back(z);
        res.w.push_back(w);
        res.w_max = std::max(res.w_max, w);
    }
    return res;
}

FeatureMap convective_indices(const BuoyancyProfile& profile, const UpdraftResult& updraft) {
    FeatureMap out;

    double pos = 0;
    for (size_t i = 1; i < profile.heights.size(); ++i) {
        double b0 = std::max(profile.buoyancy[i - 1], 0.0);
        double b1 = std::max(profile.buoyancy[i], 0.0);
        pos += 0.5 * (b0 + b1) * (profile.heights[i] - profile.heights[i - 1]);
    }
    out["positive_buoyancy"] = pos;
    out["w_max"] = updraft.w_max;

    double cap = 0;
    for (size_t i = 0; i < profile.buoyancy.size(); ++i) {
        if (profile.buoyancy[i] > 0) break;
        cap = std::max(cap, -profile.buoyancy[i]);
    }
    out["cap_strength"] = cap;

    double eq = 0;
    bool rising = false;
    for (size_t i = 0; i < updraft.w.size(); ++i) {
        if (updraft.w[i] > 0) rising = true;
        if (rising && updraft.w[i] == 0) {
            eq = updraft.heights[i];
            break;
        }
    }
    if (rising && eq == 0) eq = updraft.heights.back();  // still rising at profile top
    out["equilibrium_height"] = eq;
    return out;
}

}  // namespace shootout
