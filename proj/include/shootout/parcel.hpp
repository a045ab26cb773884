#pragma once

#include <utility>
#include <vector>

#include "shootout/domain.hpp"

namespace shootout {

struct InvalidSounding : Error {
    using Error::Error;
};

// Parcel buoyancy B = g (T_parcel - T_env) / T_env on a uniform height grid.
struct BuoyancyProfile {
    std::vector<double> heights;   // m AGL, increasing
    std::vector<double> buoyancy;  // m/s^2
};

// Linear time-dependent boundary-layer mixing from morning surface values
// toward afternoon targets over [start, end] minutes; clamped outside.
struct MixingSpec {
    double start_min = 0;
    double end_min = 1;
    double target_temp_c = 0;
    double target_dewpoint_c = 0;
};

std::pair<double, double> mix_boundary_layer(double morning_temp_c, double morning_dewpoint_c,
                                             const MixingSpec& spec, double t_min);

constexpr double kDryLapseCPerKm = 9.8;
constexpr double kMoistLapseCPerKm = 6.5;  // fixed pseudo-adiabatic approximation
constexpr double kLclMetersPerDegree = 125.0;
constexpr double kGravity = 9.80665;

// Lifts a surface parcel dry-adiabatically to its LCL, then at the fixed
// moist rate; environment temperature interpolates linearly between sounding
// levels.
BuoyancyProfile parcel_profile(const std::vector<SoundingLevel>& sounding, double surface_temp_c,
                               double surface_dewpoint_c, double dz = 10.0);

struct UpdraftResult {
    std::vector<double> heights;
    std::vector<double> w;  // m/s
    double w_max = 0;
};

// Integrates w dw/dz = B - K w^2 upward from rest, stepped in w^2 to stay
// well-behaved near w = 0; stops where w^2 drops to zero or at profile top.
UpdraftResult integrate_updraft(const BuoyancyProfile& profile, double drag_k, double dz);

// Named instability indices fed to the rule sets and linear models:
//   positive_buoyancy  (m^2/s^2, trapezoid integral of max(B,0))
//   w_max              (m/s)
//   cap_strength       (m/s^2, magnitude of the most negative B below the
//                       first positive layer)
//   equilibrium_height (m, where the updraft returns to zero)
FeatureMap convective_indices(const BuoyancyProfile& profile, const UpdraftResult& updraft);

}  // namespace shootout
