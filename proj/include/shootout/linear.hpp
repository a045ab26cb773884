#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shootout/ruledsl.hpp"

namespace shootout {

struct MissingVariable : Error {
    using Error::Error;
};

// Monotone piecewise-linear map from a score to [0,1]; clamps to the end
// values outside the knot range.
struct CalibrationCurve {
    std::vector<std::pair<double, double>> knots;  // (score, value), strictly increasing scores

    double operator()(double s) const;
};

CalibrationCurve make_calibration(std::vector<std::pair<double, double>> knots);

struct Inhibition {
    PredicatePtr when;
    double factor = 1.0;  // in [0,1]
};

// Weighted-sum judgment model: rescaled inputs, expert weights, calibrated
// output, with optional convection-inhibition heuristics.
struct LinearModelSpec {
    std::vector<std::string> variables;
    std::vector<double> weights;
    std::vector<std::pair<double, double>> scaling;  // per-variable (min, max)
    CalibrationCurve calibration;                    // score -> P(significant or severe)
    CalibrationCurve severe_share;                   // score -> P(severe | event)
    std::vector<Inhibition> inhibitions;
};

void validate_linear_spec(const LinearModelSpec& spec);

double linear_score(const LinearModelSpec& spec, const FeatureMap& features);
double apply_inhibitions(const LinearModelSpec& spec, const FeatureMap& features, double score);
ProbTriple calibrated_forecast(const LinearModelSpec& spec, const FeatureMap& features);

}  // namespace shootout
