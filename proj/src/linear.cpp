#include "shootout/linear.hpp"

#include <algorithm>
#include <cmath>

namespace shootout {

double CalibrationCurve::operator()(double s) const {
    if (knots.empty()) throw Error("calibration curve has no knots");
    if (s <= knots.front().first) return knots.front().second;
    if (s >= knots.back().first) return knots.back().second;
    for (size_t i = 1; i < knots.size(); ++i) {
        if (s <= knots[i].first) {
            auto [x0, y0] = knots[i - 1];
            auto [x1, y1] = knots[i];
            return y0 + (y1 - y0) * (s - x0) / (x1 - x0);
        }
    }
    return knots.back().second;
}

CalibrationCurve make_calibration(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw Error("calibration curve needs at least one knot");
    for (size_t i = 0; i < knots.size(); ++i) {
        if (knots[i].second < 0 || knots[i].second > 1)
            throw Error("calibration value outside [0,1]");
        if (i > 0 && knots[i].first <= knots[i - 1].first)
            throw Error("calibration knot scores must be strictly increasing");
        if (i > 0 && knots[i].second < knots[i - 1].second)
            throw Error("calibration values must be non-decreasing");
    }
    return CalibrationCurve{std::move(knots)};
}

void validate_linear_spec(const LinearModelSpec& spec) {
    if (spec.variables.size() != spec.weights.size() ||
        spec.variables.size() != spec.scaling.size())
        throw Error("linear spec: variables, weights, and scaling must have equal lengths");
    for (auto& [lo, hi] : spec.scaling)
        if (!(lo < hi)) throw Error("linear spec: scaling min must be below max");
    for (const Inhibition& inh : spec.inhibitions)
        if (inh.factor < 0 || inh.factor > 1)
            throw Error("linear spec: inhibition factor outside [0,1]");
    if (spec.calibration.knots.empty() || spec.severe_share.knots.empty())
        throw Error("linear spec: calibration curves required");
}

double linear_score(const LinearModelSpec& spec, const FeatureMap& features) {
    std::string missing;
    for (const std::string& v : spec.variables)
        if (!features.count(v)) missing += missing.empty() ? v : ", " + v;
    if (!missing.empty()) throw MissingVariable("missing variables: " + missing);

    double score = 0;
    for (size_t i = 0; i < spec.variables.size(); ++i) {
        auto [lo, hi] = spec.scaling[i];
        double x = (features.at(spec.variables[i]) - lo) / (hi - lo);
        score += spec.weights[i] * std::clamp(x, 0.0, 1.0);
    }
    return score;
}

double apply_inhibitions(const LinearModelSpec& spec, const FeatureMap& features, double score) {
    for (const Inhibition& inh : spec.inhibitions)
        if (eval_predicate(inh.when, features) == TriState::True) score *= inh.factor;
    return score;
}

ProbTriple calibrated_forecast(const LinearModelSpec& spec, const FeatureMap& features) {
    double s = apply_inhibitions(spec, features, linear_score(spec, features));
    double p_event = spec.calibration(s);
    double severe = spec.severe_share(s);
    double p2 = p_event * severe;
    double p1 = p_event - p2;  // keeps p1 + p2 == p_event exactly
    return make_prob_triple(1.0 - p_event, p1, p2);
}

}  // namespace shootout
