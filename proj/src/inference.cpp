#include "shootout/inference.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace shootout {

ConfidenceState confidence_from_rules(const RuleSet& rules, const ConfidenceState& defaults) {
    ConfidenceState s = defaults;
    for (const Rule& r : rules.rules)
        if (r.confidence) s.weights[r.id] = *r.confidence;
    return s;
}

std::pair<ProbTriple, Trace> backward_chain(const RuleSet& rules, const FeatureMap& features,
                                            const ConfidenceState& state,
                                            const ProbTriple& prior) {
    Trace trace;
    std::array<double, 3> score{0, 0, 0};
    for (const Rule& r : rules.rules) {
        if (r.stage != Stage::Hypothesis)
            throw Error("backward_chain: rule '" + r.id + "' is not a HYPOTHESIS rule");
        bool fired = eval_predicate(r.when, features) == TriState::True;
        double w = fired ? state.weight_of(r.id) : 0.0;
        if (fired) score[category_code(*r.hypothesis)] += w;
        trace.entries.push_back({r.id, r.stage, fired, w, r.hypothesis});
    }
    double total = score[0] + score[1] + score[2];
    ProbTriple out = total > 0 ? normalize_triple(score[0], score[1], score[2]) : prior;
    trace.final_triple = out;
    return {out, trace};
}

ConfidenceState update_confidence(const ConfidenceState& state, const Trace& trace,
                                  Category observed) {
    ConfidenceState next = state;
    double penalty = state.eta_penalty.value_or(state.eta);
    for (const TraceEntry& e : trace.entries) {
        if (!e.fired || e.stage != Stage::Hypothesis || !e.hypothesis) continue;
        double w = state.weight_of(e.rule_id);
        w += (*e.hypothesis == observed) ? state.eta : -penalty;
        next.weights[e.rule_id] = std::clamp(w, state.w_min, state.w_max);
    }
    next.history_len = state.history_len + 1;
    return next;
}

PipelineSpec make_pipeline_spec(const RuleSet& rules, double required_fraction,
                                ProbTriple base_severe, ProbTriple base_nonsevere) {
    if (required_fraction <= 0 || required_fraction > 1)
        throw Error("required_fraction must be in (0,1]");
    PipelineSpec spec;
    spec.required_fraction = required_fraction;
    spec.base_triple_severe = base_severe;
    spec.base_triple_nonsevere = base_nonsevere;
    for (const Rule& r : rules.rules) {
        switch (r.stage) {
            case Stage::Necessary: spec.necessary.push_back(r); break;
            case Stage::Sufficient: spec.sufficient.push_back(r); break;
            case Stage::Modifier: spec.modifiers.push_back(r); break;
            case Stage::Hypothesis:
                throw Error("pipeline spec cannot contain HYPOTHESIS rule '" + r.id + "'");
        }
    }
    return spec;
}

PipelineResult staged_pipeline(const PipelineSpec& spec, const FeatureMap& features) {
    PipelineResult res;
    Trace& trace = res.trace;

    bool necessary_ok = true;
    for (const Rule& r : spec.necessary) {
        bool ok = eval_predicate(r.when, features) == TriState::True;
        trace.entries.push_back({r.id, Stage::Necessary, ok, 0, {}});
        if (!ok) necessary_ok = false;
    }

    int sufficient_true = 0;
    for (const Rule& r : spec.sufficient) {
        bool ok = eval_predicate(r.when, features) == TriState::True;
        trace.entries.push_back({r.id, Stage::Sufficient, ok, 0, {}});
        if (ok) ++sufficient_true;
    }
    double fraction =
        spec.sufficient.empty() ? 1.0 : double(sufficient_true) / double(spec.sufficient.size());

    if (!necessary_ok || fraction < spec.required_fraction) {
        res.label = PipelineLabel::NotSevere;
        res.triple = spec.base_triple_nonsevere;
        trace.final_triple = res.triple;
        return res;
    }

    res.label = PipelineLabel::Severe;
    // Collect fired factors per category and multiply in sorted order so any
    // permutation of the modifier list produces a bit-identical product.
    std::array<std::vector<double>, 3> factors;
    for (const Rule& r : spec.modifiers) {
        bool fired = eval_predicate(r.when, features) == TriState::True;
        trace.entries.push_back({r.id, Stage::Modifier, fired, 0, {}});
        if (!fired) continue;
        for (auto& [cat, f] : r.scale) factors[category_code(cat)].push_back(f);
    }
    std::array<double, 3> raw{spec.base_triple_severe.p0, spec.base_triple_severe.p1,
                              spec.base_triple_severe.p2};
    for (int c = 0; c < 3; ++c) {
        std::sort(factors[c].begin(), factors[c].end());
        for (double f : factors[c]) raw[c] *= f;
    }
    res.triple = normalize_triple(raw[0], raw[1], raw[2]);
    trace.final_triple = res.triple;
    return res;
}

std::string explain(const Trace& trace) {
    if (trace.entries.empty()) return "";
    std::string out;
    std::array<double, 3> totals{0, 0, 0};
    for (const TraceEntry& e : trace.entries) {
        out += stage_name(e.stage) + " " + e.rule_id + ": " + (e.fired ? "fired" : "not fired");
        if (e.fired && e.hypothesis) {
            out += " (category " + std::to_string(category_code(*e.hypothesis)) + ", weight " +
                   format_double(e.contribution) + ")";
            totals[category_code(*e.hypothesis)] += e.contribution;
        }
        if (e.stage == Stage::Necessary && !e.fired) out += "  <- blocks severe classification";
        out += '\n';
    }
    if (totals[0] + totals[1] + totals[2] > 0) {
        out += "histogram:\n";
        for (int c = 0; c < 3; ++c)
            out += "  category " + std::to_string(c) + " " + format_double(totals[c]) + "\n";
    }
    out += "forecast: " + format_double(trace.final_triple.p0) + " " +
           format_double(trace.final_triple.p1) + " " + format_double(trace.final_triple.p2) + "\n";
    return out;
}

}  // namespace shootout
