#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shootout/ruledsl.hpp"

namespace shootout {

struct MissingWeight : Error {
    using Error::Error;
};

// Per-rule confidence weights with online reward/penalty updates.
struct ConfidenceState {
    std::map<std::string, double> weights;
    double eta = 0.05;
    double w_min = 0.01;
    double w_max = 1.0;
    std::optional<double> w_init = 0.5;        // fallback for unseen rule ids
    std::optional<double> eta_penalty;         // defaults to eta when unset
    long history_len = 0;

    double weight_of(const std::string& rule_id) const {
        auto it = weights.find(rule_id);
        if (it != weights.end()) return it->second;
        if (w_init) return *w_init;
        throw MissingWeight("no weight for rule '" + rule_id + "' and no initial value configured");
    }
};

// Builds a state whose weights come from the rules' CONFIDENCE values.
ConfidenceState confidence_from_rules(const RuleSet& rules, const ConfidenceState& defaults = {});

struct TraceEntry {
    std::string rule_id;
    Stage stage = Stage::Hypothesis;
    bool fired = false;
    double contribution = 0;
    std::optional<Category> hypothesis;
};

struct Trace {
    std::vector<TraceEntry> entries;
    ProbTriple final_triple;
};

// Hypothesis scoring: each category's score is the summed weight of its fired
// rules; scores normalize to a triple, or the prior is returned when nothing
// fires.
std::pair<ProbTriple, Trace> backward_chain(const RuleSet& rules, const FeatureMap& features,
                                            const ConfidenceState& state, const ProbTriple& prior);

// Reward fired rules whose hypothesis matched the observed category, penalize
// fired rules that missed; weights clamp to [w_min, w_max]. Returns a new
// state; the input state is untouched.
ConfidenceState update_confidence(const ConfidenceState& state, const Trace& trace,
                                  Category observed);

struct PipelineSpec {
    std::vector<Rule> necessary;
    std::vector<Rule> sufficient;
    double required_fraction = 0.5;  // of sufficient rules that must hold
    std::vector<Rule> modifiers;
    ProbTriple base_triple_severe{0.2, 0.3, 0.5};
    ProbTriple base_triple_nonsevere{0.85, 0.12, 0.03};
};

// Splits a mixed RuleSet into pipeline stages; HYPOTHESIS rules are rejected.
PipelineSpec make_pipeline_spec(const RuleSet& rules, double required_fraction,
                                ProbTriple base_severe, ProbTriple base_nonsevere);

enum class PipelineLabel { Severe, NotSevere };

struct PipelineResult {
    ProbTriple triple;
    PipelineLabel label = PipelineLabel::NotSevere;
    Trace trace;
};

// Necessary conditions must all hold, then a sufficient fraction, then fired
// modifiers rescale the base triple per category (order-independent) and the
// result is renormalized once. Unknown predicate results count as not-true.
PipelineResult staged_pipeline(const PipelineSpec& spec, const FeatureMap& features);

// Human-readable firing report with per-hypothesis weight totals.
std::string explain(const Trace& trace);

}  // namespace shootout
