#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "shootout/domain.hpp"

namespace shootout {

// Three-valued logic for predicates over possibly incomplete feature maps.
enum class TriState { False = 0, Unknown = 1, True = 2 };

inline TriState tri_not(TriState a) {
    return a == TriState::True ? TriState::False
                               : (a == TriState::False ? TriState::True : TriState::Unknown);
}
inline TriState tri_and(TriState a, TriState b) { return a < b ? a : b; }
inline TriState tri_or(TriState a, TriState b) { return a > b ? a : b; }

enum class CmpOp { Lt, Le, Gt, Ge, Eq };

struct Predicate;
using PredicatePtr = std::shared_ptr<const Predicate>;

// Expression tree: comparisons and closed intervals over named features,
// combined with AND / OR / NOT.
struct Predicate {
    enum class Kind { Cmp, Interval, And, Or, Not };
    Kind kind = Kind::Cmp;

    // Cmp / Interval
    std::string feature;
    CmpOp op = CmpOp::Lt;
    double value = 0;
    double lo = 0, hi = 0;

    // And / Or / Not
    PredicatePtr left, right, child;

    static PredicatePtr cmp(std::string feature, CmpOp op, double value);
    static PredicatePtr interval(std::string feature, double lo, double hi);
    static PredicatePtr conj(PredicatePtr a, PredicatePtr b);
    static PredicatePtr disj(PredicatePtr a, PredicatePtr b);
    static PredicatePtr negate(PredicatePtr a);
};

bool predicates_equal(const Predicate& a, const Predicate& b);

TriState eval_predicate(const Predicate& p, const FeatureMap& features);
inline TriState eval_predicate(const PredicatePtr& p, const FeatureMap& features) {
    return eval_predicate(*p, features);
}

void collect_features(const Predicate& p, std::set<std::string>& out);

enum class Stage { Hypothesis, Necessary, Sufficient, Modifier };

std::string stage_name(Stage s);

struct Rule {
    std::string id;
    Stage stage = Stage::Hypothesis;
    std::optional<Category> hypothesis;  // HYPOTHESIS rules only
    PredicatePtr when;
    std::optional<double> confidence;     // HYPOTHESIS rules only, in (0,1]
    std::map<Category, double> scale;     // MODIFIER rules only, positive factors
};

bool rules_equal(const Rule& a, const Rule& b);

struct RuleSet {
    std::vector<Rule> rules;
    std::string source_hash;  // fnv1a of the parsed source text
};

bool rulesets_equal(const RuleSet& a, const RuleSet& b);

struct SyntaxError : Error {
    int line = 0, column = 0;
    SyntaxError(int line, int column, const std::string& msg)
        : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                msg),
          line(line),
          column(column) {}
};
struct UnknownFeature : Error {
    using Error::Error;
};
struct DuplicateRuleId : Error {
    using Error::Error;
};

// Grammar (see docs/rules.ebnf):
//   HYPOTHESIS id FOR cat WHEN pred CONFIDENCE num
//   NECESSARY  id WHEN pred
//   SUFFICIENT id WHEN pred
//   MODIFIER   id WHEN pred SCALE cat BY num {, cat BY num}
// '#' starts a line comment.
RuleSet parse_rules(std::string_view text);
RuleSet parse_rules(std::string_view text, const std::set<std::string>& feature_registry);

// A bare predicate expression (used by inhibition clauses in model specs).
PredicatePtr parse_predicate(std::string_view text);

// Canonical text; parse(render(r)) is structurally equal to r.
std::string render_rules(const RuleSet& rules);
std::string render_predicate(const Predicate& p);

}  // namespace shootout
