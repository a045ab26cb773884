#include <doctest.h>

#include <random>

#include "shootout/ruledsl.hpp"

using namespace shootout;

TEST_CASE("kleene connectives") {
    using T = TriState;
    CHECK(tri_and(T::True, T::Unknown) == T::Unknown);
    CHECK(tri_and(T::False, T::Unknown) == T::False);
    CHECK(tri_or(T::True, T::Unknown) == T::True);
    CHECK(tri_or(T::False, T::Unknown) == T::Unknown);
    CHECK(tri_not(T::Unknown) == T::Unknown);
    CHECK(tri_not(T::True) == T::False);
}

TEST_CASE("predicate evaluation") {
    FeatureMap f{{"cape", 150}, {"a", 1}};
    CHECK(eval_predicate(*Predicate::interval("cape", 100, 200), f) == TriState::True);
    CHECK(eval_predicate(*Predicate::disj(Predicate::cmp("a", CmpOp::Gt, 0),
                                          Predicate::cmp("b", CmpOp::Gt, 0)),
                         f) == TriState::True);
    CHECK(eval_predicate(*Predicate::conj(Predicate::cmp("a", CmpOp::Gt, 0),
                                          Predicate::cmp("b", CmpOp::Gt, 0)),
                         f) == TriState::Unknown);
    CHECK(eval_predicate(*Predicate::cmp("cape", CmpOp::Eq, 150), f) == TriState::True);
}

TEST_CASE("interval equals conjunction of bounds") {
    std::mt19937_64 rng(7);
    auto iv = Predicate::interval("x", 2, 5);
    auto conj = Predicate::conj(Predicate::cmp("x", CmpOp::Ge, 2), Predicate::cmp("x", CmpOp::Le, 5));
    for (int i = 0; i < 200; ++i) {
        FeatureMap f;
        if (rng() % 4) f["x"] = double(rng() % 80) / 10.0;
        CHECK(eval_predicate(*iv, f) == eval_predicate(*conj, f));
    }
}

TEST_CASE("parse the grammar examples") {
    RuleSet rs = parse_rules(
        "HYPOTHESIS h1 FOR 2 WHEN cape IN [1500, 9999] CONFIDENCE 0.7\n"
        "NECESSARY n1 WHEN dewpoint >= 50 AND NOT (cap_strength > 2)\n"
        "SUFFICIENT s1 WHEN shear > 20\n"
        "# a comment line\n"
        "MODIFIER m1 WHEN upslope = 1 SCALE 2 BY 1.5, 0 BY 0.5\n");
    REQUIRE(rs.rules.size() == 4);
    CHECK(rs.rules[0].stage == Stage::Hypothesis);
    CHECK(rs.rules[0].hypothesis == Category::Severe);
    CHECK(rs.rules[0].confidence == 0.7);
    CHECK(rs.rules[1].stage == Stage::Necessary);
    CHECK(rs.rules[3].scale.at(Category::Severe) == 1.5);
    CHECK(rs.rules[3].scale.at(Category::Nonsignificant) == 0.5);
}

TEST_CASE("positioned syntax errors") {
    try {
        parse_rules("HYPOTHESIS bad FOR 5 WHEN x > 0 CONFIDENCE 0.5");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 20);
    }
    CHECK_THROWS_AS(parse_rules("HYPOTHESIS h FOR 1 WHEN x > 0 CONFIDENCE 0"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("HYPOTHESIS h FOR 1 WHEN x > 0 CONFIDENCE 1.5"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("NECESSARY n WHEN x IN [5, 2]"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("MODIFIER m WHEN x > 0 SCALE 1 BY -2"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("NECESSARY n WHEN"), SyntaxError);
    CHECK_THROWS_AS(parse_rules("FROBNICATE z WHEN x > 0"), SyntaxError);
    // second line, mid-token
    try {
        parse_rules("NECESSARY ok WHEN x > 0\nNECESSARY bad WHEN x >>> 0\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 2);
        CHECK(e.column > 0);
    }
}

TEST_CASE("duplicate rule ids rejected") {
    CHECK_THROWS_AS(parse_rules("NECESSARY n WHEN x > 0\nNECESSARY n WHEN y > 0\n"),
                    DuplicateRuleId);
}

TEST_CASE("feature registry enforcement") {
    std::set<std::string> registry{"cape", "shear"};
    CHECK_NOTHROW(parse_rules("NECESSARY n WHEN cape > 0 AND shear > 5", registry));
    CHECK_THROWS_AS(parse_rules("NECESSARY n WHEN dewpont > 50", registry), UnknownFeature);
}

TEST_CASE("render basics") {
    CHECK(render_rules(RuleSet{}) == "");
    RuleSet rs = parse_rules("HYPOTHESIS h1 FOR 2 WHEN cape IN [1500, 9999] CONFIDENCE 0.7");
    CHECK(rulesets_equal(parse_rules(render_rules(rs)), rs));
    RuleSet nested =
        parse_rules("NECESSARY n1 WHEN NOT (a > 1 OR b < 2) AND (c >= 3 OR NOT d <= 4)");
    CHECK(rulesets_equal(parse_rules(render_rules(nested)), nested));
}

TEST_CASE("bare predicate parsing") {
    auto p = parse_predicate("humidity < 30 AND shear > 25");
    CHECK(eval_predicate(*p, {{"humidity", 20}, {"shear", 30}}) == TriState::True);
    CHECK(eval_predicate(*p, {{"humidity", 40}, {"shear", 30}}) == TriState::False);
    CHECK_THROWS_AS(parse_predicate("humidity <"), SyntaxError);
}

namespace {

PredicatePtr gen_predicate(std::mt19937_64& rng, int depth) {
    static const std::vector<std::string> names{"cape", "shear", "w_max", "hum", "t"};
    auto num = [&] { return double(int(rng() % 2000) - 1000) / 8.0; };
    int pick = depth <= 0 ? int(rng() % 2) : int(rng() % 5);
    switch (pick) {
        case 0:
            return Predicate::cmp(names[rng() % names.size()],
                                  static_cast<CmpOp>(rng() % 5), num());
        case 1: {
            double a = num(), b = num();
            return Predicate::interval(names[rng() % names.size()], std::min(a, b),
                                       std::max(a, b));
        }
        case 2:
            return Predicate::conj(gen_predicate(rng, depth - 1), gen_predicate(rng, depth - 1));
        case 3:
            return Predicate::disj(gen_predicate(rng, depth - 1), gen_predicate(rng, depth - 1));
        default:
            return Predicate::negate(gen_predicate(rng, depth - 1));
    }
}

RuleSet gen_ruleset(std::mt19937_64& rng) {
    RuleSet rs;
    int n = 1 + int(rng() % 6);
    for (int i = 0; i < n; ++i) {
        Rule r;
        r.id = "r" + std::to_string(i);
        r.when = gen_predicate(rng, 3);
        switch (rng() % 4) {
            case 0:
                r.stage = Stage::Hypothesis;
                r.hypothesis = static_cast<Category>(rng() % 3);
                r.confidence = double(1 + rng() % 1000) / 1000.0;
                break;
            case 1:
                r.stage = Stage::Necessary;
                break;
            case 2:
                r.stage = Stage::Sufficient;
                break;
            default:
                r.stage = Stage::Modifier;
                r.scale[static_cast<Category>(rng() % 3)] = double(1 + rng() % 400) / 100.0;
                r.scale[static_cast<Category>(rng() % 3)] = double(1 + rng() % 400) / 100.0;
                break;
        }
        rs.rules.push_back(std::move(r));
    }
    return rs;
}

}  // namespace

TEST_CASE("round-trip property over 1000 generated rulesets") {
    std::mt19937_64 rng(20260826);
    for (int i = 0; i < 1000; ++i) {
        RuleSet rs = gen_ruleset(rng);
        std::string text = render_rules(rs);
        RuleSet back = parse_rules(text);
        REQUIRE_MESSAGE(rulesets_equal(back, rs), "iteration ", i, "\n", text);
        CHECK(render_rules(back) == text);
    }
}
