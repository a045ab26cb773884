#include "shootout/ruledsl.hpp"

#include <cctype>
#include <cmath>

namespace shootout {

PredicatePtr Predicate::cmp(std::string feature, CmpOp op, double value) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Cmp;
    p->feature = std::move(feature);
    p->op = op;
    p->value = value;
    return p;
}

PredicatePtr Predicate::interval(std::string feature, double lo, double hi) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Interval;
    p->feature = std::move(feature);
    p->lo = lo;
    p->hi = hi;
    return p;
}

PredicatePtr Predicate::conj(PredicatePtr a, PredicatePtr b) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::And;
    p->left = std::move(a);
    p->right = std::move(b);
    return p;
}

PredicatePtr Predicate::disj(PredicatePtr a, PredicatePtr b) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Or;
    p->left = std::move(a);
    p->right = std::move(b);
    return p;
}

PredicatePtr Predicate::negate(PredicatePtr a) {
    auto p = std::make_shared<Predicate>();
    p->kind = Kind::Not;
    p->child = std::move(a);
    return p;
}

bool predicates_equal(const Predicate& a, const Predicate& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Predicate::Kind::Cmp:
            return a.feature == b.feature && a.op == b.op && a.value == b.value;
        case Predicate::Kind::Interval:
            return a.feature == b.feature && a.lo == b.lo && a.hi == b.hi;
        case Predicate::Kind::And:
        case Predicate::Kind::Or:
            return predicates_equal(*a.left, *b.left) && predicates_equal(*a.right, *b.right);
        case Predicate::Kind::Not:
            return predicates_equal(*a.child, *b.child);
    }
    return false;
}

TriState eval_predicate(const Predicate& p, const FeatureMap& features) {
    switch (p.kind) {
        case Predicate::Kind::Cmp: {
            auto it = features.find(p.feature);
            if (it == features.end()) return TriState::Unknown;
            double x = it->second;
            bool r = false;
            switch (p.op) {
                case CmpOp::Lt: r = x < p.value; break;
                case CmpOp::Le: r = x <= p.value; break;
                case CmpOp::Gt: r = x > p.value; break;
                case CmpOp::Ge: r = x >= p.value; break;
                case CmpOp::Eq: r = x == p.value; break;
            }
            return r ? TriState::True : TriState::False;
        }
        case Predicate::Kind::Interval: {
            auto it = features.find(p.feature);
            if (it == features.end()) return TriState::Unknown;
            return (it->second >= p.lo && it->second <= p.hi) ? TriState::True : TriState::False;
        }
        case Predicate::Kind::And:
            return tri_and(eval_predicate(*p.left, features), eval_predicate(*p.right, features));
        case Predicate::Kind::Or:
            return tri_or(eval_predicate(*p.left, features), eval_predicate(*p.right, features));
        case Predicate::Kind::Not:
            return tri_not(eval_predicate(*p.child, features));
    }
    return TriState::Unknown;
}

void collect_features(const Predicate& p, std::set<std::string>& out) {
    switch (p.kind) {
        case Predicate::Kind::Cmp:
        case Predicate::Kind::Interval: out.insert(p.feature); break;
        case Predicate::Kind::And:
        case Predicate::Kind::Or:
            collect_features(*p.left, out);
            collect_features(*p.right, out);
            break;
        case Predicate::Kind::Not: collect_features(*p.child, out); break;
    }
}

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::Hypothesis: return "HYPOTHESIS";
        case Stage::Necessary: return "NECESSARY";
        case Stage::Sufficient: return "SUFFICIENT";
        case Stage::Modifier: return "MODIFIER";
    }
    throw Error("bad stage");
}

bool rules_equal(const Rule& a, const Rule& b) {
    return a.id == b.id && a.stage == b.stage && a.hypothesis == b.hypothesis &&
           a.confidence == b.confidence && a.scale == b.scale &&
           predicates_equal(*a.when, *b.when);
}

bool rulesets_equal(const RuleSet& a, const RuleSet& b) {
    if (a.rules.size() != b.rules.size()) return false;
    for (size_t i = 0; i < a.rules.size(); ++i)
        if (!rules_equal(a.rules[i], b.rules[i])) return false;
    return true;
}

namespace {

enum class Tok { Keyword, Ident, Number, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0;
    int line = 1, column = 1;
};

const std::set<std::string>& keywords() {
    static const std::set<std::string> kw = {"HYPOTHESIS", "NECESSARY", "SUFFICIENT", "MODIFIER",
                                             "FOR",        "WHEN",      "CONFIDENCE", "SCALE",
                                             "BY",         "AND",       "OR",         "NOT",
                                             "IN"};
    return kw;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws();
        tok_ = Token{};
        tok_.line = line_;
        tok_.column = col_;
        if (pos_ >= text_.size()) {
            tok_.kind = Tok::End;
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                take();
            tok_.text = std::string(text_.substr(start, pos_ - start));
            tok_.kind = keywords().count(tok_.text) ? Tok::Keyword : Tok::Ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
            size_t start = pos_;
            if (c == '-') take();
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                    text_[pos_] == 'e' || text_[pos_] == 'E' ||
                    ((text_[pos_] == '+' || text_[pos_] == '-') &&
                     (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
                take();
            tok_.text = std::string(text_.substr(start, pos_ - start));
            try {
                tok_.number = parse_double(tok_.text);
            } catch (const Error&) {
                throw SyntaxError(tok_.line, tok_.column, "malformed number '" + tok_.text + "'");
            }
            tok_.kind = Tok::Number;
            return;
        }
        // multi-char operators first
        for (std::string_view sym : {"<=", ">=", "<", ">", "=", "(", ")", "[", "]", ","}) {
            if (text_.substr(pos_, sym.size()) == sym) {
                tok_.kind = Tok::Symbol;
                tok_.text = std::string(sym);
                for (size_t i = 0; i < sym.size(); ++i) take();
                return;
            }
        }
        throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') take();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                take();
            } else {
                break;
            }
        }
    }

    void take() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view text, const std::set<std::string>* registry)
        : lex_(text), registry_(registry) {}

    PredicatePtr parse_bare_predicate() {
        PredicatePtr p = parse_or();
        Token t = lex_.next();
        if (t.kind != Tok::End) fail(t, "end of predicate");
        return p;
    }

    RuleSet parse() {
        RuleSet rs;
        std::set<std::string> ids;
        while (lex_.peek().kind != Tok::End) {
            Rule r = parse_rule();
            if (!ids.insert(r.id).second) throw DuplicateRuleId("duplicate rule id '" + r.id + "'");
            rs.rules.push_back(std::move(r));
        }
        return rs;
    }

private:
    [[noreturn]] void fail(const Token& t, const std::string& expected) {
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw SyntaxError(t.line, t.column, "expected " + expected + ", got " + got);
    }

    Token expect_keyword(const std::string& kw) {
        Token t = lex_.next();
        if (t.kind != Tok::Keyword || t.text != kw) fail(t, kw);
        return t;
    }

    Token expect_symbol(const std::string& sym) {
        Token t = lex_.next();
        if (t.kind != Tok::Symbol || t.text != sym) fail(t, "'" + sym + "'");
        return t;
    }

    std::string expect_ident(const std::string& what) {
        Token t = lex_.next();
        if (t.kind != Tok::Ident) fail(t, what);
        return t.text;
    }

    double expect_number(const std::string& what) {
        Token t = lex_.next();
        if (t.kind != Tok::Number) fail(t, what);
        return t.number;
    }

    Category expect_category() {
        Token t = lex_.next();
        if (t.kind != Tok::Number) fail(t, "category (0, 1, or 2)");
        if (t.number != 0 && t.number != 1 && t.number != 2)
            throw SyntaxError(t.line, t.column,
                              "category out of range: " + t.text + " (must be 0, 1, or 2)");
        return static_cast<Category>(static_cast<int>(t.number));
    }

    Rule parse_rule() {
        Token head = lex_.next();
        if (head.kind != Tok::Keyword) fail(head, "HYPOTHESIS, NECESSARY, SUFFICIENT, or MODIFIER");
        Rule r;
        if (head.text == "HYPOTHESIS") {
            r.stage = Stage::Hypothesis;
            r.id = expect_ident("rule id");
            expect_keyword("FOR");
            r.hypothesis = expect_category();
            expect_keyword("WHEN");
            r.when = parse_or();
            Token t = expect_keyword("CONFIDENCE");
            double conf = expect_number("confidence value");
            if (conf <= 0 || conf > 1)
                throw SyntaxError(t.line, t.column, "confidence must be in (0,1]");
            r.confidence = conf;
        } else if (head.text == "NECESSARY" || head.text == "SUFFICIENT") {
            r.stage = head.text == "NECESSARY" ? Stage::Necessary : Stage::Sufficient;
            r.id = expect_ident("rule id");
            expect_keyword("WHEN");
            r.when = parse_or();
        } else if (head.text == "MODIFIER") {
            r.stage = Stage::Modifier;
            r.id = expect_ident("rule id");
            expect_keyword("WHEN");
            r.when = parse_or();
            expect_keyword("SCALE");
            while (true) {
                Category c = expect_category();
                Token by = expect_keyword("BY");
                double f = expect_number("scale factor");
                if (f <= 0) throw SyntaxError(by.line, by.column, "scale factor must be positive");
                if (!r.scale.emplace(c, f).second)
                    throw SyntaxError(by.line, by.column, "duplicate scale category");
                if (lex_.peek().kind == Tok::Symbol && lex_.peek().text == ",")
                    lex_.next();
                else
                    break;
            }
        } else {
            fail(head, "HYPOTHESIS, NECESSARY, SUFFICIENT, or MODIFIER");
        }
        return r;
    }

    PredicatePtr parse_or() {
        PredicatePtr p = parse_and();
        while (lex_.peek().kind == Tok::Keyword && lex_.peek().text == "OR") {
            lex_.next();
            p = Predicate::disj(p, parse_and());
        }
        return p;
    }

    PredicatePtr parse_and() {
        PredicatePtr p = parse_unary();
        while (lex_.peek().kind == Tok::Keyword && lex_.peek().text == "AND") {
            lex_.next();
            p = Predicate::conj(p, parse_unary());
        }
        return p;
    }

    PredicatePtr parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Keyword && t.text == "NOT") {
            lex_.next();
            return Predicate::negate(parse_unary());
        }
        if (t.kind == Tok::Symbol && t.text == "(") {
            lex_.next();
            PredicatePtr p = parse_or();
            expect_symbol(")");
            return p;
        }
        return parse_atom();
    }

    PredicatePtr parse_atom() {
        Token ft = lex_.next();
        if (ft.kind != Tok::Ident) fail(ft, "feature name");
        if (registry_ && !registry_->count(ft.text))
            throw UnknownFeature("unknown feature '" + ft.text + "' at " +
                                 std::to_string(ft.line) + ":" + std::to_string(ft.column));
        Token op = lex_.next();
        if (op.kind == Tok::Keyword && op.text == "IN") {
            Token lb = expect_symbol("[");
            double lo = expect_number("interval low bound");
            expect_symbol(",");
            double hi = expect_number("interval high bound");
            expect_symbol("]");
            if (lo > hi) throw SyntaxError(lb.line, lb.column, "interval low bound exceeds high");
            return Predicate::interval(ft.text, lo, hi);
        }
        if (op.kind == Tok::Symbol) {
            CmpOp c;
            if (op.text == "<")
                c = CmpOp::Lt;
            else if (op.text == "<=")
                c = CmpOp::Le;
            else if (op.text == ">")
                c = CmpOp::Gt;
            else if (op.text == ">=")
                c = CmpOp::Ge;
            else if (op.text == "=")
                c = CmpOp::Eq;
            else
                fail(op, "comparison operator or IN");
            return Predicate::cmp(ft.text, c, expect_number("comparison value"));
        }
        fail(op, "comparison operator or IN");
    }

    Lexer lex_;
    const std::set<std::string>* registry_;
};

std::string op_text(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Eq: return "=";
    }
    return "?";
}

// Non-atom subexpressions always get parentheses, so the canonical form
// re-parses to the identical tree regardless of associativity.
std::string render_operand(const Predicate& p) {
    if (p.kind == Predicate::Kind::Cmp || p.kind == Predicate::Kind::Interval)
        return render_predicate(p);
    return "(" + render_predicate(p) + ")";
}

}  // namespace

std::string render_predicate(const Predicate& p) {
    switch (p.kind) {
        case Predicate::Kind::Cmp:
            return p.feature + " " + op_text(p.op) + " " + format_double(p.value);
        case Predicate::Kind::Interval:
            return p.feature + " IN [" + format_double(p.lo) + ", " + format_double(p.hi) + "]";
        case Predicate::Kind::And:
            return render_operand(*p.left) + " AND " + render_operand(*p.right);
        case Predicate::Kind::Or:
            return render_operand(*p.left) + " OR " + render_operand(*p.right);
        case Predicate::Kind::Not: return "NOT " + render_operand(*p.child);
    }
    return "";
}

std::string render_rules(const RuleSet& rules) {
    std::string out;
    for (const Rule& r : rules.rules) {
        out += stage_name(r.stage);
        out += ' ';
        out += r.id;
        if (r.stage == Stage::Hypothesis)
            out += " FOR " + std::to_string(category_code(*r.hypothesis));
        out += " WHEN " + render_predicate(*r.when);
        if (r.stage == Stage::Hypothesis) out += " CONFIDENCE " + format_double(*r.confidence);
        if (r.stage == Stage::Modifier) {
            out += " SCALE ";
            bool first = true;
            for (auto& [cat, f] : r.scale) {
                if (!first) out += ", ";
                first = false;
                out += std::to_string(category_code(cat)) + " BY " + format_double(f);
            }
        }
        out += '\n';
    }
    return out;
}

RuleSet parse_rules(std::string_view text) {
    Parser p(text, nullptr);
    RuleSet rs = p.parse();
    rs.source_hash = fnv1a_hex(text);
    return rs;
}

PredicatePtr parse_predicate(std::string_view text) {
    Parser p(text, nullptr);
    return p.parse_bare_predicate();
}

RuleSet parse_rules(std::string_view text, const std::set<std::string>& feature_registry) {
    Parser p(text, &feature_registry);
    RuleSet rs = p.parse();
    rs.source_hash = fnv1a_hex(text);
    return rs;
}

}  // namespace shootout
