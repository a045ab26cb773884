#include "shootout/induct.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace shootout {

std::string attr_value_text(const AttrValue& v) {
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    return std::get<std::string>(v);
}

size_t ExampleSet::attr_index(const std::string& name) const {
    for (size_t i = 0; i < attr_names.size(); ++i)
        if (attr_names[i] == name) return i;
    throw Error("unknown attribute '" + name + "'");
}

double entropy(const std::map<std::string, int>& counts) {
    int total = 0;
    for (auto& [label, n] : counts) {
        if (n < 0) throw Error("negative class count");
        total += n;
    }
    if (total == 0) throw EmptyCounts("entropy of empty count map");
    double h = 0;
    for (auto& [label, n] : counts) {
        if (n == 0) continue;
        double p = double(n) / total;
        h -= p * std::log2(p);
    }
    return h;
}

namespace {

std::map<std::string, int> label_counts(const ExampleSet& ex, const std::vector<size_t>& idx) {
    std::map<std::string, int> counts;
    for (size_t i : idx) ++counts[ex.labels[i]];
    return counts;
}

std::string majority_label(const std::map<std::string, int>& counts) {
    std::string best;
    int best_n = -1;
    for (auto& [label, n] : counts)  // map order breaks ties toward the lower label
        if (n > best_n) {
            best = label;
            best_n = n;
        }
    return best;
}

double split_gain_categorical(const ExampleSet& ex, const std::vector<size_t>& idx, size_t a,
                              double h_parent) {
    std::map<std::string, std::map<std::string, int>> by_value;
    for (size_t i : idx) ++by_value[attr_value_text(ex.rows[i][a])][ex.labels[i]];
    double h_children = 0;
    for (auto& [value, counts] : by_value) {
        int n = 0;
        for (auto& [l, c] : counts) n += c;
        h_children += double(n) / double(idx.size()) * entropy(counts);
    }
    return h_parent - h_children;
}

std::pair<double, double> split_gain_numeric(const ExampleSet& ex, const std::vector<size_t>& idx,
                                             size_t a, double h_parent) {
    std::vector<double> values;
    for (size_t i : idx) values.push_back(std::get<double>(ex.rows[i][a]));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    double best_gain = -1, best_thr = 0;
    for (size_t k = 0; k + 1 < values.size(); ++k) {
        double thr = 0.5 * (values[k] + values[k + 1]);
        std::map<std::string, int> le, gt;
        for (size_t i : idx)
            ++(std::get<double>(ex.rows[i][a]) <= thr ? le : gt)[ex.labels[i]];
        int n_le = 0;
        for (auto& [l, c] : le) n_le += c;
        double h = double(n_le) / idx.size() * entropy(le) +
                   double(idx.size() - n_le) / idx.size() * entropy(gt);
        double gain = h_parent - h;
        if (gain > best_gain) {
            best_gain = gain;
            best_thr = thr;
        }
    }
    return {best_gain, best_thr};
}

SplitChoice best_split_indexed(const ExampleSet& ex, const std::vector<size_t>& idx,
                               const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw Error("best_split: no candidate attributes");
    if (idx.empty()) throw Error("best_split: no examples");
    double h_parent = entropy(label_counts(ex, idx));

    SplitChoice best;
    best.gain = -1;
    for (const std::string& name : candidates) {
        size_t a = ex.attr_index(name);
        if (ex.numeric[a]) {
            auto [gain, thr] = split_gain_numeric(ex, idx, a, h_parent);
            if (gain > best.gain) best = {name, thr, gain};
        } else {
            double gain = split_gain_categorical(ex, idx, a, h_parent);
            if (gain > best.gain) best = {name, std::nullopt, gain};
        }
    }
    if (best.gain <= 0) throw NoInformativeSplit("no attribute yields positive information gain");
    return best;
}

TreePtr build(const ExampleSet& ex, const std::vector<size_t>& idx,
              std::vector<std::string> candidates) {
    auto counts = label_counts(ex, idx);
    auto node = std::make_shared<TreeNode>();
    node->counts = counts;
    if (counts.size() == 1 || candidates.empty()) {
        node->label = majority_label(counts);
        return node;
    }
    SplitChoice choice;
    try {
        choice = best_split_indexed(ex, idx, candidates);
    } catch (const NoInformativeSplit&) {
        node->label = majority_label(counts);
        return node;
    }
    node->leaf = false;
    node->attribute = choice.attribute;
    node->threshold = choice.threshold;
    size_t a = ex.attr_index(choice.attribute);
    if (choice.threshold) {
        std::vector<size_t> le, gt;
        for (size_t i : idx)
            (std::get<double>(ex.rows[i][a]) <= *choice.threshold ? le : gt).push_back(i);
        node->le = build(ex, le, candidates);  // numeric attributes may repeat
        node->gt = build(ex, gt, candidates);
    } else {
        std::vector<std::string> remaining;
        for (const std::string& c : candidates)
            if (c != choice.attribute) remaining.push_back(c);
        std::map<std::string, std::vector<size_t>> by_value;
        for (size_t i : idx) by_value[attr_value_text(ex.rows[i][a])].push_back(i);
        for (auto& [value, sub] : by_value) node->branches[value] = build(ex, sub, remaining);
    }
    return node;
}

}  // namespace

SplitChoice best_split(const ExampleSet& examples, const std::vector<std::string>& candidates) {
    std::vector<size_t> idx(examples.rows.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return best_split_indexed(examples, idx, candidates);
}

DecisionTree induce_tree(const ExampleSet& examples) {
    if (examples.rows.empty()) throw Error("induce_tree: empty example set");
    if (examples.rows.size() != examples.labels.size())
        throw Error("induce_tree: rows and labels length mismatch");
    std::vector<size_t> idx(examples.rows.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return DecisionTree{build(examples, idx, examples.attr_names)};
}

std::string classify_example(const DecisionTree& tree, const ExampleSet& schema,
                             const std::vector<AttrValue>& row) {
    const TreeNode* node = tree.root.get();
    while (!node->leaf) {
        size_t a = schema.attr_index(node->attribute);
        if (node->threshold) {
            node = (std::get<double>(row[a]) <= *node->threshold ? node->le : node->gt).get();
        } else {
            auto it = node->branches.find(attr_value_text(row[a]));
            if (it == node->branches.end())
                throw Error("no branch for " + node->attribute + " = " +
                            attr_value_text(row[a]));
            node = it->second.get();
        }
    }
    return node->label;
}

void validate_hierarchy(const ModuleHierarchy& h) {
    if (!h.modules.count(h.root)) throw Error("hierarchy root '" + h.root + "' not defined");
    // DFS cycle check over module-name attribute references.
    std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        int& s = state[name];
        if (s == 1) throw Error("hierarchy cycle through module '" + name + "'");
        if (s == 2) return;
        s = 1;
        std::function<void(const TreeNode*)> walk = [&](const TreeNode* n) {
            if (!n || n->leaf) return;
            if (h.modules.count(n->attribute)) visit(n->attribute);
            if (n->le) walk(n->le.get());
            if (n->gt) walk(n->gt.get());
            for (auto& [v, c] : n->branches) walk(c.get());
        };
        walk(h.modules.at(name).tree.root.get());
        s = 2;
    };
    visit(h.root);
}

namespace {

class InterviewSession {
public:
    InterviewSession(const ModuleHierarchy& h, const Oracle& oracle) : h_(h), oracle_(oracle) {}

    InterviewResult run() {
        InterviewResult r;
        r.label = eval_module(h_.root);
        r.questions_asked = int(answers_.size());
        r.trail = trail_;
        return r;
    }

private:
    AttrValue ask(const std::string& attr) {
        auto it = answers_.find(attr);
        if (it != answers_.end()) return it->second;
        auto v = oracle_(attr);
        if (!v) throw UnansweredCritical("no answer available for question '" + attr + "'");
        answers_.emplace(attr, *v);
        trail_.push_back("ask " + attr + " -> " + attr_value_text(*v));
        return *v;
    }

    std::string eval_module(const std::string& name) {
        auto cached = module_out_.find(name);
        if (cached != module_out_.end()) return cached->second;
        const HierarchyModule& m = h_.modules.at(name);
        if (m.critical) {
            AttrValue v = ask(m.critical->attribute);
            if (m.critical->unfavorable.count(attr_value_text(v))) {
                trail_.push_back("module " + name + " short-circuit -> " +
                                 m.critical->result_class);
                module_out_[name] = m.critical->result_class;
                return m.critical->result_class;
            }
        }
        const TreeNode* node = m.tree.root.get();
        while (!node->leaf) {
            AttrValue v = h_.modules.count(node->attribute)
                              ? AttrValue{eval_module(node->attribute)}
                              : ask(node->attribute);
            if (node->threshold) {
                if (!std::holds_alternative<double>(v))
                    throw UnansweredCritical("question '" + node->attribute +
                                             "' needs a numeric answer");
                node = (std::get<double>(v) <= *node->threshold ? node->le : node->gt).get();
            } else {
                auto it = node->branches.find(attr_value_text(v));
                if (it == node->branches.end())
                    throw UnansweredCritical("answer '" + attr_value_text(v) +
                                             "' has no branch under '" + node->attribute + "'");
                node = it->second.get();
            }
        }
        trail_.push_back("module " + name + " -> " + node->label);
        module_out_[name] = node->label;
        return node->label;
    }

    const ModuleHierarchy& h_;
    const Oracle& oracle_;
    std::map<std::string, AttrValue> answers_;
    std::map<std::string, std::string> module_out_;
    std::vector<std::string> trail_;
};

void serialize_node(const TreeNode* n, int depth, const std::string& prefix, std::string& out) {
    out.append(2 * depth, ' ');
    out += prefix;
    if (n->leaf) {
        out += "leaf " + n->label;
        for (auto& [label, c] : n->counts) out += " " + label + "=" + std::to_string(c);
        out += '\n';
        return;
    }
    out += "test " + n->attribute;
    if (n->threshold) {
        out += " <= " + format_double(*n->threshold) + "\n";
        serialize_node(n->le.get(), depth + 1, "le: ", out);
        serialize_node(n->gt.get(), depth + 1, "gt: ", out);
    } else {
        out += '\n';
        for (auto& [value, child] : n->branches)
            serialize_node(child.get(), depth + 1, value + ": ", out);
    }
}

struct Line {
    int indent = 0;
    std::string branch;  // empty for the root line of a tree
    std::vector<std::string> tokens;
};

std::vector<std::string> tokenize_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

Line parse_line(const std::string& raw, int lineno) {
    Line l;
    size_t i = 0;
    while (i < raw.size() && raw[i] == ' ') ++i;
    if (i % 2 != 0) throw Error("line " + std::to_string(lineno) + ": odd indent");
    l.indent = int(i / 2);
    std::string rest = raw.substr(i);
    auto colon = rest.find(": ");
    if (colon != std::string::npos && rest.compare(0, 5, "test ") != 0 &&
        rest.compare(0, 5, "leaf ") != 0) {
        l.branch = rest.substr(0, colon);
        rest = rest.substr(colon + 2);
    }
    l.tokens = tokenize_ws(rest);
    if (l.tokens.empty()) throw Error("line " + std::to_string(lineno) + ": empty node");
    return l;
}

TreePtr parse_node(const std::vector<Line>& lines, size_t& pos, int depth) {
    if (pos >= lines.size() || lines[pos].indent != depth)
        throw Error("tree text: expected node at depth " + std::to_string(depth));
    const Line& l = lines[pos++];
    auto node = std::make_shared<TreeNode>();
    const auto& t = l.tokens;
    if (t[0] == "leaf") {
        if (t.size() < 2) throw Error("tree text: leaf without label");
        node->label = t[1];
        for (size_t i = 2; i < t.size(); ++i) {
            auto eq = t[i].find('=');
            if (eq == std::string::npos) throw Error("tree text: bad count token " + t[i]);
            node->counts[t[i].substr(0, eq)] = int(parse_double(t[i].substr(eq + 1)));
        }
        return node;
    }
    if (t[0] != "test") throw Error("tree text: expected 'test' or 'leaf', got '" + t[0] + "'");
    node->leaf = false;
    if (t.size() < 2) throw Error("tree text: test without attribute");
    node->attribute = t[1];
    if (t.size() == 4 && t[2] == "<=") {
        node->threshold = parse_double(t[3]);
        for (int side = 0; side < 2; ++side) {
            if (pos >= lines.size() || lines[pos].indent != depth + 1)
                throw Error("tree text: numeric test needs le/gt children");
            std::string branch = lines[pos].branch;
            TreePtr child = parse_node(lines, pos, depth + 1);
            if (branch == "le")
                node->le = child;
            else if (branch == "gt")
                node->gt = child;
            else
                throw Error("tree text: numeric branch must be le or gt, got '" + branch + "'");
        }
        if (!node->le || !node->gt) throw Error("tree text: numeric test missing a side");
    } else if (t.size() == 2) {
        while (pos < lines.size() && lines[pos].indent == depth + 1) {
            std::string branch = lines[pos].branch;
            if (branch.empty()) throw Error("tree text: categorical child without branch label");
            node->branches[branch] = parse_node(lines, pos, depth + 1);
        }
        if (node->branches.empty()) throw Error("tree text: categorical test without children");
    } else {
        throw Error("tree text: malformed test line");
    }
    return node;
}

std::vector<Line> read_lines(std::string_view text) {
    std::vector<Line> lines;
    std::istringstream in((std::string(text)));
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string stripped = raw;
        size_t first = stripped.find_first_not_of(' ');
        if (first == std::string::npos || stripped[first] == '#') continue;
        lines.push_back(parse_line(raw, lineno));
    }
    return lines;
}

}  // namespace

InterviewResult interview(const ModuleHierarchy& h, const Oracle& oracle) {
    validate_hierarchy(h);
    return InterviewSession(h, oracle).run();
}

std::string serialize_tree(const DecisionTree& tree) {
    std::string out;
    serialize_node(tree.root.get(), 0, "", out);
    return out;
}

DecisionTree parse_tree(std::string_view text) {
    auto lines = read_lines(text);
    size_t pos = 0;
    DecisionTree t{parse_node(lines, pos, 0)};
    if (pos != lines.size()) throw Error("tree text: trailing lines");
    return t;
}

std::string serialize_hierarchy(const ModuleHierarchy& h) {
    std::string out;
    // Root module first, then the rest alphabetically.
    std::vector<std::string> order{h.root};
    for (auto& [name, m] : h.modules)
        if (name != h.root) order.push_back(name);
    for (const std::string& name : order) {
        const HierarchyModule& m = h.modules.at(name);
        out += "module " + name + (name == h.root ? " root" : "") + "\n";
        if (m.critical) {
            out += "  critical " + m.critical->attribute + " ";
            bool first = true;
            for (const std::string& v : m.critical->unfavorable) {
                if (!first) out += "|";
                first = false;
                out += v;
            }
            out += " -> " + m.critical->result_class + "\n";
        }
        std::string tree_text = serialize_tree(m.tree);
        std::istringstream in(tree_text);
        std::string line;
        while (std::getline(in, line)) out += "  " + line + "\n";
    }
    return out;
}

ModuleHierarchy parse_hierarchy(std::string_view text) {
    ModuleHierarchy h;
    std::istringstream in((std::string(text)));
    std::string raw;
    std::string cur_name;
    std::optional<CriticalFactor> cur_critical;
    std::string cur_tree_text;
    auto flush = [&]() {
        if (cur_name.empty()) return;
        HierarchyModule m;
        m.name = cur_name;
        m.critical = cur_critical;
        m.tree = parse_tree(cur_tree_text);
        h.modules[cur_name] = std::move(m);
        cur_name.clear();
        cur_critical.reset();
        cur_tree_text.clear();
    };
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        size_t first = raw.find_first_not_of(' ');
        if (first == std::string::npos || raw[first] == '#') continue;
        if (raw.rfind("module ", 0) == 0) {
            flush();
            auto t = tokenize_ws(raw);
            if (t.size() < 2) throw Error("line " + std::to_string(lineno) + ": module needs a name");
            cur_name = t[1];
            if (t.size() > 2 && t[2] == "root") h.root = cur_name;
        } else if (raw.rfind("  critical ", 0) == 0) {
            auto t = tokenize_ws(raw);
            if (t.size() != 5 || t[3] != "->")
                throw Error("line " + std::to_string(lineno) +
                            ": critical syntax is 'critical <attr> <v1|v2> -> <class>'");
            CriticalFactor cf;
            cf.attribute = t[1];
            std::string vals = t[2];
            size_t start = 0;
            while (start <= vals.size()) {
                size_t bar = vals.find('|', start);
                cf.unfavorable.insert(vals.substr(start, bar - start));
                if (bar == std::string::npos) break;
                start = bar + 1;
            }
            cf.result_class = t[4];
            cur_critical = cf;
        } else {
            if (cur_name.empty())
                throw Error("line " + std::to_string(lineno) + ": node outside any module");
            if (raw.size() < 2 || raw.substr(0, 2) != "  ")
                throw Error("line " + std::to_string(lineno) + ": module body must be indented");
            cur_tree_text += raw.substr(2) + "\n";
        }
    }
    flush();
    if (h.root.empty()) throw Error("hierarchy has no root module");
    validate_hierarchy(h);
    return h;
}

ExampleSet read_examples_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open example set: " + path);
    ExampleSet ex;
    std::vector<std::vector<std::string>> raw_rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (lineno == 1) {
            if (f.size() < 2 || f.back() != "class")
                throw Error(path + ": last header column must be 'class'");
            ex.attr_names.assign(f.begin(), f.end() - 1);
            continue;
        }
        if (f.size() != ex.attr_names.size() + 1)
            throw Error(path + ":" + std::to_string(lineno) + ": wrong field count");
        ex.labels.push_back(f.back());
        f.pop_back();
        raw_rows.push_back(std::move(f));
    }
    if (raw_rows.empty()) throw Error(path + ": no example rows");
    ex.numeric.assign(ex.attr_names.size(), true);
    for (auto& row : raw_rows)
        for (size_t i = 0; i < row.size(); ++i)
            if (ex.numeric[i]) {
                try {
                    parse_double(row[i]);
                } catch (const Error&) {
                    ex.numeric[i] = false;
                }
            }
    for (auto& row : raw_rows) {
        std::vector<AttrValue> vals;
        for (size_t i = 0; i < row.size(); ++i)
            vals.push_back(ex.numeric[i] ? AttrValue{parse_double(row[i])} : AttrValue{row[i]});
        ex.rows.push_back(std::move(vals));
    }
    return ex;
}

}  // namespace shootout
