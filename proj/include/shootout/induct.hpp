#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "shootout/domain.hpp"

namespace shootout {

struct EmptyCounts : Error {
    using Error::Error;
};
struct NoInformativeSplit : Error {
    using Error::Error;
};
struct UnansweredCritical : Error {
    using Error::Error;
};

using AttrValue = std::variant<double, std::string>;

std::string attr_value_text(const AttrValue& v);

// Training data: categorical or numeric attributes plus a class label per row.
struct ExampleSet {
    std::vector<std::string> attr_names;
    std::vector<bool> numeric;  // parallel to attr_names
    std::vector<std::vector<AttrValue>> rows;
    std::vector<std::string> labels;

    size_t attr_index(const std::string& name) const;
};

// Shannon entropy in bits over class counts.
double entropy(const std::map<std::string, int>& counts);

struct SplitChoice {
    std::string attribute;
    std::optional<double> threshold;  // numeric attributes only
    double gain = 0;
};

// Maximum information gain over the candidates; numeric attributes try
// midpoints between consecutive distinct values; ties keep the earlier
// candidate.
SplitChoice best_split(const ExampleSet& examples, const std::vector<std::string>& candidates);

struct TreeNode;
using TreePtr = std::shared_ptr<TreeNode>;

struct TreeNode {
    bool leaf = true;
    // leaf
    std::string label;
    std::map<std::string, int> counts;
    // internal
    std::string attribute;
    std::optional<double> threshold;         // numeric: <= goes left
    std::map<std::string, TreePtr> branches; // categorical, keyed by value
    TreePtr le, gt;                          // numeric children
};

struct DecisionTree {
    TreePtr root;
};

// Classic ID3 with binary threshold splits for numeric attributes; leaves on
// purity or when no split is informative (majority label, lowest label wins
// ties).
DecisionTree induce_tree(const ExampleSet& examples);

// Classifies a fully known row (training-style evaluation).
std::string classify_example(const DecisionTree& tree, const ExampleSet& schema,
                             const std::vector<AttrValue>& row);

struct CriticalFactor {
    std::string attribute;
    std::set<std::string> unfavorable;  // values that short-circuit the module
    std::string result_class;
};

struct HierarchyModule {
    std::string name;
    DecisionTree tree;
    std::optional<CriticalFactor> critical;
};

// Modules wired by attribute name: a tree that tests an attribute named after
// another module pulls that module's output class as the answer.
struct ModuleHierarchy {
    std::map<std::string, HierarchyModule> modules;
    std::string root;
};

void validate_hierarchy(const ModuleHierarchy& h);  // acyclic, root present

using Oracle = std::function<std::optional<AttrValue>(const std::string&)>;

struct InterviewResult {
    std::string label;
    int questions_asked = 0;
    std::vector<std::string> trail;
};

// Lazy evaluation: only attributes on the realized path are asked, child
// modules expand only when tested, and an unfavorable critical factor returns
// immediately. questions_asked counts distinct oracle queries.
InterviewResult interview(const ModuleHierarchy& h, const Oracle& oracle);

// Indented text serialization, one node per line.
std::string serialize_tree(const DecisionTree& tree);
DecisionTree parse_tree(std::string_view text);
std::string serialize_hierarchy(const ModuleHierarchy& h);
ModuleHierarchy parse_hierarchy(std::string_view text);

// Training CSV: attribute columns then a final "class" column.
ExampleSet read_examples_csv(const std::string& path);

}  // namespace shootout
