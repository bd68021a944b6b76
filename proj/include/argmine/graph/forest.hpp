#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace argmine::graph {

// Fixed order; confusion matrices are indexed by this.
enum class ImpactLabel { Impactful = 0, MediumImpact = 1, NotImpactful = 2 };
enum class Stance { Pro, Con };
enum class Split { Train, Validation, Test };

constexpr int kNumImpactLabels = 3;

std::string to_string(ImpactLabel l);
std::string to_string(Stance s);
std::string to_string(Split s);
std::optional<ImpactLabel> impact_from_string(const std::string& s);
std::optional<Stance> stance_from_string(const std::string& s);
std::optional<Split> split_from_string(const std::string& s);

struct ArgumentNode {
    std::string id;
    std::string tree_id;
    std::optional<std::string> parent_id; // absent for the thesis
    std::string text;                     // preserved verbatim
    std::optional<Stance> stance;
    std::optional<ImpactLabel> impact;
    std::optional<Split> split;

    bool is_thesis() const { return !parent_id.has_value(); }
};

struct Diagnostic {
    std::string kind;    // e.g. "duplicate_id", "dangling_parent"
    std::string node_id; // offending node where known
    std::size_t line = 0; // 1-based input line, 0 when not line-bound
    std::string message;
};

// Aggregates every validation problem found in an input stream.
class ForestError : public std::runtime_error {
public:
    explicit ForestError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

// One argument tree: a thesis plus parent/child adjacency. Immutable once
// built; all queries are const and safe for concurrent readers.
class ArgumentTree {
public:
    ArgumentTree(std::vector<ArgumentNode> nodes, std::size_t thesis_index,
                 std::unordered_map<std::string, std::size_t> index_by_id,
                 std::vector<std::vector<std::size_t>> children);

    const std::string& tree_id() const { return nodes_[thesis_].tree_id; }
    const ArgumentNode& thesis() const { return nodes_[thesis_]; }
    const std::vector<ArgumentNode>& nodes() const { return nodes_; }

    const ArgumentNode* find(const std::string& id) const;
    const ArgumentNode* parent(const ArgumentNode& n) const;
    std::vector<const ArgumentNode*> children(const ArgumentNode& n) const;

    // Edge count from the thesis; thesis depth is 0.
    std::size_t depth(const ArgumentNode& n) const;

private:
    std::size_t index_of(const ArgumentNode& n) const;

    std::vector<ArgumentNode> nodes_;
    std::size_t thesis_;
    std::unordered_map<std::string, std::size_t> index_by_id_;
    std::vector<std::vector<std::size_t>> children_;
};

class Forest {
public:
    explicit Forest(std::vector<ArgumentTree> trees);

    const std::vector<ArgumentTree>& trees() const { return trees_; }
    bool empty() const { return trees_.empty(); }
    std::size_t tree_count() const { return trees_.size(); }
    std::size_t node_count() const;

    // Locates a node and its owning tree anywhere in the forest.
    std::pair<const ArgumentTree*, const ArgumentNode*> find(const std::string& id) const;

private:
    std::vector<ArgumentTree> trees_;
};

// Parses line-delimited JSON node records (see docs for the schema) and
// validates the forest; throws ForestError listing every problem found.
Forest parse_forest(std::istream& stream);
Forest parse_forest_file(const std::string& path);

// Inverse of parse_forest up to line order: one JSON record per node.
std::string serialize_forest(const Forest& forest);

} // namespace argmine::graph
