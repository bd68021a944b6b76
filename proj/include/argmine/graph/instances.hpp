#pragma once

#include "argmine/graph/forest.hpp"

#include <array>
#include <map>
#include <vector>

namespace argmine::graph {

// A labeled claim C^l with its context path (C^0 .. C^{l-1}). stances[i-1]
// is the stance of claims[i] toward claims[i-1]; distributions, when
// attached, align the same way.
struct ContextPathInstance {
    std::vector<std::string> claim_ids;             // C^0 .. C^l
    std::vector<std::string> claim_texts;
    std::vector<Stance> stances;                    // s^1 .. s^l
    std::vector<std::vector<double>> distributions; // d^1 .. d^l, may be empty
    ImpactLabel label = ImpactLabel::Impactful;
    std::optional<Split> split;

    std::size_t path_length() const { return claim_ids.empty() ? 0 : claim_ids.size() - 1; }
    bool has_distributions() const { return !distributions.empty() || path_length() == 0; }
};

// The min(max_len, depth) nearest ancestors followed by the claim itself.
ContextPathInstance extract_instance(const ArgumentTree& tree, const std::string& claim_id,
                                     std::size_t max_len);

struct SplitInstances {
    std::vector<ContextPathInstance> train;
    std::vector<ContextPathInstance> validation;
    std::vector<ContextPathInstance> test;

    std::vector<ContextPathInstance>& by_split(Split s);
    const std::vector<ContextPathInstance>& by_split(Split s) const;
};

// One instance per labeled node, routed by the node's split tag. A labeled
// node without a split tag is an error.
SplitInstances split_instances(const Forest& forest, std::size_t max_len);

struct CorpusStats {
    // counts[split][label] and stance_counts[split][stance]
    std::map<Split, std::array<std::size_t, 3>> label_counts;
    std::map<Split, std::array<std::size_t, 2>> stance_counts;
    std::size_t labeled_nodes = 0;
    std::size_t total_nodes = 0;
    std::size_t tree_count = 0;
    // Mean over labeled claims of their depth from the thesis (in edges).
    double mean_longest_path = 0.0;
};

CorpusStats corpus_stats(const Forest& forest);

} // namespace argmine::graph
