#include "argmine/graph/instances.hpp"

#include <algorithm>

namespace argmine::graph {

ContextPathInstance extract_instance(const ArgumentTree& tree, const std::string& claim_id,
                                     std::size_t max_len) {
    const ArgumentNode* claim = tree.find(claim_id);
    if (!claim) throw std::invalid_argument("unknown claim id: " + claim_id);
    if (!claim->impact)
        throw std::invalid_argument("claim has no impact label: " + claim_id);

    // Walk up to the max_len nearest ancestors, then reverse into path order.
    std::vector<const ArgumentNode*> chain{claim};
    const ArgumentNode* cur = claim;
    while (chain.size() <= max_len) {
        const ArgumentNode* p = tree.parent(*cur);
        if (!p) break;
        chain.push_back(p);
        cur = p;
    }
    std::reverse(chain.begin(), chain.end());

    ContextPathInstance inst;
    inst.label = *claim->impact;
    inst.split = claim->split;
    for (const ArgumentNode* n : chain) {
        inst.claim_ids.push_back(n->id);
        inst.claim_texts.push_back(n->text);
    }
    for (std::size_t i = 1; i < chain.size(); ++i) inst.stances.push_back(*chain[i]->stance);
    return inst;
}

std::vector<ContextPathInstance>& SplitInstances::by_split(Split s) {
    switch (s) {
        case Split::Train: return train;
        case Split::Validation: return validation;
        case Split::Test: return test;
    }
    throw std::logic_error("bad split");
}

const std::vector<ContextPathInstance>& SplitInstances::by_split(Split s) const {
    return const_cast<SplitInstances*>(this)->by_split(s);
}

SplitInstances split_instances(const Forest& forest, std::size_t max_len) {
    SplitInstances out;
    for (const auto& tree : forest.trees()) {
        for (const auto& node : tree.nodes()) {
            if (!node.impact) continue;
            if (!node.split)
                throw std::invalid_argument("labeled node without split tag: " + node.id);
            out.by_split(*node.split).push_back(extract_instance(tree, node.id, max_len));
        }
    }
    return out;
}

CorpusStats corpus_stats(const Forest& forest) {
    CorpusStats s;
    s.tree_count = forest.tree_count();
    double depth_sum = 0.0;
    for (const auto& tree : forest.trees()) {
        for (const auto& node : tree.nodes()) {
            ++s.total_nodes;
            if (node.stance && node.split)
                ++s.stance_counts[*node.split][node.stance == Stance::Pro ? 0 : 1];
            if (!node.impact) continue;
            ++s.labeled_nodes;
            if (node.split) ++s.label_counts[*node.split][static_cast<int>(*node.impact)];
            depth_sum += static_cast<double>(tree.depth(node));
        }
    }
    s.mean_longest_path =
        s.labeled_nodes == 0 ? 0.0 : depth_sum / static_cast<double>(s.labeled_nodes);
    return s;
}

} // namespace argmine::graph
