#include "argmine/graph/forest.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace argmine::graph {

using nlohmann::json;

std::string to_string(ImpactLabel l) {
    switch (l) {
        case ImpactLabel::Impactful: return "impactful";
        case ImpactLabel::MediumImpact: return "medium_impact";
        case ImpactLabel::NotImpactful: return "not_impactful";
    }
    return "?";
}

std::string to_string(Stance s) { return s == Stance::Pro ? "pro" : "con"; }

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "?";
}

std::optional<ImpactLabel> impact_from_string(const std::string& s) {
    if (s == "impactful") return ImpactLabel::Impactful;
    if (s == "medium_impact") return ImpactLabel::MediumImpact;
    if (s == "not_impactful") return ImpactLabel::NotImpactful;
    return std::nullopt;
}

std::optional<Stance> stance_from_string(const std::string& s) {
    if (s == "pro") return Stance::Pro;
    if (s == "con") return Stance::Con;
    return std::nullopt;
}

std::optional<Split> split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "validation") return Split::Validation;
    if (s == "test") return Split::Test;
    return std::nullopt;
}

namespace {

std::string render(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    os << diags.size() << " forest error(s):";
    for (const auto& d : diags) {
        os << "\n  [" << d.kind << "]";
        if (d.line) os << " line " << d.line;
        if (!d.node_id.empty()) os << " node '" << d.node_id << "'";
        os << ": " << d.message;
    }
    return os.str();
}

} // namespace

ForestError::ForestError(std::vector<Diagnostic> diags)
    : std::runtime_error(render(diags)), diags_(std::move(diags)) {}

// ---------------------------------------------------------------------------
// ArgumentTree
// ---------------------------------------------------------------------------

ArgumentTree::ArgumentTree(std::vector<ArgumentNode> nodes, std::size_t thesis_index,
                           std::unordered_map<std::string, std::size_t> index_by_id,
                           std::vector<std::vector<std::size_t>> children)
    : nodes_(std::move(nodes)),
      thesis_(thesis_index),
      index_by_id_(std::move(index_by_id)),
      children_(std::move(children)) {}

const ArgumentNode* ArgumentTree::find(const std::string& id) const {
    auto it = index_by_id_.find(id);
    return it == index_by_id_.end() ? nullptr : &nodes_[it->second];
}

std::size_t ArgumentTree::index_of(const ArgumentNode& n) const {
    auto it = index_by_id_.find(n.id);
    if (it == index_by_id_.end()) throw std::logic_error("node not in tree: " + n.id);
    return it->second;
}

const ArgumentNode* ArgumentTree::parent(const ArgumentNode& n) const {
    if (!n.parent_id) return nullptr;
    return find(*n.parent_id);
}

std::vector<const ArgumentNode*> ArgumentTree::children(const ArgumentNode& n) const {
    std::vector<const ArgumentNode*> out;
    for (std::size_t ci : children_[index_of(n)]) out.push_back(&nodes_[ci]);
    return out;
}

std::size_t ArgumentTree::depth(const ArgumentNode& n) const {
    std::size_t d = 0;
    const ArgumentNode* cur = &n;
    while (const ArgumentNode* p = parent(*cur)) {
        ++d;
        cur = p;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Forest
// ---------------------------------------------------------------------------

Forest::Forest(std::vector<ArgumentTree> trees) : trees_(std::move(trees)) {}

std::size_t Forest::node_count() const {
    std::size_t n = 0;
    for (const auto& t : trees_) n += t.nodes().size();
    return n;
}

std::pair<const ArgumentTree*, const ArgumentNode*> Forest::find(const std::string& id) const {
    for (const auto& t : trees_)
        if (const ArgumentNode* n = t.find(id)) return {&t, n};
    return {nullptr, nullptr};
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kKnownKeys = {"id", "tree_id", "parent_id", "text",
                                          "stance", "impact", "split"};

struct RawRecord {
    ArgumentNode node;
    std::size_t line;
};

std::optional<std::string> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

void parse_record(const std::string& text, std::size_t line_no, std::vector<RawRecord>& out,
                  std::vector<Diagnostic>& diags) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        diags.push_back({"bad_json", "", line_no, e.what()});
        return;
    }
    if (!j.is_object()) {
        diags.push_back({"bad_record", "", line_no, "record is not a JSON object"});
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!kKnownKeys.count(it.key())) {
            diags.push_back({"unknown_key", "", line_no, "unknown key '" + it.key() + "'"});
            return;
        }
    }
    RawRecord rec;
    rec.line = line_no;
    try {
        rec.node.id = j.at("id").get<std::string>();
        rec.node.tree_id = j.at("tree_id").get<std::string>();
        rec.node.parent_id = opt_string(j, "parent_id");
        rec.node.text = j.at("text").get<std::string>();
        if (auto s = opt_string(j, "stance")) {
            auto parsed = stance_from_string(*s);
            if (!parsed) {
                diags.push_back({"bad_stance", rec.node.id, line_no, "unknown stance '" + *s + "'"});
                return;
            }
            rec.node.stance = parsed;
        }
        if (auto s = opt_string(j, "impact")) {
            auto parsed = impact_from_string(*s);
            if (!parsed) {
                diags.push_back({"bad_impact", rec.node.id, line_no, "unknown impact '" + *s + "'"});
                return;
            }
            rec.node.impact = parsed;
        }
        if (auto s = opt_string(j, "split")) {
            auto parsed = split_from_string(*s);
            if (!parsed) {
                diags.push_back({"bad_split", rec.node.id, line_no, "unknown split '" + *s + "'"});
                return;
            }
            rec.node.split = parsed;
        }
    } catch (const json::exception& e) {
        diags.push_back({"bad_record", "", line_no, e.what()});
        return;
    }
    out.push_back(std::move(rec));
}

} // namespace

Forest parse_forest(std::istream& stream) {
    std::vector<RawRecord> records;
    std::vector<Diagnostic> diags;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        parse_record(line, line_no, records, diags);
    }

    // Duplicate ids are global: an id names one node across the forest.
    std::unordered_map<std::string, std::size_t> line_of_id;
    for (const auto& r : records) {
        auto [it, inserted] = line_of_id.emplace(r.node.id, r.line);
        if (!inserted)
            diags.push_back({"duplicate_id", r.node.id, r.line,
                             "id already defined at line " + std::to_string(it->second)});
    }
    if (!diags.empty()) throw ForestError(std::move(diags));

    // Group by tree_id, keeping first-seen tree order.
    std::vector<std::string> tree_order;
    std::map<std::string, std::vector<RawRecord>> by_tree;
    for (auto& r : records) {
        if (!by_tree.count(r.node.tree_id)) tree_order.push_back(r.node.tree_id);
        by_tree[r.node.tree_id].push_back(std::move(r));
    }

    std::vector<ArgumentTree> trees;
    for (const auto& tid : tree_order) {
        auto& recs = by_tree[tid];
        std::unordered_map<std::string, std::size_t> index_by_id;
        for (std::size_t i = 0; i < recs.size(); ++i) index_by_id[recs[i].node.id] = i;

        std::vector<std::size_t> thesis_indices;
        std::vector<std::vector<std::size_t>> children(recs.size());
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const ArgumentNode& n = recs[i].node;
            if (n.is_thesis()) {
                thesis_indices.push_back(i);
                if (n.stance)
                    diags.push_back({"thesis_with_stance", n.id, recs[i].line,
                                     "thesis node carries a stance"});
            } else {
                if (!n.stance)
                    diags.push_back({"missing_stance", n.id, recs[i].line,
                                     "non-thesis node lacks a stance"});
                auto it = index_by_id.find(*n.parent_id);
                if (it == index_by_id.end()) {
                    diags.push_back({"dangling_parent", n.id, recs[i].line,
                                     "parent_id '" + *n.parent_id +
                                         "' not found in tree '" + tid + "'"});
                } else {
                    children[it->second].push_back(i);
                }
            }
        }
        if (thesis_indices.empty())
            diags.push_back({"no_thesis", "", 0, "tree '" + tid + "' has no thesis node"});
        if (thesis_indices.size() > 1)
            diags.push_back({"multiple_theses", recs[thesis_indices[1]].node.id,
                             recs[thesis_indices[1]].line,
                             "tree '" + tid + "' has more than one thesis"});
        if (!diags.empty()) continue;

        // Cycle check: walk parents from each node with a visited budget.
        for (std::size_t i = 0; i < recs.size(); ++i) {
            std::size_t steps = 0;
            std::size_t cur = i;
            while (recs[cur].node.parent_id) {
                cur = index_by_id.at(*recs[cur].node.parent_id);
                if (++steps > recs.size()) {
                    diags.push_back({"cycle", recs[i].node.id, recs[i].line,
                                     "parent chain does not terminate"});
                    break;
                }
            }
        }
        if (!diags.empty()) continue;

        std::vector<ArgumentNode> nodes;
        nodes.reserve(recs.size());
        for (auto& r : recs) nodes.push_back(std::move(r.node));
        trees.emplace_back(std::move(nodes), thesis_indices[0], std::move(index_by_id),
                           std::move(children));
    }
    if (!diags.empty()) throw ForestError(std::move(diags));
    return Forest(std::move(trees));
}

Forest parse_forest_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open trees file: " + path);
    return parse_forest(is);
}

std::string serialize_forest(const Forest& forest) {
    std::ostringstream os;
    for (const auto& tree : forest.trees()) {
        for (const auto& n : tree.nodes()) {
            json j;
            j["id"] = n.id;
            j["tree_id"] = n.tree_id;
            j["parent_id"] = n.parent_id ? json(*n.parent_id) : json(nullptr);
            j["text"] = n.text;
            j["stance"] = n.stance ? json(to_string(*n.stance)) : json(nullptr);
            j["impact"] = n.impact ? json(to_string(*n.impact)) : json(nullptr);
            j["split"] = n.split ? json(to_string(*n.split)) : json(nullptr);
            os << j.dump() << '\n';
        }
    }
    return os.str();
}

} // namespace argmine::graph
