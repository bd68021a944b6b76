#include "argmine/discourse/discourse.hpp"

#include "argmine/nn/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace argmine::discourse {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SenseInventory
// ---------------------------------------------------------------------------

SenseInventory::SenseInventory(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw std::invalid_argument("sense inventory needs >= 2 labels");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!index_.emplace(labels_[i], i).second)
            throw std::invalid_argument("duplicate sense label: " + labels_[i]);
    }
}

SenseInventory SenseInventory::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open inventory file: " + path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(is, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) labels.push_back(line);
    }
    return SenseInventory(std::move(labels));
}

SenseInventory SenseInventory::default_inventory() {
    return SenseInventory({
        "Reason", "Conjunction", "Contrast", "Restatement", "Result", "Instantiation",
        "Chosen Alternative", "Concession", "Condition", "Alternative", "Exception",
        "Precedence", "Succession", "Synchrony",
    });
}

int SenseInventory::index_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : static_cast<int>(it->second);
}

std::uint64_t SenseInventory::hash() const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const auto& l : labels_) {
        h = nn::fnv1a64(l, h);
        h = nn::fnv1a64("\x1f", h);
    }
    return h;
}

// ---------------------------------------------------------------------------
// distributions
// ---------------------------------------------------------------------------

bool is_on_simplex(const std::vector<double>& v, double tol) {
    if (v.empty()) return false;
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) return false;
        sum += x;
    }
    return std::fabs(sum - 1.0) <= tol;
}

std::size_t DiscourseDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probabilities.size(); ++i)
        if (probabilities[i] > probabilities[best]) best = i;
    return best;
}

DiscourseDistribution make_distribution(std::vector<double> raw, const SenseInventory& inv,
                                        double sum_tol) {
    if (raw.size() != inv.size())
        throw std::invalid_argument("distribution has " + std::to_string(raw.size()) +
                                    " entries, inventory has " + std::to_string(inv.size()));
    double sum = 0.0;
    for (double x : raw) {
        if (!(x >= 0.0)) throw std::invalid_argument("distribution has a negative entry");
        sum += x;
    }
    if (std::fabs(sum - 1.0) > sum_tol)
        throw std::invalid_argument("distribution sum " + std::to_string(sum) +
                                    " deviates from 1 beyond tolerance");
    for (double& x : raw) x /= sum;
    return DiscourseDistribution{std::move(raw)};
}

// ---------------------------------------------------------------------------
// AnnotationStore
// ---------------------------------------------------------------------------

void AnnotationStore::put(std::string child_id, DiscourseDistribution d) {
    by_child_[std::move(child_id)] = std::move(d);
}

const DiscourseDistribution* AnnotationStore::find(const std::string& child_id) const {
    auto it = by_child_.find(child_id);
    return it == by_child_.end() ? nullptr : &it->second;
}

AnnotationStore load_annotations(std::istream& stream, const SenseInventory& inv) {
    AnnotationStore store;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("annotations line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        try {
            auto child_id = j.at("child_id").get<std::string>();
            auto dist = j.at("dist").get<std::vector<double>>();
            store.put(std::move(child_id), make_distribution(std::move(dist), inv));
        } catch (const std::exception& e) {
            throw std::runtime_error("annotations line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return store;
}

AnnotationStore load_annotations_file(const std::string& path, const SenseInventory& inv) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open annotations file: " + path);
    return load_annotations(is, inv);
}

// ---------------------------------------------------------------------------
// stub annotator
// ---------------------------------------------------------------------------

DiscourseDistribution stub_annotate(const std::string& parent_text,
                                    const std::string& child_text,
                                    const SenseInventory& inv, std::uint64_t seed) {
    std::uint64_t h = nn::fnv1a64(parent_text);
    h = nn::fnv1a64("\x1f", h);
    h = nn::fnv1a64(child_text, h);
    std::uint64_t state = nn::splitmix64(h ^ nn::splitmix64(seed));

    std::vector<double> draws(inv.size());
    for (auto& d : draws) {
        state = nn::splitmix64(state);
        d = static_cast<double>(state >> 11) * 0x1.0p-53; // uniform in [0,1)
    }
    double mx = draws[0];
    for (double d : draws) mx = std::max(mx, d);
    double sum = 0.0;
    std::vector<double> probs(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
        probs[i] = std::exp(draws[i] - mx);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return DiscourseDistribution{std::move(probs)};
}

// ---------------------------------------------------------------------------
// attachment
// ---------------------------------------------------------------------------

graph::ContextPathInstance attach_distributions(graph::ContextPathInstance instance,
                                                const AnnotationStore& store) {
    instance.distributions.clear();
    for (std::size_t i = 1; i < instance.claim_ids.size(); ++i) {
        const DiscourseDistribution* d = store.find(instance.claim_ids[i]);
        if (!d)
            throw std::runtime_error("no annotation for pair ending at child '" +
                                     instance.claim_ids[i] + "'");
        instance.distributions.push_back(d->probabilities);
    }
    return instance;
}

graph::ContextPathInstance attach_stub_distributions(graph::ContextPathInstance instance,
                                                     const SenseInventory& inv,
                                                     std::uint64_t seed) {
    instance.distributions.clear();
    for (std::size_t i = 1; i < instance.claim_ids.size(); ++i) {
        instance.distributions.push_back(
            stub_annotate(instance.claim_texts[i - 1], instance.claim_texts[i], inv, seed)
                .probabilities);
    }
    return instance;
}

// ---------------------------------------------------------------------------
// statistics
// ---------------------------------------------------------------------------

std::vector<std::size_t> relation_frequency(const AnnotationStore& store,
                                            const SenseInventory& inv) {
    if (store.size() == 0) throw std::invalid_argument("relation_frequency: empty store");
    std::vector<std::size_t> counts(inv.size(), 0);
    for (const auto& [_, d] : store.entries()) ++counts[d.argmax()];
    return counts;
}

namespace {

void normalize_columns(CorrelationMatrix& m) {
    for (std::size_t c = 0; c < m.columns; ++c) {
        double sum = 0.0;
        for (int r = 0; r < graph::kNumImpactLabels; ++r) sum += m.data[r * m.columns + c];
        if (sum > 0.0)
            for (int r = 0; r < graph::kNumImpactLabels; ++r) m.data[r * m.columns + c] /= sum;
    }
}

} // namespace

ImpactCorrelations impact_correlations(const std::vector<graph::ContextPathInstance>& instances,
                                       const SenseInventory& inv, bool use_argmax) {
    ImpactCorrelations out;
    out.label_vs_stance.columns = 2;
    out.label_vs_stance.data.assign(graph::kNumImpactLabels * 2, 0.0);
    out.label_vs_relation.columns = inv.size();
    out.label_vs_relation.data.assign(graph::kNumImpactLabels * inv.size(), 0.0);

    std::size_t used = 0;
    for (const auto& inst : instances) {
        const std::size_t l = inst.path_length();
        if (l == 0) continue;
        if (inst.distributions.size() != l)
            throw std::invalid_argument("impact_correlations: instance lacks distributions");
        ++used;
        const int row = static_cast<int>(inst.label);
        const int stance_col = inst.stances.back() == graph::Stance::Pro ? 0 : 1;
        out.label_vs_stance.data[row * 2 + stance_col] += 1.0;
        const auto& last = inst.distributions.back();
        if (use_argmax) {
            DiscourseDistribution d{last};
            out.label_vs_relation.data[row * inv.size() + d.argmax()] += 1.0;
        } else {
            for (std::size_t k = 0; k < inv.size(); ++k)
                out.label_vs_relation.data[row * inv.size() + k] += last[k];
        }
    }
    if (used == 0)
        throw std::invalid_argument("impact_correlations: no instances with non-empty paths");
    normalize_columns(out.label_vs_stance);
    normalize_columns(out.label_vs_relation);
    return out;
}

} // namespace argmine::discourse
