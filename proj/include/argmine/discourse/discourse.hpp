#pragma once

#include "argmine/graph/instances.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace argmine::discourse {

// Ordered list of discourse relation sense labels; the order defines vector
// indexing everywhere (annotations, pattern features, reports).
class SenseInventory {
public:
    explicit SenseInventory(std::vector<std::string> labels);

    static SenseInventory load(const std::string& path); // one label per line
    static SenseInventory default_inventory();           // 14 senses

    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    int index_of(const std::string& label) const; // -1 when absent
    std::uint64_t hash() const;

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

// A point on the |R|-simplex. Free-standing checks so raw vectors from the
// wire can be validated before construction.
bool is_on_simplex(const std::vector<double>& v, double tol = 1e-6);

struct DiscourseDistribution {
    std::vector<double> probabilities;

    std::size_t argmax() const; // ties break to the lowest index
};

// Validates a raw vector against the inventory: dimensionality, sign, and a
// sum within `sum_tol` of 1 (then renormalized to exactly 1).
DiscourseDistribution make_distribution(std::vector<double> raw, const SenseInventory& inv,
                                        double sum_tol = 1e-4);

// Map from child-claim id to the distribution of the (parent, child) pair.
class AnnotationStore {
public:
    void put(std::string child_id, DiscourseDistribution d);
    const DiscourseDistribution* find(const std::string& child_id) const;
    std::size_t size() const { return by_child_.size(); }
    const std::unordered_map<std::string, DiscourseDistribution>& entries() const {
        return by_child_;
    }

private:
    std::unordered_map<std::string, DiscourseDistribution> by_child_;
};

// annotations.jsonl: {"child_id": ..., "dist": [|R| floats]} per line.
AnnotationStore load_annotations(std::istream& stream, const SenseInventory& inv);
AnnotationStore load_annotations_file(const std::string& path, const SenseInventory& inv);

// Deterministic stand-in for an external pair classifier: FNV-1a over
// (parent text, 0x1F, child text) mixed with the seed, mapped to the simplex
// via softmax of |R| pseudo-uniform draws. Pure and platform-independent.
DiscourseDistribution stub_annotate(const std::string& parent_text,
                                    const std::string& child_text,
                                    const SenseInventory& inv, std::uint64_t seed);

// Attaches d^1..d^l to an instance from the store (missing pair -> error).
graph::ContextPathInstance attach_distributions(graph::ContextPathInstance instance,
                                                const AnnotationStore& store);
// Same, but synthesizing distributions with stub_annotate.
graph::ContextPathInstance attach_stub_distributions(graph::ContextPathInstance instance,
                                                     const SenseInventory& inv,
                                                     std::uint64_t seed);

// Counts of argmax senses across a store; totals equal the store size.
std::vector<std::size_t> relation_frequency(const AnnotationStore& store,
                                            const SenseInventory& inv);

// rows = the 3 impact labels, columns = senses or stances; every column is
// normalized to sum 1 (soft co-occurrence against the last-step d^l / s^l).
struct CorrelationMatrix {
    std::size_t columns = 0;
    std::vector<double> data; // 3 x columns, row-major

    double at(int label, std::size_t col) const { return data[label * columns + col]; }
};

struct ImpactCorrelations {
    CorrelationMatrix label_vs_stance;   // columns: Pro, Con
    CorrelationMatrix label_vs_relation; // columns: senses
};

// `use_argmax` switches the relation matrix from soft mass to argmax
// indicator columns. Instances with empty paths are skipped; all-skipped
// input is an error.
ImpactCorrelations impact_correlations(const std::vector<graph::ContextPathInstance>& instances,
                                       const SenseInventory& inv, bool use_argmax = false);

} // namespace argmine::discourse
