#pragma once

#include "argmine/discourse/discourse.hpp"
#include "argmine/graph/instances.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace argmine::patterns {

// All relation tuples of lengths 1..max_order over the sense inventory, in
// length-major order, lexicographic by inventory index within a length.
// Tuples are stored implicitly: an index decodes to a tuple in mixed radix
// with the earliest relation most significant.
class PatternSpace {
public:
    PatternSpace(const discourse::SenseInventory& inv, std::size_t max_order);

    std::size_t size() const { return total_; }
    std::size_t max_order() const { return max_order_; }
    std::size_t alphabet() const { return alphabet_; }

    std::size_t block_offset(std::size_t k) const; // first index of length-k block
    std::size_t block_size(std::size_t k) const;   // |R|^k
    std::size_t length_of(std::size_t index) const;

    std::vector<std::size_t> tuple_of(std::size_t index) const;
    std::size_t index_of(const std::vector<std::size_t>& tuple) const;

    // Hyphen-joined sense names, e.g. "Reason-Contrast".
    std::string name(std::size_t index, const discourse::SenseInventory& inv) const;

private:
    std::size_t alphabet_;
    std::size_t max_order_;
    std::size_t total_;
    std::vector<std::size_t> offsets_; // offsets_[k-1] = start of length-k block
};

// Joint probability of a k-tuple pattern against a k-long distribution
// suffix: the product of each step's probability of its relation.
double joint_probability(const std::vector<std::vector<double>>& suffix,
                         const std::vector<std::size_t>& pattern);

// Feature vector over the whole pattern space: the length-k block holds the
// joint probabilities over the last k distributions when the path is long
// enough, and zeros otherwise.
std::vector<double> featurize(const graph::ContextPathInstance& instance,
                              const PatternSpace& space);

struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Featurizes a batch; rows are independent and computed in parallel.
FeatureMatrix featurize_all(const std::vector<graph::ContextPathInstance>& instances,
                            const PatternSpace& space);

// ---------------------------------------------------------------------------
// one-vs-rest logistic regression
// ---------------------------------------------------------------------------

struct LogRegConfig {
    double l2 = 0.0;
    std::size_t epochs = 500;
    double learning_rate = 0.5;
    bool standardize = false;
    std::uint64_t seed = 0;
};

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool degenerate = false; // all-same binary labels in training data
    double final_loss = 0.0;
    std::vector<double> loss_curve;
};

struct OvrModels {
    std::array<LogRegModel, 3> per_label;
    LogRegConfig config;
    // Standardization statistics (identity when standardize is off).
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
};

// L2-regularized logistic loss and its analytic gradient on a binary task;
// the unit the finite-difference property tests check.
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};
LossGrad logreg_loss_grad(const FeatureMatrix& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double l2);

// Full-batch gradient descent, one binary model per impact label.
OvrModels train_ovr(const FeatureMatrix& features, const std::vector<graph::ImpactLabel>& labels,
                    const LogRegConfig& config);

// k largest signed coefficients, descending; ties break toward the lower
// pattern index. k is clamped to the space size.
std::vector<std::pair<std::size_t, double>> top_coefficients(const LogRegModel& model,
                                                             std::size_t k);

// Per-label sigmoid scores; no cross-label normalization.
std::array<double, 3> predict(const OvrModels& models, const std::vector<double>& features);

} // namespace argmine::patterns
