#include "argmine/patterns/patterns.hpp"

#include "argmine/nn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace argmine::patterns {

// ---------------------------------------------------------------------------
// PatternSpace
// ---------------------------------------------------------------------------

PatternSpace::PatternSpace(const discourse::SenseInventory& inv, std::size_t max_order)
    : alphabet_(inv.size()), max_order_(max_order) {
    if (max_order_ == 0) throw std::invalid_argument("PatternSpace: max_order must be >= 1");
    offsets_.resize(max_order_);
    std::size_t offset = 0;
    std::size_t block = 1;
    for (std::size_t k = 1; k <= max_order_; ++k) {
        block *= alphabet_;
        offsets_[k - 1] = offset;
        offset += block;
    }
    total_ = offset;
}

std::size_t PatternSpace::block_offset(std::size_t k) const {
    if (k < 1 || k > max_order_) throw std::out_of_range("PatternSpace::block_offset");
    return offsets_[k - 1];
}

std::size_t PatternSpace::block_size(std::size_t k) const {
    std::size_t b = 1;
    for (std::size_t i = 0; i < k; ++i) b *= alphabet_;
    return b;
}

std::size_t PatternSpace::length_of(std::size_t index) const {
    for (std::size_t k = max_order_; k >= 1; --k)
        if (index >= offsets_[k - 1]) return k;
    throw std::out_of_range("PatternSpace::length_of");
}

std::vector<std::size_t> PatternSpace::tuple_of(std::size_t index) const {
    if (index >= total_) throw std::out_of_range("PatternSpace::tuple_of");
    const std::size_t k = length_of(index);
    std::size_t rem = index - offsets_[k - 1];
    std::vector<std::size_t> tuple(k);
    for (std::size_t i = k; i-- > 0;) {
        tuple[i] = rem % alphabet_;
        rem /= alphabet_;
    }
    return tuple;
}

std::size_t PatternSpace::index_of(const std::vector<std::size_t>& tuple) const {
    const std::size_t k = tuple.size();
    if (k < 1 || k > max_order_) throw std::out_of_range("PatternSpace::index_of");
    std::size_t idx = 0;
    for (std::size_t r : tuple) {
        if (r >= alphabet_) throw std::out_of_range("PatternSpace::index_of: bad sense");
        idx = idx * alphabet_ + r;
    }
    return offsets_[k - 1] + idx;
}

std::string PatternSpace::name(std::size_t index, const discourse::SenseInventory& inv) const {
    std::string out;
    for (std::size_t r : tuple_of(index)) {
        if (!out.empty()) out += '-';
        out += inv.label(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// features
// ---------------------------------------------------------------------------

double joint_probability(const std::vector<std::vector<double>>& suffix,
                         const std::vector<std::size_t>& pattern) {
    if (suffix.size() != pattern.size() || pattern.empty())
        throw std::invalid_argument("joint_probability: suffix/pattern length mismatch");
    double p = 1.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] >= suffix[i].size())
            throw std::out_of_range("joint_probability: sense index out of range");
        p *= suffix[i][pattern[i]];
    }
    return p;
}

std::vector<double> featurize(const graph::ContextPathInstance& instance,
                              const PatternSpace& space) {
    const std::size_t l = instance.path_length();
    if (l > 0 && instance.distributions.size() != l)
        throw std::invalid_argument("featurize: instance has no attached distributions");
    std::vector<double> x(space.size(), 0.0);
    const std::size_t r = space.alphabet();
    for (std::size_t k = 1; k <= std::min(space.max_order(), l); ++k) {
        // Expand the outer product left to right so the earliest relation in
        // the suffix is the most significant index, matching tuple order.
        std::vector<double> block{1.0};
        for (std::size_t step = 0; step < k; ++step) {
            const auto& d = instance.distributions[l - k + step];
            if (d.size() != r)
                throw std::invalid_argument("featurize: distribution width != |R|");
            std::vector<double> next(block.size() * r);
            for (std::size_t i = 0; i < block.size(); ++i)
                for (std::size_t j = 0; j < r; ++j) next[i * r + j] = block[i] * d[j];
            block = std::move(next);
        }
        std::copy(block.begin(), block.end(), x.begin() + space.block_offset(k));
    }
    return x;
}

FeatureMatrix featurize_all(const std::vector<graph::ContextPathInstance>& instances,
                            const PatternSpace& space) {
    FeatureMatrix m;
    m.rows = instances.size();
    m.cols = space.size();
    m.data.assign(m.rows * m.cols, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(instances.size()); ++i) {
        auto x = featurize(instances[i], space);
        std::copy(x.begin(), x.end(), m.data.begin() + i * m.cols);
    }
    return m;
}

// ---------------------------------------------------------------------------
// logistic regression
// ---------------------------------------------------------------------------

LossGrad logreg_loss_grad(const FeatureMatrix& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double l2) {
    const std::size_t n = x.rows, d = x.cols;
    if (y.size() != n || w.size() != d)
        throw std::invalid_argument("logreg_loss_grad: dimension mismatch");
    if (n == 0) throw std::invalid_argument("logreg_loss_grad: empty data");

    // margins = X w + b
    std::vector<double> margin(n, 0.0);
    nn::kernels::gemm_nn(x.data.data(), w.data(), margin.data(), n, d, 1);

    LossGrad out;
    out.grad_w.assign(d, 0.0);
    std::vector<double> residual(n);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = margin[i] + b;
        // log(1 + exp(-t)) with t = z for y=1 and t = -z for y=0, stabilized
        const double t = y[i] ? z : -z;
        loss += t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
        const double p = 1.0 / (1.0 + std::exp(-z));
        residual[i] = p - static_cast<double>(y[i]);
        out.grad_b += residual[i];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    out.grad_b *= inv_n;

    // grad_w = X^T residual / n + l2 * w
    nn::kernels::gemm_tn(x.data.data(), residual.data(), out.grad_w.data(), d, n, 1);
    double w2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        out.grad_w[j] = out.grad_w[j] * inv_n + l2 * w[j];
        w2 += w[j] * w[j];
    }
    out.loss = loss + 0.5 * l2 * w2;
    return out;
}

namespace {

LogRegModel train_binary(const FeatureMatrix& x, const std::vector<int>& y,
                         const LogRegConfig& cfg) {
    LogRegModel model;
    model.weights.assign(x.cols, 0.0);
    model.bias = 0.0;

    const int first = y.empty() ? 0 : y.front();
    model.degenerate =
        std::all_of(y.begin(), y.end(), [first](int v) { return v == first; });

    model.loss_curve.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        LossGrad lg = logreg_loss_grad(x, y, model.weights, model.bias, cfg.l2);
        model.loss_curve.push_back(lg.loss);
        for (std::size_t j = 0; j < x.cols; ++j)
            model.weights[j] -= cfg.learning_rate * lg.grad_w[j];
        model.bias -= cfg.learning_rate * lg.grad_b;
    }
    model.final_loss =
        logreg_loss_grad(x, y, model.weights, model.bias, cfg.l2).loss;
    return model;
}

} // namespace

OvrModels train_ovr(const FeatureMatrix& features, const std::vector<graph::ImpactLabel>& labels,
                    const LogRegConfig& config) {
    if (features.rows != labels.size())
        throw std::invalid_argument("train_ovr: feature/label count mismatch");
    if (features.rows == 0) throw std::invalid_argument("train_ovr: empty dataset");
    for (const double v : features.data)
        if (!std::isfinite(v)) throw std::invalid_argument("train_ovr: non-finite feature");

    OvrModels out;
    out.config = config;
    out.feature_mean.assign(features.cols, 0.0);
    out.feature_scale.assign(features.cols, 1.0);

    FeatureMatrix x = features;
    if (config.standardize) {
        for (std::size_t j = 0; j < x.cols; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < x.rows; ++i) mean += x.at(i, j);
            mean /= static_cast<double>(x.rows);
            double var = 0.0;
            for (std::size_t i = 0; i < x.rows; ++i) {
                const double dif = x.at(i, j) - mean;
                var += dif * dif;
            }
            var /= static_cast<double>(x.rows);
            const double sd = std::sqrt(var);
            out.feature_mean[j] = mean;
            out.feature_scale[j] = sd > 0.0 ? sd : 1.0;
            for (std::size_t i = 0; i < x.rows; ++i)
                x.data[i * x.cols + j] = (x.at(i, j) - mean) / out.feature_scale[j];
        }
    }

    for (int label = 0; label < graph::kNumImpactLabels; ++label) {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i)
            y[i] = static_cast<int>(labels[i]) == label ? 1 : 0;
        out.per_label[label] = train_binary(x, y, config);
    }
    return out;
}

std::vector<std::pair<std::size_t, double>> top_coefficients(const LogRegModel& model,
                                                             std::size_t k) {
    std::vector<std::size_t> order(model.weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return model.weights[a] > model.weights[b];
    });
    k = std::min(k, order.size());
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.emplace_back(order[i], model.weights[order[i]]);
    return out;
}

std::array<double, 3> predict(const OvrModels& models, const std::vector<double>& features) {
    std::array<double, 3> scores{};
    for (int label = 0; label < graph::kNumImpactLabels; ++label) {
        const LogRegModel& m = models.per_label[label];
        if (m.weights.size() != features.size())
            throw std::invalid_argument("predict: feature dimension mismatch");
        double z = m.bias;
        for (std::size_t j = 0; j < features.size(); ++j) {
            const double xj = (features[j] - models.feature_mean[j]) / models.feature_scale[j];
            z += m.weights[j] * xj;
        }
        scores[label] = 1.0 / (1.0 + std::exp(-z));
    }
    return scores;
}

} // namespace argmine::patterns
