#include "argmine/harness/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace argmine::harness {

Confusion make_confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("make_confusion: size mismatch");
    Confusion c{};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] > 2 || predicted[i] < 0 || predicted[i] > 2)
            throw std::invalid_argument("make_confusion: label out of range");
        ++c[truth[i]][predicted[i]];
    }
    return c;
}

MacroPrf macro_prf(const Confusion& confusion) {
    std::size_t total = 0;
    for (const auto& row : confusion)
        for (std::size_t v : row) total += v;
    if (total == 0) throw std::invalid_argument("macro_prf: empty confusion matrix");

    MacroPrf out;
    for (int c = 0; c < 3; ++c) {
        std::size_t tp = confusion[c][c];
        std::size_t row_sum = 0, col_sum = 0;
        for (int k = 0; k < 3; ++k) {
            row_sum += confusion[c][k];
            col_sum += confusion[k][c];
        }
        const double p = col_sum == 0 ? 0.0 : static_cast<double>(tp) / col_sum;
        const double r = row_sum == 0 ? 0.0 : static_cast<double>(tp) / row_sum;
        const double f1 = (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
        out.per_class_precision[c] = 100.0 * p;
        out.per_class_recall[c] = 100.0 * r;
        out.per_class_f1[c] = 100.0 * f1;
        out.precision += 100.0 * p / 3.0;
        out.recall += 100.0 * r / 3.0;
        out.f1 += 100.0 * f1 / 3.0;
    }
    return out;
}

MeanStd mean_std(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean_std: empty");
    MeanStd out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() == 1) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return out;
}

} // namespace argmine::harness
