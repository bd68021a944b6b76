#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace argmine::harness {

// confusion[true_label][predicted_label], 3x3.
using Confusion = std::array<std::array<std::size_t, 3>, 3>;

Confusion make_confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

struct MacroPrf {
    double precision = 0.0; // percent
    double recall = 0.0;
    double f1 = 0.0;
    std::array<double, 3> per_class_precision{};
    std::array<double, 3> per_class_recall{};
    std::array<double, 3> per_class_f1{};
};

// Macro-averaged precision/recall/F1 in percent. A class with an empty
// denominator scores 0 for the affected metric; F1 is 0 when P + R is 0.
MacroPrf macro_prf(const Confusion& confusion);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation (n-1); 0 when n == 1
};

MeanStd mean_std(const std::vector<double>& values);

} // namespace argmine::harness
