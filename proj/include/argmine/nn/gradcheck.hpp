#pragma once

#include "argmine/nn/tape.hpp"

#include <functional>
#include <string>

namespace argmine::nn {

// Builds a scalar loss on the tape from the current store contents. The
// builder must be a pure function of the store (no dropout, no running-stat
// updates) so that repeated evaluation under perturbation is meaningful.
using ScalarBuilder = std::function<Value(Tape&, ParameterStore&)>;

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    std::size_t coords_checked = 0;
};

// Central-difference check of the tape gradient over every coordinate of
// every trainable parameter. Relative error uses an absolute floor of 1e-8
// in the denominator. Throws if the function value is not finite.
GradCheckReport grad_check(const ScalarBuilder& f, ParameterStore& store, double eps = 1e-5);

// Single-coordinate central difference, exposed for negative-control tests.
double fd_gradient(const ScalarBuilder& f, ParameterStore& store, const std::string& name,
                   std::size_t index, double eps = 1e-5);

double relative_error(double analytic, double numeric);

} // namespace argmine::nn
