#include "argmine/nn/gradcheck.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace argmine::nn {

namespace {

double eval_scalar(const ScalarBuilder& f, ParameterStore& store) {
    Tape t;
    Value v = f(t, store);
    const double y = t.val(v).item();
    if (!std::isfinite(y)) throw std::runtime_error("grad_check: non-finite function value");
    return y;
}

} // namespace

double relative_error(double analytic, double numeric) {
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
    return std::fabs(analytic - numeric) / denom;
}

double fd_gradient(const ScalarBuilder& f, ParameterStore& store, const std::string& name,
                   std::size_t index, double eps) {
    Tensor& value = store.value(name);
    const double saved = value[index];
    value[index] = saved + eps;
    const double up = eval_scalar(f, store);
    value[index] = saved - eps;
    const double down = eval_scalar(f, store);
    value[index] = saved;
    return (up - down) / (2.0 * eps);
}

GradCheckReport grad_check(const ScalarBuilder& f, ParameterStore& store, double eps) {
    store.zero_grads();
    {
        Tape t;
        Value loss = f(t, store);
        if (!std::isfinite(t.val(loss).item()))
            throw std::runtime_error("grad_check: non-finite function value");
        t.backward(loss);
    }
    std::map<std::string, Tensor> analytic;
    for (const auto& [name, entry] : store)
        if (entry.trainable) analytic.emplace(name, entry.grad);

    GradCheckReport report;
    for (const auto& [name, grad] : analytic) {
        for (std::size_t i = 0; i < grad.size(); ++i) {
            const double numeric = fd_gradient(f, store, name, i, eps);
            const double err = relative_error(grad[i], numeric);
            ++report.coords_checked;
            if (err > report.max_rel_err) {
                report.max_rel_err = err;
                report.worst_param = name;
                report.worst_index = i;
                report.analytic_at_worst = grad[i];
                report.numeric_at_worst = numeric;
            }
        }
    }
    return report;
}

} // namespace argmine::nn
