#include "argmine/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace argmine::nn {

void Adam::step(ParameterStore& store, double lr) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (auto& [name, entry] : store) {
        if (!entry.trainable) continue;
        if (!entry.grad.same_shape(entry.value))
            throw std::logic_error("Adam: gradient shape mismatch for " + name);
        auto it = moments_.find(name);
        if (it == moments_.end()) {
            Moments mo;
            mo.m = Tensor(entry.value.shape());
            mo.v = Tensor(entry.value.shape());
            it = moments_.emplace(name, std::move(mo)).first;
        }
        Tensor& m = it->second.m;
        Tensor& v = it->second.v;
        if (!m.same_shape(entry.value))
            throw std::logic_error("Adam: moment shape mismatch for " + name);
        for (std::size_t i = 0; i < entry.value.size(); ++i) {
            const double g = entry.grad[i];
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            entry.value[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

double LrSchedule::at(std::size_t step) const {
    if (step > total_steps) throw std::out_of_range("LrSchedule: step out of range");
    if (total_steps == 0) return 0.0;
    const std::size_t w = warmup_steps();
    if (step <= w)
        return w == 0 ? peak : peak * static_cast<double>(step) / static_cast<double>(w);
    return peak * static_cast<double>(total_steps - step) /
           static_cast<double>(total_steps - w);
}

} // namespace argmine::nn
