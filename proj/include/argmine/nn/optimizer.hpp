#pragma once

#include "argmine/nn/params.hpp"

#include <map>
#include <string>

namespace argmine::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam over the trainable entries of a ParameterStore.
// Moment buffers are created lazily on first sight of a parameter.
class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

    void step(ParameterStore& store, double lr);

    std::size_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

private:
    struct Moments {
        Tensor m;
        Tensor v;
    };

    AdamConfig cfg_;
    std::size_t step_ = 0;
    std::map<std::string, Moments> moments_;
};

// Piecewise-linear learning-rate schedule: 0 -> peak over the first
// ceil(warmup_frac * total) steps, then peak -> 0 at `total`.
struct LrSchedule {
    double peak = 1e-3;
    std::size_t total_steps = 0;
    double warmup_frac = 0.06;

    std::size_t warmup_steps() const {
        return static_cast<std::size_t>(
            std::ceil(warmup_frac * static_cast<double>(total_steps)));
    }

    double at(std::size_t step) const;
};

} // namespace argmine::nn
