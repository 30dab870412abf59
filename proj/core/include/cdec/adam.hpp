#pragma once

#include <cstdint>

#include "cdec/params.hpp"

namespace cdec {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;  // throws ConfigError
};

// Standard Adam with bias correction. Moment buffers are created on the
// first step and keyed by parameter name; the parameter set must keep the
// same names and shapes across steps.
class AdamOptimizer {
public:
    explicit AdamOptimizer(AdamConfig cfg);

    void step(ParamSet& params, const ParamSet& grads);

    std::uint64_t step_count() const { return t_; }

private:
    AdamConfig cfg_;
    ParamSet m_;
    ParamSet v_;
    std::uint64_t t_ = 0;
};

}  // namespace cdec
