#pragma once

#include <string>
#include <vector>

#include "negtm/tensor.hpp"

namespace negtm {

// A named view onto one trainable parameter and its gradient accumulator.
struct ParamRef {
    std::string name;
    Tensor2* value = nullptr;
    Tensor2* grad = nullptr;
};

using ParamRegistry = std::vector<ParamRef>;

struct AdamState {
    double lr = 2e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Tensor2> m;   // first moments, one per registry entry
    std::vector<Tensor2> v;   // second moments

    AdamState() = default;
    AdamState(const ParamRegistry& params, double lr_, double b1, double b2, double e);
};

// One Adam update with bias correction. Throws std::runtime_error naming the
// offending parameter if a gradient is non-finite.
void adam_step(const ParamRegistry& params, AdamState& state);

}  // namespace negtm
