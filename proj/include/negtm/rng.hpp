#pragma once

#include <cstdint>
#include <random>

#include "negtm/tensor.hpp"

namespace negtm {

// Seeded random source. A single training run owns exactly one Rng so that
// a seed fixes the whole parameter/noise/shuffle stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    Tensor2 normal_tensor(int rows, int cols) {
        Tensor2 t(rows, cols);
        for (double& v : t.data) v = normal();
        return t;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace negtm
