#pragma once

#include <string>
#include <vector>

#include "negtm/rng.hpp"
#include "negtm/tensor.hpp"

namespace negtm {

enum class Activation { identity, softplus };

double softplus(double x);
double sigmoid(double x);

struct DenseCache {
    Tensor2 input;
    Tensor2 preact;
    bool valid = false;
};

// Fully connected layer, batch-major: y = act(x * W^T + b).
struct DenseLayer {
    Tensor2 weight;   // out x in
    Tensor2 bias;     // 1 x out
    Activation act = Activation::identity;
    Tensor2 grad_weight;
    Tensor2 grad_bias;

    DenseLayer() = default;
    // Glorot-uniform weights, zero bias.
    DenseLayer(int in_dim, int out_dim, Activation a, Rng& rng);

    int in_dim() const { return weight.cols; }
    int out_dim() const { return weight.rows; }

    Tensor2 forward(const Tensor2& x, DenseCache& cache) const;
    // Accumulates grad_weight/grad_bias, returns dL/dx.
    Tensor2 backward(const Tensor2& upstream, const DenseCache& cache);
    void zero_grad();
};

struct BatchNormCache {
    Tensor2 normalized;           // the output y
    std::vector<double> invstd;   // per feature
    bool train = false;
    bool valid = false;
};

// Batch normalization over features (columns), no affine parameters.
struct BatchNorm1d {
    int dim = 0;
    double momentum = 0.99;
    double eps = 1e-5;
    std::vector<double> running_mean;
    std::vector<double> running_var;

    BatchNorm1d() = default;
    explicit BatchNorm1d(int d)
        : dim(d), running_mean(d, 0.0), running_var(d, 1.0) {}

    // train=true normalizes by batch statistics and updates running stats.
    Tensor2 forward(const Tensor2& x, bool train, BatchNormCache& cache);
    Tensor2 backward(const Tensor2& upstream, const BatchNormCache& cache) const;
};

struct DropoutCache {
    Tensor2 mask;   // already scaled by 1/(1-rate)
    bool active = false;
    bool valid = false;
};

// Inverted dropout; identity when rate == 0 or train == false.
struct Dropout {
    double rate = 0.0;

    Tensor2 forward(const Tensor2& x, bool train, Rng& rng, DropoutCache& cache) const;
    Tensor2 backward(const Tensor2& upstream, const DropoutCache& cache) const;
};

}  // namespace negtm
