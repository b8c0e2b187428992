#include "negtm/layers.hpp"

#include <cmath>

namespace negtm {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

DenseLayer::DenseLayer(int in_dim, int out_dim, Activation a, Rng& rng)
    : weight(out_dim, in_dim),
      bias(1, out_dim),
      act(a),
      grad_weight(out_dim, in_dim),
      grad_bias(1, out_dim) {
    double limit = std::sqrt(6.0 / (in_dim + out_dim));
    for (double& w : weight.data) w = rng.uniform(-limit, limit);
}

Tensor2 DenseLayer::forward(const Tensor2& x, DenseCache& cache) const {
    if (x.cols != weight.cols)
        throw std::invalid_argument("DenseLayer::forward: input dim " + std::to_string(x.cols) +
                                    " != layer in dim " + std::to_string(weight.cols));
    Tensor2 pre = matmul_nt(x, weight);
    for (int r = 0; r < pre.rows; ++r)
        for (int c = 0; c < pre.cols; ++c) pre(r, c) += bias(0, c);
    cache.input = x;
    cache.preact = pre;
    cache.valid = true;
    if (act == Activation::identity) return pre;
    Tensor2 out(pre.rows, pre.cols);
    for (size_t i = 0; i < pre.size(); ++i) out.data[i] = softplus(pre.data[i]);
    return out;
}

Tensor2 DenseLayer::backward(const Tensor2& upstream, const DenseCache& cache) {
    if (!cache.valid) throw std::logic_error("DenseLayer::backward called before forward");
    Tensor2 dpre = upstream;
    if (act == Activation::softplus) {
        for (size_t i = 0; i < dpre.size(); ++i) dpre.data[i] *= sigmoid(cache.preact.data[i]);
    }
    add_matmul_tn(grad_weight, dpre, cache.input);
    for (int r = 0; r < dpre.rows; ++r)
        for (int c = 0; c < dpre.cols; ++c) grad_bias(0, c) += dpre(r, c);
    return matmul(dpre, weight);
}

void DenseLayer::zero_grad() {
    grad_weight.fill(0.0);
    grad_bias.fill(0.0);
}

Tensor2 BatchNorm1d::forward(const Tensor2& x, bool train, BatchNormCache& cache) {
    if (x.cols != dim) throw std::invalid_argument("BatchNorm1d: feature dim mismatch");
    Tensor2 out(x.rows, x.cols);
    cache.invstd.assign(dim, 0.0);
    cache.train = train;
    if (train) {
        int n = x.rows;
        for (int c = 0; c < dim; ++c) {
            double mean = 0.0;
            for (int r = 0; r < n; ++r) mean += x(r, c);
            mean /= n;
            double var = 0.0;
            for (int r = 0; r < n; ++r) {
                double d = x(r, c) - mean;
                var += d * d;
            }
            var /= n;
            double invstd = 1.0 / std::sqrt(var + eps);
            cache.invstd[c] = invstd;
            for (int r = 0; r < n; ++r) out(r, c) = (x(r, c) - mean) * invstd;
            running_mean[c] = momentum * running_mean[c] + (1.0 - momentum) * mean;
            running_var[c] = momentum * running_var[c] + (1.0 - momentum) * var;
        }
    } else {
        for (int c = 0; c < dim; ++c) {
            double invstd = 1.0 / std::sqrt(running_var[c] + eps);
            cache.invstd[c] = invstd;
            for (int r = 0; r < x.rows; ++r) out(r, c) = (x(r, c) - running_mean[c]) * invstd;
        }
    }
    cache.normalized = out;
    cache.valid = true;
    return out;
}

Tensor2 BatchNorm1d::backward(const Tensor2& upstream, const BatchNormCache& cache) const {
    if (!cache.valid) throw std::logic_error("BatchNorm1d::backward called before forward");
    if (!upstream.same_shape(cache.normalized))
        throw std::invalid_argument("BatchNorm1d::backward: shape mismatch");
    int n = upstream.rows;
    Tensor2 dx(n, dim);
    if (!cache.train) {
        for (int c = 0; c < dim; ++c)
            for (int r = 0; r < n; ++r) dx(r, c) = upstream(r, c) * cache.invstd[c];
        return dx;
    }
    const Tensor2& y = cache.normalized;
    for (int c = 0; c < dim; ++c) {
        double sum_dy = 0.0, sum_dyy = 0.0;
        for (int r = 0; r < n; ++r) {
            sum_dy += upstream(r, c);
            sum_dyy += upstream(r, c) * y(r, c);
        }
        double invstd_n = cache.invstd[c] / n;
        for (int r = 0; r < n; ++r)
            dx(r, c) = invstd_n * (n * upstream(r, c) - sum_dy - y(r, c) * sum_dyy);
    }
    return dx;
}

Tensor2 Dropout::forward(const Tensor2& x, bool train, Rng& rng, DropoutCache& cache) const {
    cache.valid = true;
    if (!train || rate <= 0.0) {
        cache.active = false;
        return x;
    }
    cache.active = true;
    cache.mask = Tensor2(x.rows, x.cols);
    double keep = 1.0 - rate;
    Tensor2 out(x.rows, x.cols);
    for (size_t i = 0; i < x.size(); ++i) {
        double m = rng.uniform(0.0, 1.0) < keep ? 1.0 / keep : 0.0;
        cache.mask.data[i] = m;
        out.data[i] = x.data[i] * m;
    }
    return out;
}

Tensor2 Dropout::backward(const Tensor2& upstream, const DropoutCache& cache) const {
    if (!cache.valid) throw std::logic_error("Dropout::backward called before forward");
    if (!cache.active) return upstream;
    Tensor2 dx(upstream.rows, upstream.cols);
    for (size_t i = 0; i < upstream.size(); ++i) dx.data[i] = upstream.data[i] * cache.mask.data[i];
    return dx;
}

}  // namespace negtm
