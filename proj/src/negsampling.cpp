#include "negtm/negsampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace negtm {

void NegSamplingConfig::validate(int num_topics) const {
    if (mode == SamplingMode::none) return;
    if (mode == SamplingMode::decoder) {
        if (top_topics < 1 || top_topics >= num_topics)
            throw std::invalid_argument("NegSamplingConfig: require 1 <= M < T");
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw std::invalid_argument("NegSamplingConfig: require 0 < lambda <= 1");
        if (!(margin > 0.0)) throw std::invalid_argument("NegSamplingConfig: require margin > 0");
    } else {
        if (salient_words < 0)
            throw std::invalid_argument("NegSamplingConfig: require k >= 0");
        if (!(eta > 0.0)) throw std::invalid_argument("NegSamplingConfig: require eta > 0");
    }
}

namespace {

std::vector<int> top_m_indices(const std::vector<double>& theta, int m) {
    std::vector<int> order(theta.size());
    std::iota(order.begin(), order.end(), 0);
    // ties to the lower index
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return theta[a] > theta[b]; });
    order.resize(m);
    return order;
}

}  // namespace

PerturbResult perturb_theta(const std::vector<double>& theta, int top_topics) {
    int t = static_cast<int>(theta.size());
    if (top_topics < 1 || top_topics >= t)
        throw std::invalid_argument("perturb_theta: require 1 <= M < T");
    PerturbResult res;
    res.zeroed = top_m_indices(theta, top_topics);
    res.theta_neg = theta;
    for (int i : res.zeroed) res.theta_neg[i] = 0.0;
    double sum = std::accumulate(res.theta_neg.begin(), res.theta_neg.end(), 0.0);
    if (sum < 1e-12) {
        res.degenerate = true;
        std::vector<char> is_zeroed(t, 0);
        for (int i : res.zeroed) is_zeroed[i] = 1;
        double u = 1.0 / (t - top_topics);
        for (int i = 0; i < t; ++i) res.theta_neg[i] = is_zeroed[i] ? 0.0 : u;
    } else {
        for (double& v : res.theta_neg) v /= sum;
    }
    return res;
}

PerturbBatch perturb_theta_rows(const Tensor2& theta, int top_topics) {
    PerturbBatch batch;
    batch.theta_neg = Tensor2(theta.rows, theta.cols);
    batch.zeroed.resize(theta.rows);
    batch.degenerate.resize(theta.rows, 0);
    std::vector<double> row(theta.cols);
    for (int r = 0; r < theta.rows; ++r) {
        for (int c = 0; c < theta.cols; ++c) row[c] = theta(r, c);
        PerturbResult res = perturb_theta(row, top_topics);
        for (int c = 0; c < theta.cols; ++c) batch.theta_neg(r, c) = res.theta_neg[c];
        batch.zeroed[r] = std::move(res.zeroed);
        batch.degenerate[r] = res.degenerate ? 1 : 0;
    }
    return batch;
}

Tensor2 perturb_theta_backward(const Tensor2& upstream, const Tensor2& theta,
                               const PerturbBatch& fwd) {
    Tensor2 dtheta(theta.rows, theta.cols);
    for (int r = 0; r < theta.rows; ++r) {
        if (fwd.degenerate[r]) continue;
        std::vector<char> masked(theta.cols, 0);
        double sum = 0.0;
        for (int c = 0; c < theta.cols; ++c) sum += theta(r, c);
        for (int i : fwd.zeroed[r]) {
            masked[i] = 1;
            sum -= theta(r, i);
        }
        double dot = 0.0;   // upstream . theta_neg over the kept support
        for (int c = 0; c < theta.cols; ++c)
            if (!masked[c]) dot += upstream(r, c) * fwd.theta_neg(r, c);
        for (int c = 0; c < theta.cols; ++c)
            if (!masked[c]) dtheta(r, c) = (upstream(r, c) - dot) / sum;
    }
    return dtheta;
}

double triplet_loss(const std::vector<double>& xhat, const std::vector<double>& x_bow,
                    const std::vector<double>& xhat_neg, double margin) {
    if (xhat.size() != x_bow.size() || xhat.size() != xhat_neg.size())
        throw std::invalid_argument("triplet_loss: length mismatch");
    double d_pos = 0.0, d_neg = 0.0;
    for (size_t i = 0; i < xhat.size(); ++i) {
        double a = xhat[i] - x_bow[i];
        double b = xhat[i] - xhat_neg[i];
        d_pos += a * a;
        d_neg += b * b;
    }
    return std::max(std::sqrt(d_pos) - std::sqrt(d_neg) + margin, 0.0);
}

double combined_loss(double rl, double kl, double tl, double lambda) {
    return rl + kl + lambda * tl;
}

std::pair<std::vector<double>, std::vector<double>> make_encoder_samples(
    const std::vector<double>& x_tfidf, int k) {
    std::vector<int> nonzero;
    for (size_t i = 0; i < x_tfidf.size(); ++i)
        if (x_tfidf[i] != 0.0) nonzero.push_back(static_cast<int>(i));
    if (k < 0 || k >= static_cast<int>(nonzero.size()))
        throw std::invalid_argument("make_encoder_samples: k must satisfy 0 <= k < nnz");
    if (k == 0) return {x_tfidf, x_tfidf};

    double mass = std::accumulate(x_tfidf.begin(), x_tfidf.end(), 0.0);
    auto zero_and_rescale = [&](const std::vector<int>& drop) {
        std::vector<double> out = x_tfidf;
        for (int i : drop) out[i] = 0.0;
        double rem = std::accumulate(out.begin(), out.end(), 0.0);
        if (rem > 0.0)
            for (double& v : out) v *= mass / rem;
        return out;
    };

    std::vector<int> by_value = nonzero;
    std::stable_sort(by_value.begin(), by_value.end(),
                     [&](int a, int b) { return x_tfidf[a] > x_tfidf[b]; });
    std::vector<int> largest(by_value.begin(), by_value.begin() + k);
    std::vector<int> smallest(by_value.end() - k, by_value.end());
    return {zero_and_rescale(smallest), zero_and_rescale(largest)};
}

double infonce_loss(const std::vector<double>& z, const std::vector<double>& z_pos,
                    const std::vector<double>& z_neg, double eta) {
    if (z.size() != z_pos.size() || z.size() != z_neg.size())
        throw std::invalid_argument("infonce_loss: length mismatch");
    double a = 0.0, b = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        a += z[i] * z_pos[i];
        b += z[i] * z_neg[i];
    }
    // -log(exp(a) / (exp(a) + eta exp(b))) = log(1 + eta exp(b - a))
    double d = b - a + std::log(eta);
    if (d > 30.0) return d;
    return std::log1p(std::exp(d));
}

}  // namespace negtm
