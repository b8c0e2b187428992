#pragma once

#include <utility>
#include <vector>

#include "negtm/tensor.hpp"

namespace negtm {

enum class SamplingMode { none, decoder, encoder };

struct NegSamplingConfig {
    SamplingMode mode = SamplingMode::none;
    int top_topics = 1;        // M, decoder mode: topics zeroed out of theta
    double lambda = 0.5;       // triplet-loss weight
    double margin = 1.0;       // triplet margin m
    int salient_words = 5;     // k, encoder mode: tf-idf entries zeroed
    double eta = 0.5;          // hardness of the negative InfoNCE term
    bool stop_gradient = false;  // cut the theta_neg branch out of backprop

    // Throws std::invalid_argument if a field is outside its range
    // (1 <= M < T, 0 < lambda <= 1, margin > 0, eta > 0).
    void validate(int num_topics) const;
};

struct PerturbResult {
    std::vector<double> theta_neg;
    std::vector<int> zeroed;     // indices of the former top-M entries
    bool degenerate = false;     // all mass was in the top M; fell back to
                                 // uniform over the complement
};

// Zero the M largest entries of theta (ties to the lower index) and
// renormalize the remainder to sum 1.
PerturbResult perturb_theta(const std::vector<double>& theta, int top_topics);

// Row-wise perturbation of a batch of thetas.
struct PerturbBatch {
    Tensor2 theta_neg;
    std::vector<std::vector<int>> zeroed;
    std::vector<char> degenerate;
};
PerturbBatch perturb_theta_rows(const Tensor2& theta, int top_topics);

// Backward through theta_neg = mask * theta / sum(mask * theta). Degenerate
// rows pass no gradient (the fallback is constant in theta).
Tensor2 perturb_theta_backward(const Tensor2& upstream, const Tensor2& theta,
                               const PerturbBatch& fwd);

// max(||xhat - x_bow||_2 - ||xhat - xhat_neg||_2 + margin, 0)
double triplet_loss(const std::vector<double>& xhat, const std::vector<double>& x_bow,
                    const std::vector<double>& xhat_neg, double margin);

// L_RL + L_KL + lambda * L_TL
double combined_loss(double rl, double kl, double tl, double lambda);

// x_minus: k largest entries zeroed; x_plus: k smallest nonzero entries
// zeroed; both renormalized to the input's L1 mass. k == 0 returns copies.
std::pair<std::vector<double>, std::vector<double>> make_encoder_samples(
    const std::vector<double>& x_tfidf, int k);

// -log( exp(z.z+) / (exp(z.z+) + eta * exp(z.z-)) ), evaluated in log space.
double infonce_loss(const std::vector<double>& z, const std::vector<double>& z_pos,
                    const std::vector<double>& z_neg, double eta);

}  // namespace negtm
