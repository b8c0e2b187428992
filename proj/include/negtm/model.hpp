#pragma once

#include <optional>
#include <string>
#include <vector>

#include "negtm/adam.hpp"
#include "negtm/corpus.hpp"
#include "negtm/layers.hpp"
#include "negtm/negsampling.hpp"
#include "negtm/rng.hpp"
#include "negtm/tensor.hpp"

namespace negtm {

// prodlda/contextual: xhat = softmax(bn(theta * beta)), unnormalized beta.
// neurallda/gsm: xhat = theta * softmax_rows(bn(beta)) (mixture of topics);
// gsm additionally learns a linear map z -> topic logits.
enum class DecoderVariant { prodlda, neurallda, gsm, contextual };

// What the encoder consumes: the BoW vector, the contextual embedding, or
// their concatenation (combined).
enum class InputKind { bow, contextual, combined };

struct NtmConfig {
    int num_topics = 20;
    int vocab_size = 0;
    int embedding_dim = 0;                   // contextual/combined input
    std::vector<int> encoder_hidden{100, 100};
    DecoderVariant decoder = DecoderVariant::prodlda;
    InputKind input = InputKind::bow;
    bool normalized_bow_input = true;        // feed counts/total instead of raw counts
    int epochs = 100;
    int batch_size = 64;
    uint64_t seed = 1;
    double alpha = 0.02;                     // symmetric Dirichlet prior
    double dropout = 0.2;
    double lr = 2e-3;
    double adam_beta1 = 0.99;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    int input_dim() const;
    void validate() const;
};

struct GaussianPosterior {
    Tensor2 mu;        // batch x T
    Tensor2 log_var;   // batch x T
};

struct LaplacePrior {
    std::vector<double> mean;
    std::vector<double> var;
};

// Symmetric Laplace approximation to Dirichlet(alpha): mean 0,
// var = (T-1)/(alpha*T) per coordinate.
LaplacePrior laplace_prior(int num_topics, double alpha);

// z = mu + exp(log_var / 2) * eps, element-wise.
Tensor2 reparameterize(const GaussianPosterior& post, const Tensor2& eps);

// theta = softmax(z) row-wise.
Tensor2 theta_from_z(const Tensor2& z);

struct ElboParts {
    double rl = 0.0;
    double kl = 0.0;
};

// Per-batch means of L_RL = -sum_w x_w log xhat_w (xhat clamped at 1e-10)
// and the closed-form Gaussian KL against the prior.
ElboParts elbo_loss(const Tensor2& x_count, const Tensor2& xhat, const GaussianPosterior& post,
                    const LaplacePrior& prior);

struct TopicSet {
    std::vector<std::vector<std::string>> topics;   // T ranked word lists
};

struct LossParts {
    double rl = 0.0;
    double kl = 0.0;
    double tl = 0.0;     // triplet (decoder mode)
    double nce = 0.0;    // InfoNCE (encoder mode)
    double total = 0.0;
};

struct EpochStats {
    int epoch = 0;
    LossParts loss;   // averaged over batches
};

struct TrainTrace {
    std::vector<EpochStats> epochs;
};

// One mini-batch as the model consumes it.
struct TrainBatch {
    Tensor2 x_in;        // encoder input (dim depends on InputKind)
    Tensor2 x_count;     // reconstruction target, raw BoW counts (batch x V)
    Tensor2 x_bow;       // triplet positive, normalized BoW (batch x V)
    Tensor2 x_pos;       // encoder-mode positive sample inputs (optional)
    Tensor2 x_neg;       // encoder-mode negative sample inputs (optional)
};

// Everything a training corpus provides to `train`.
struct TrainData {
    Tensor2 x_in;
    Tensor2 x_count;
    Tensor2 x_bow;
    Tensor2 x_tfidf;     // only required for encoder sampling
};

class NtmModel {
public:
    NtmModel(const NtmConfig& config, const NegSamplingConfig& sampling);

    const NtmConfig& config() const { return config_; }
    const NegSamplingConfig& sampling() const { return sampling_; }

    // Forward-only pieces (no gradient accumulation).
    GaussianPosterior encode(const Tensor2& x_in, bool train_mode = false);
    Tensor2 decode(const Tensor2& theta, bool train_mode = false);
    // Deterministic inference: theta = softmax(mu) (gsm: softmax of its
    // learned projection of mu), running batch-norm statistics.
    Tensor2 infer_theta(const Tensor2& x_in);

    // Full loss + gradient accumulation for one batch. `eps` is the frozen
    // reparameterization noise (batch x T). Dropout draws from `rng` when
    // train_mode is set and the rate is nonzero.
    LossParts forward_backward(const TrainBatch& batch, const Tensor2& eps, bool train_mode,
                               Rng& rng, bool accumulate = true);
    // Loss only, no gradient writes; used by the finite-difference oracle.
    LossParts forward_loss(const TrainBatch& batch, const Tensor2& eps, bool train_mode,
                           Rng& rng);

    TrainTrace train(const TrainData& data);

    TopicSet top_words(int t, const Vocabulary& vocab) const;
    const Tensor2& beta() const { return beta_; }

    ParamRegistry params();
    void zero_grad();

    void save_checkpoint(const std::string& path) const;
    void load_checkpoint(const std::string& path);

private:
    struct EncoderPass;
    struct StepState;

    GaussianPosterior encode_impl(const Tensor2& x_in, bool train_mode, Rng& rng,
                                  EncoderPass& pass);
    Tensor2 encoder_backward(const Tensor2& dmu, const Tensor2& dlogvar, EncoderPass& pass);

    NtmConfig config_;
    NegSamplingConfig sampling_;
    LaplacePrior prior_;
    Rng rng_;

    std::vector<DenseLayer> hidden_;
    Dropout dropout_;
    DenseLayer mu_head_;
    DenseLayer logvar_head_;
    BatchNorm1d mu_bn_;
    BatchNorm1d logvar_bn_;
    Tensor2 beta_;          // T x V
    Tensor2 grad_beta_;
    BatchNorm1d beta_bn_;   // over V features
    DenseLayer gsm_proj_;   // gsm only: z -> topic logits
};

void save_topics_json(const TopicSet& topics, const std::string& path);
void save_theta_tsv(const Tensor2& theta, const std::vector<int>& doc_ids,
                    const std::string& path);

}  // namespace negtm
