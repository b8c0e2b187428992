#include "negtm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace negtm {

int NtmConfig::input_dim() const {
    switch (input) {
        case InputKind::bow: return vocab_size;
        case InputKind::contextual: return embedding_dim;
        case InputKind::combined: return vocab_size + embedding_dim;
    }
    return 0;
}

void NtmConfig::validate() const {
    if (num_topics < 2) throw std::invalid_argument("NtmConfig: num_topics must be >= 2");
    if (vocab_size < 1) throw std::invalid_argument("NtmConfig: vocab_size must be >= 1");
    if (epochs < 1) throw std::invalid_argument("NtmConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("NtmConfig: batch_size must be >= 1");
    if (alpha <= 0.0) throw std::invalid_argument("NtmConfig: alpha must be > 0");
    if (input != InputKind::bow && embedding_dim < 1)
        throw std::invalid_argument("NtmConfig: contextual input requires embedding_dim >= 1");
    if (encoder_hidden.empty())
        throw std::invalid_argument("NtmConfig: need at least one hidden layer");
}

LaplacePrior laplace_prior(int num_topics, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("laplace_prior: alpha must be > 0");
    LaplacePrior prior;
    prior.mean.assign(num_topics, 0.0);
    prior.var.assign(num_topics, (num_topics - 1.0) / (alpha * num_topics));
    return prior;
}

Tensor2 reparameterize(const GaussianPosterior& post, const Tensor2& eps) {
    if (!post.mu.same_shape(eps) || !post.log_var.same_shape(eps))
        throw std::invalid_argument("reparameterize: shape mismatch");
    Tensor2 z(eps.rows, eps.cols);
    for (size_t i = 0; i < z.size(); ++i)
        z.data[i] = post.mu.data[i] + std::exp(0.5 * post.log_var.data[i]) * eps.data[i];
    return z;
}

Tensor2 theta_from_z(const Tensor2& z) { return softmax_rows(z); }

ElboParts elbo_loss(const Tensor2& x_count, const Tensor2& xhat, const GaussianPosterior& post,
                    const LaplacePrior& prior) {
    if (!x_count.same_shape(xhat)) throw std::invalid_argument("elbo_loss: shape mismatch");
    int n = x_count.rows;
    ElboParts parts;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < x_count.cols; ++c)
            if (x_count(r, c) != 0.0)
                parts.rl -= x_count(r, c) * std::log(std::max(xhat(r, c), 1e-10));
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < post.mu.cols; ++c) {
            double var = std::exp(post.log_var(r, c));
            double dmu = post.mu(r, c) - prior.mean[c];
            parts.kl += 0.5 * (std::log(prior.var[c]) - post.log_var(r, c) +
                               (var + dmu * dmu) / prior.var[c] - 1.0);
        }
    }
    parts.rl /= n;
    parts.kl /= n;
    return parts;
}

struct NtmModel::EncoderPass {
    std::vector<DenseCache> hidden;
    DropoutCache drop;
    DenseCache mu, logvar;
    BatchNormCache bn_mu, bn_logvar;
    Tensor2 mu_out, logvar_out;
};

NtmModel::NtmModel(const NtmConfig& config, const NegSamplingConfig& sampling)
    : config_(config),
      sampling_(sampling),
      prior_(laplace_prior(config.num_topics, config.alpha)),
      rng_(config.seed) {
    config_.validate();
    sampling_.validate(config_.num_topics);
    if (sampling_.mode == SamplingMode::encoder && config_.input == InputKind::contextual)
        throw std::invalid_argument("encoder sampling requires a BoW input channel");

    int in = config_.input_dim();
    for (int width : config_.encoder_hidden) {
        hidden_.emplace_back(in, width, Activation::softplus, rng_);
        in = width;
    }
    dropout_.rate = config_.dropout;
    mu_head_ = DenseLayer(in, config_.num_topics, Activation::identity, rng_);
    logvar_head_ = DenseLayer(in, config_.num_topics, Activation::identity, rng_);
    mu_bn_ = BatchNorm1d(config_.num_topics);
    logvar_bn_ = BatchNorm1d(config_.num_topics);

    beta_ = Tensor2(config_.num_topics, config_.vocab_size);
    grad_beta_ = Tensor2(config_.num_topics, config_.vocab_size);
    double limit = std::sqrt(6.0 / (config_.num_topics + config_.vocab_size));
    for (double& w : beta_.data) w = rng_.uniform(-limit, limit);
    beta_bn_ = BatchNorm1d(config_.vocab_size);

    if (config_.decoder == DecoderVariant::gsm)
        gsm_proj_ = DenseLayer(config_.num_topics, config_.num_topics, Activation::identity, rng_);
}

GaussianPosterior NtmModel::encode_impl(const Tensor2& x_in, bool train_mode, Rng& rng,
                                        EncoderPass& pass) {
    if (x_in.cols != config_.input_dim())
        throw std::invalid_argument("encode: input dim " + std::to_string(x_in.cols) +
                                    " != expected " + std::to_string(config_.input_dim()));
    pass.hidden.resize(hidden_.size());
    Tensor2 h = x_in;
    for (size_t i = 0; i < hidden_.size(); ++i) h = hidden_[i].forward(h, pass.hidden[i]);
    h = dropout_.forward(h, train_mode, rng, pass.drop);
    Tensor2 mu_pre = mu_head_.forward(h, pass.mu);
    Tensor2 lv_pre = logvar_head_.forward(h, pass.logvar);
    pass.mu_out = mu_bn_.forward(mu_pre, train_mode, pass.bn_mu);
    pass.logvar_out = logvar_bn_.forward(lv_pre, train_mode, pass.bn_logvar);
    return GaussianPosterior{pass.mu_out, pass.logvar_out};
}

Tensor2 NtmModel::encoder_backward(const Tensor2& dmu, const Tensor2& dlogvar, EncoderPass& pass) {
    Tensor2 dmu_pre = mu_bn_.backward(dmu, pass.bn_mu);
    Tensor2 dlv_pre = logvar_bn_.backward(dlogvar, pass.bn_logvar);
    Tensor2 dh = mu_head_.backward(dmu_pre, pass.mu);
    Tensor2 dh2 = logvar_head_.backward(dlv_pre, pass.logvar);
    for (size_t i = 0; i < dh.size(); ++i) dh.data[i] += dh2.data[i];
    dh = dropout_.backward(dh, pass.drop);
    for (size_t i = hidden_.size(); i-- > 0;) dh = hidden_[i].backward(dh, pass.hidden[i]);
    return dh;
}

GaussianPosterior NtmModel::encode(const Tensor2& x_in, bool train_mode) {
    EncoderPass pass;
    return encode_impl(x_in, train_mode, rng_, pass);
}

Tensor2 NtmModel::decode(const Tensor2& theta, bool train_mode) {
    if (theta.cols != config_.num_topics)
        throw std::invalid_argument("decode: theta dim mismatch");
    BatchNormCache bn;
    if (config_.decoder == DecoderVariant::prodlda ||
        config_.decoder == DecoderVariant::contextual) {
        Tensor2 logits = matmul(theta, beta_);
        return softmax_rows(beta_bn_.forward(logits, train_mode, bn));
    }
    Tensor2 topic_rows = softmax_rows(beta_bn_.forward(beta_, train_mode, bn));
    return matmul(theta, topic_rows);
}

Tensor2 NtmModel::infer_theta(const Tensor2& x_in) {
    GaussianPosterior post = encode(x_in, /*train_mode=*/false);
    if (config_.decoder == DecoderVariant::gsm) {
        DenseCache cache;
        return softmax_rows(gsm_proj_.forward(post.mu, cache));
    }
    return softmax_rows(post.mu);
}

namespace {

// dL/dxhat from L_RL = (1/n) sum_docs -sum_w x_w log(max(xhat_w, 1e-10)).
void add_recon_grad(Tensor2& dxhat, const Tensor2& x_count, const Tensor2& xhat) {
    double inv_n = 1.0 / x_count.rows;
    for (size_t i = 0; i < xhat.size(); ++i) {
        if (x_count.data[i] != 0.0 && xhat.data[i] > 1e-10)
            dxhat.data[i] -= inv_n * x_count.data[i] / xhat.data[i];
    }
}

double row_distance(const Tensor2& a, const Tensor2& b, int r) {
    double s = 0.0;
    for (int c = 0; c < a.cols; ++c) {
        double d = a(r, c) - b(r, c);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

LossParts NtmModel::forward_backward(const TrainBatch& batch, const Tensor2& eps, bool train_mode,
                                     Rng& rng, bool accumulate) {
    int n = batch.x_in.rows;
    int t = config_.num_topics;
    bool mixture = config_.decoder == DecoderVariant::neurallda ||
                   config_.decoder == DecoderVariant::gsm;

    EncoderPass enc;
    GaussianPosterior post = encode_impl(batch.x_in, train_mode, rng, enc);
    Tensor2 z = reparameterize(post, eps);

    DenseCache gsm_cache;
    Tensor2 theta;
    if (config_.decoder == DecoderVariant::gsm)
        theta = softmax_rows(gsm_proj_.forward(z, gsm_cache));
    else
        theta = softmax_rows(z);

    // Decoder forward. Mixture variants share one row-softmaxed topic matrix
    // between the positive and negative paths; prodlda-style variants batch-
    // normalize each path's logits separately.
    BatchNormCache bn_mix, bn_pos, bn_neg;
    Tensor2 topic_rows;                 // mixture: softmax_rows(bn(beta))
    Tensor2 logits_pos, xhat;
    if (mixture) {
        topic_rows = softmax_rows(beta_bn_.forward(beta_, train_mode, bn_mix));
        xhat = matmul(theta, topic_rows);
    } else {
        logits_pos = matmul(theta, beta_);
        xhat = softmax_rows(beta_bn_.forward(logits_pos, train_mode, bn_pos));
    }

    LossParts parts;
    ElboParts elbo = elbo_loss(batch.x_count, xhat, post, prior_);
    parts.rl = elbo.rl;
    parts.kl = elbo.kl;

    PerturbBatch perturb;
    Tensor2 xhat_neg, logits_neg;
    std::vector<char> hinge_active(n, 0);
    if (sampling_.mode == SamplingMode::decoder) {
        perturb = perturb_theta_rows(theta, sampling_.top_topics);
        if (mixture) {
            xhat_neg = matmul(perturb.theta_neg, topic_rows);
        } else {
            logits_neg = matmul(perturb.theta_neg, beta_);
            xhat_neg = softmax_rows(beta_bn_.forward(logits_neg, train_mode, bn_neg));
        }
        for (int r = 0; r < n; ++r) {
            double d_pos = row_distance(xhat, batch.x_bow, r);
            double d_neg = row_distance(xhat, xhat_neg, r);
            double hinge = d_pos - d_neg + sampling_.margin;
            if (hinge > 0.0) {
                hinge_active[r] = 1;
                parts.tl += hinge;
            }
        }
        parts.tl /= n;
    }

    // Encoder sampling: two extra encoder passes sharing the main noise.
    EncoderPass enc_pos, enc_neg;
    Tensor2 z_pos, z_neg;
    std::vector<double> nce_sigmoid(n, 0.0);
    if (sampling_.mode == SamplingMode::encoder) {
        GaussianPosterior p_pos = encode_impl(batch.x_pos, train_mode, rng, enc_pos);
        GaussianPosterior p_neg = encode_impl(batch.x_neg, train_mode, rng, enc_neg);
        z_pos = reparameterize(p_pos, eps);
        z_neg = reparameterize(p_neg, eps);
        double log_eta = std::log(sampling_.eta);
        for (int r = 0; r < n; ++r) {
            double a = 0.0, b = 0.0;
            for (int c = 0; c < t; ++c) {
                a += z(r, c) * z_pos(r, c);
                b += z(r, c) * z_neg(r, c);
            }
            double d = b - a + log_eta;
            parts.nce += d > 30.0 ? d : std::log1p(std::exp(d));
            nce_sigmoid[r] = sigmoid(d);
        }
        parts.nce /= n;
    }

    parts.total = parts.rl + parts.kl + sampling_.lambda * parts.tl + parts.nce;

    if (!accumulate) return parts;

    // ----- backward -----
    Tensor2 dxhat(n, xhat.cols), dxhat_neg;
    add_recon_grad(dxhat, batch.x_count, xhat);

    if (sampling_.mode == SamplingMode::decoder) {
        dxhat_neg = Tensor2(n, xhat.cols);
        double w = sampling_.lambda / n;
        for (int r = 0; r < n; ++r) {
            if (!hinge_active[r]) continue;
            double d_pos = std::max(row_distance(xhat, batch.x_bow, r), 1e-12);
            double d_neg = std::max(row_distance(xhat, xhat_neg, r), 1e-12);
            for (int c = 0; c < xhat.cols; ++c) {
                double gp = (xhat(r, c) - batch.x_bow(r, c)) / d_pos;
                double gn = (xhat(r, c) - xhat_neg(r, c)) / d_neg;
                dxhat(r, c) += w * (gp - gn);
                dxhat_neg(r, c) += w * gn;
            }
        }
    }

    Tensor2 dtheta(n, t);
    if (mixture) {
        Tensor2 dtopic_rows = matmul_tn(theta, dxhat);
        dtheta = matmul_nt(dxhat, topic_rows);
        if (sampling_.mode == SamplingMode::decoder) {
            add_matmul_tn(dtopic_rows, perturb.theta_neg, dxhat_neg);
            Tensor2 dtheta_neg = matmul_nt(dxhat_neg, topic_rows);
            if (!sampling_.stop_gradient) {
                Tensor2 back = perturb_theta_backward(dtheta_neg, theta, perturb);
                for (size_t i = 0; i < dtheta.size(); ++i) dtheta.data[i] += back.data[i];
            }
        }
        Tensor2 dbn = softmax_rows_backward(dtopic_rows, topic_rows);
        Tensor2 dbeta = beta_bn_.backward(dbn, bn_mix);
        for (size_t i = 0; i < dbeta.size(); ++i) grad_beta_.data[i] += dbeta.data[i];
    } else {
        Tensor2 dlogits = beta_bn_.backward(softmax_rows_backward(dxhat, xhat), bn_pos);
        dtheta = matmul_nt(dlogits, beta_);
        add_matmul_tn(grad_beta_, theta, dlogits);
        if (sampling_.mode == SamplingMode::decoder) {
            Tensor2 dlogits_neg =
                beta_bn_.backward(softmax_rows_backward(dxhat_neg, xhat_neg), bn_neg);
            add_matmul_tn(grad_beta_, perturb.theta_neg, dlogits_neg);
            if (!sampling_.stop_gradient) {
                Tensor2 dtheta_neg = matmul_nt(dlogits_neg, beta_);
                Tensor2 back = perturb_theta_backward(dtheta_neg, theta, perturb);
                for (size_t i = 0; i < dtheta.size(); ++i) dtheta.data[i] += back.data[i];
            }
        }
    }

    Tensor2 dz;
    if (config_.decoder == DecoderVariant::gsm) {
        Tensor2 dlogits_t = softmax_rows_backward(dtheta, theta);
        dz = gsm_proj_.backward(dlogits_t, gsm_cache);
    } else {
        dz = softmax_rows_backward(dtheta, theta);
    }

    if (sampling_.mode == SamplingMode::encoder) {
        Tensor2 dz_pos(n, t), dz_neg(n, t);
        double inv_n = 1.0 / n;
        for (int r = 0; r < n; ++r) {
            double s = nce_sigmoid[r] * inv_n;
            for (int c = 0; c < t; ++c) {
                dz(r, c) += s * (z_neg(r, c) - z_pos(r, c));
                dz_pos(r, c) -= s * z(r, c);
                dz_neg(r, c) += s * z(r, c);
            }
        }
        auto z_grads = [&](const Tensor2& dzx, const GaussianPosterior& p) {
            Tensor2 dmu = dzx;
            Tensor2 dlv(n, t);
            for (size_t i = 0; i < dlv.size(); ++i)
                dlv.data[i] = 0.5 * dzx.data[i] * eps.data[i] * std::exp(0.5 * p.log_var.data[i]);
            return std::pair{dmu, dlv};
        };
        auto [dmu_p, dlv_p] = z_grads(dz_pos, GaussianPosterior{enc_pos.mu_out, enc_pos.logvar_out});
        encoder_backward(dmu_p, dlv_p, enc_pos);
        auto [dmu_n, dlv_n] = z_grads(dz_neg, GaussianPosterior{enc_neg.mu_out, enc_neg.logvar_out});
        encoder_backward(dmu_n, dlv_n, enc_neg);
    }

    // z = mu + exp(lv/2) * eps, plus the KL terms.
    Tensor2 dmu = dz;
    Tensor2 dlogvar(n, t);
    double inv_n = 1.0 / n;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < t; ++c) {
            double lv = post.log_var(r, c);
            dlogvar(r, c) = 0.5 * dz(r, c) * eps(r, c) * std::exp(0.5 * lv);
            dmu(r, c) += inv_n * (post.mu(r, c) - prior_.mean[c]) / prior_.var[c];
            dlogvar(r, c) += 0.5 * inv_n * (std::exp(lv) / prior_.var[c] - 1.0);
        }
    }
    encoder_backward(dmu, dlogvar, enc);
    return parts;
}

LossParts NtmModel::forward_loss(const TrainBatch& batch, const Tensor2& eps, bool train_mode,
                                 Rng& rng) {
    return forward_backward(batch, eps, train_mode, rng, /*accumulate=*/false);
}

namespace {

Tensor2 slice_rows(const Tensor2& src, const std::vector<int>& rows, int lo, int hi) {
    Tensor2 out(hi - lo, src.cols);
    for (int i = lo; i < hi; ++i)
        for (int c = 0; c < src.cols; ++c) out(i - lo, c) = src(rows[i], c);
    return out;
}

}  // namespace

TrainTrace NtmModel::train(const TrainData& data) {
    int n = data.x_in.rows;
    if (n < 1) throw std::invalid_argument("train: empty corpus");
    if (sampling_.mode == SamplingMode::encoder && data.x_tfidf.rows != n)
        throw std::invalid_argument("train: encoder sampling requires tf-idf vectors");

    // Encoder-mode samples are fixed functions of the tf-idf input, so build
    // them once. k is clamped per document to nnz-1.
    Tensor2 pos_in, neg_in;
    if (sampling_.mode == SamplingMode::encoder) {
        int v = config_.vocab_size;
        pos_in = data.x_in;
        neg_in = data.x_in;
        std::vector<double> row(v);
        for (int r = 0; r < n; ++r) {
            int nnz = 0;
            for (int c = 0; c < v; ++c) {
                row[c] = data.x_tfidf(r, c);
                if (row[c] != 0.0) ++nnz;
            }
            int k = std::min(sampling_.salient_words, nnz - 1);
            if (k < 0) k = 0;
            auto [xp, xn] = make_encoder_samples(row, k);
            for (int c = 0; c < v; ++c) {
                pos_in(r, c) = xp[c];
                neg_in(r, c) = xn[c];
            }
        }
    }

    ParamRegistry registry = params();
    AdamState adam(registry, config_.lr, config_.adam_beta1, config_.adam_beta2, config_.adam_eps);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainTrace trace;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng_.engine());
        EpochStats stats;
        stats.epoch = epoch;
        int batches = 0;
        for (int lo = 0; lo < n; lo += config_.batch_size) {
            int hi = std::min(lo + config_.batch_size, n);
            if (hi - lo < 2) continue;   // batch-norm needs >1 row
            TrainBatch batch;
            batch.x_in = slice_rows(data.x_in, order, lo, hi);
            batch.x_count = slice_rows(data.x_count, order, lo, hi);
            batch.x_bow = slice_rows(data.x_bow, order, lo, hi);
            if (sampling_.mode == SamplingMode::encoder) {
                batch.x_pos = slice_rows(pos_in, order, lo, hi);
                batch.x_neg = slice_rows(neg_in, order, lo, hi);
            }
            Tensor2 eps = rng_.normal_tensor(hi - lo, config_.num_topics);
            zero_grad();
            LossParts parts = forward_backward(batch, eps, /*train_mode=*/true, rng_);
            if (!std::isfinite(parts.total))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + " batch " +
                                         std::to_string(lo / config_.batch_size));
            adam_step(registry, adam);
            stats.loss.rl += parts.rl;
            stats.loss.kl += parts.kl;
            stats.loss.tl += parts.tl;
            stats.loss.nce += parts.nce;
            stats.loss.total += parts.total;
            ++batches;
        }
        if (batches > 0) {
            stats.loss.rl /= batches;
            stats.loss.kl /= batches;
            stats.loss.tl /= batches;
            stats.loss.nce /= batches;
            stats.loss.total /= batches;
        }
        trace.epochs.push_back(stats);
    }
    return trace;
}

TopicSet NtmModel::top_words(int t, const Vocabulary& vocab) const {
    if (t < 1 || t > vocab.size() || t > config_.vocab_size)
        throw std::invalid_argument("top_words: t must be in [1, V]");
    TopicSet set;
    set.topics.resize(config_.num_topics);
    std::vector<int> order(config_.vocab_size);
    for (int k = 0; k < config_.num_topics; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return beta_(k, a) > beta_(k, b); });
        for (int i = 0; i < t; ++i) set.topics[k].push_back(vocab.words[order[i]]);
    }
    return set;
}

ParamRegistry NtmModel::params() {
    ParamRegistry reg;
    for (size_t i = 0; i < hidden_.size(); ++i) {
        std::string base = "encoder.h" + std::to_string(i);
        reg.push_back({base + ".weight", &hidden_[i].weight, &hidden_[i].grad_weight});
        reg.push_back({base + ".bias", &hidden_[i].bias, &hidden_[i].grad_bias});
    }
    reg.push_back({"mu_head.weight", &mu_head_.weight, &mu_head_.grad_weight});
    reg.push_back({"mu_head.bias", &mu_head_.bias, &mu_head_.grad_bias});
    reg.push_back({"logvar_head.weight", &logvar_head_.weight, &logvar_head_.grad_weight});
    reg.push_back({"logvar_head.bias", &logvar_head_.bias, &logvar_head_.grad_bias});
    reg.push_back({"beta", &beta_, &grad_beta_});
    if (config_.decoder == DecoderVariant::gsm) {
        reg.push_back({"gsm_proj.weight", &gsm_proj_.weight, &gsm_proj_.grad_weight});
        reg.push_back({"gsm_proj.bias", &gsm_proj_.bias, &gsm_proj_.grad_bias});
    }
    return reg;
}

void NtmModel::zero_grad() {
    for (DenseLayer& l : hidden_) l.zero_grad();
    mu_head_.zero_grad();
    logvar_head_.zero_grad();
    grad_beta_.fill(0.0);
    if (config_.decoder == DecoderVariant::gsm) gsm_proj_.zero_grad();
}

namespace {

using nlohmann::json;

json tensor_to_json(const Tensor2& t) {
    return json{{"rows", t.rows}, {"cols", t.cols}, {"data", t.data}};
}

Tensor2 tensor_from_json(const json& j) {
    Tensor2 t(j.at("rows").get<int>(), j.at("cols").get<int>());
    t.data = j.at("data").get<std::vector<double>>();
    if (t.data.size() != static_cast<size_t>(t.rows) * t.cols)
        throw std::runtime_error("checkpoint: tensor size mismatch");
    return t;
}

json bn_to_json(const BatchNorm1d& bn) {
    return json{{"mean", bn.running_mean}, {"var", bn.running_var}};
}

void bn_from_json(const json& j, BatchNorm1d& bn) {
    bn.running_mean = j.at("mean").get<std::vector<double>>();
    bn.running_var = j.at("var").get<std::vector<double>>();
    if (static_cast<int>(bn.running_mean.size()) != bn.dim)
        throw std::runtime_error("checkpoint: batch-norm size mismatch");
}

}  // namespace

void NtmModel::save_checkpoint(const std::string& path) const {
    json j;
    j["format_version"] = 1;
    j["num_topics"] = config_.num_topics;
    j["vocab_size"] = config_.vocab_size;
    json params = json::object();
    for (size_t i = 0; i < hidden_.size(); ++i) {
        params["h" + std::to_string(i) + ".weight"] = tensor_to_json(hidden_[i].weight);
        params["h" + std::to_string(i) + ".bias"] = tensor_to_json(hidden_[i].bias);
    }
    params["mu_head.weight"] = tensor_to_json(mu_head_.weight);
    params["mu_head.bias"] = tensor_to_json(mu_head_.bias);
    params["logvar_head.weight"] = tensor_to_json(logvar_head_.weight);
    params["logvar_head.bias"] = tensor_to_json(logvar_head_.bias);
    params["beta"] = tensor_to_json(beta_);
    if (config_.decoder == DecoderVariant::gsm) {
        params["gsm_proj.weight"] = tensor_to_json(gsm_proj_.weight);
        params["gsm_proj.bias"] = tensor_to_json(gsm_proj_.bias);
    }
    j["params"] = std::move(params);
    j["bn"] = {{"mu", bn_to_json(mu_bn_)},
               {"logvar", bn_to_json(logvar_bn_)},
               {"beta", bn_to_json(beta_bn_)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump();
}

void NtmModel::load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    json j = json::parse(in);
    if (j.at("format_version").get<int>() != 1)
        throw std::runtime_error("checkpoint: unsupported format version");
    if (j.at("num_topics").get<int>() != config_.num_topics ||
        j.at("vocab_size").get<int>() != config_.vocab_size)
        throw std::runtime_error("checkpoint: shape does not match model config");
    const json& params = j.at("params");
    for (size_t i = 0; i < hidden_.size(); ++i) {
        hidden_[i].weight = tensor_from_json(params.at("h" + std::to_string(i) + ".weight"));
        hidden_[i].bias = tensor_from_json(params.at("h" + std::to_string(i) + ".bias"));
    }
    mu_head_.weight = tensor_from_json(params.at("mu_head.weight"));
    mu_head_.bias = tensor_from_json(params.at("mu_head.bias"));
    logvar_head_.weight = tensor_from_json(params.at("logvar_head.weight"));
    logvar_head_.bias = tensor_from_json(params.at("logvar_head.bias"));
    beta_ = tensor_from_json(params.at("beta"));
    if (config_.decoder == DecoderVariant::gsm) {
        gsm_proj_.weight = tensor_from_json(params.at("gsm_proj.weight"));
        gsm_proj_.bias = tensor_from_json(params.at("gsm_proj.bias"));
    }
    bn_from_json(j.at("bn").at("mu"), mu_bn_);
    bn_from_json(j.at("bn").at("logvar"), logvar_bn_);
    bn_from_json(j.at("bn").at("beta"), beta_bn_);
}

void save_topics_json(const TopicSet& topics, const std::string& path) {
    json j = json::array();
    for (const auto& words : topics.topics) j.push_back(words);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write topics file: " + path);
    out << j.dump();
}

void save_theta_tsv(const Tensor2& theta, const std::vector<int>& doc_ids,
                    const std::string& path) {
    if (static_cast<int>(doc_ids.size()) != theta.rows)
        throw std::invalid_argument("save_theta_tsv: id/row mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write theta file: " + path);
    out.precision(17);
    for (int r = 0; r < theta.rows; ++r) {
        out << doc_ids[r];
        for (int c = 0; c < theta.cols; ++c) out << (c ? " " : "\t") << theta(r, c);
        out << '\n';
    }
}

}  // namespace negtm
