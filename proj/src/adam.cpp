#include "negtm/adam.hpp"

#include <cmath>

namespace negtm {

AdamState::AdamState(const ParamRegistry& params, double lr_, double b1, double b2, double e)
    : lr(lr_), beta1(b1), beta2(b2), eps(e) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const ParamRef& p : params) {
        m.emplace_back(p.value->rows, p.value->cols);
        v.emplace_back(p.value->rows, p.value->cols);
    }
}

void adam_step(const ParamRegistry& params, AdamState& state) {
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step: state does not match registry");
    state.step += 1;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        const ParamRef& p = params[i];
        if (!p.value->same_shape(*p.grad) || !p.value->same_shape(state.m[i]))
            throw std::invalid_argument("adam_step: shape mismatch for " + p.name);
        for (size_t j = 0; j < p.value->size(); ++j) {
            double g = p.grad->data[j];
            if (!std::isfinite(g))
                throw std::runtime_error("adam_step: non-finite gradient in " + p.name);
            double& mj = state.m[i].data[j];
            double& vj = state.v[i].data[j];
            mj = state.beta1 * mj + (1.0 - state.beta1) * g;
            vj = state.beta2 * vj + (1.0 - state.beta2) * g * g;
            double mhat = mj / bc1;
            double vhat = vj / bc2;
            p.value->data[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

}  // namespace negtm
