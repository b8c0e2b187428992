#include "negtm/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace negtm {

double gradient_check(const std::function<double()>& loss_fn, const ParamRegistry& params,
                      double h, int max_coords_per_param, uint64_t seed) {
    std::mt19937_64 gen(seed);
    double worst = 0.0;
    for (const ParamRef& p : params) {
        size_t n = p.value->size();
        std::vector<size_t> coords(n);
        std::iota(coords.begin(), coords.end(), size_t{0});
        if (static_cast<int>(n) > max_coords_per_param) {
            std::shuffle(coords.begin(), coords.end(), gen);
            coords.resize(max_coords_per_param);
        }
        for (size_t j : coords) {
            double orig = p.value->data[j];
            p.value->data[j] = orig + h;
            double lp = loss_fn();
            p.value->data[j] = orig - h;
            double lm = loss_fn();
            p.value->data[j] = orig;
            double numeric = (lp - lm) / (2.0 * h);
            double analytic = p.grad->data[j];
            double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1.0});
            worst = std::max(worst, std::fabs(analytic - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace negtm
