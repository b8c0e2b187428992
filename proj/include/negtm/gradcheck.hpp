#pragma once

#include <cstdint>
#include <functional>

#include "negtm/adam.hpp"

namespace negtm {

// Central finite-difference comparison against analytic gradients already
// stored in the registry. `loss_fn` must be deterministic (frozen noise) and
// must not touch the gradients. Checks at most `max_coords_per_param`
// coordinates of each parameter, chosen with `seed`.
//
// Returns max over checked coordinates of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1).
double gradient_check(const std::function<double()>& loss_fn, const ParamRegistry& params,
                      double h = 1e-5, int max_coords_per_param = 24, uint64_t seed = 7);

}  // namespace negtm
