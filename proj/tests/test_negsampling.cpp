#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "negtm/negsampling.hpp"
#include "negtm/rng.hpp"

using namespace negtm;

namespace {

// Sort-based reference for perturb_theta: rank indices by (-value, index),
// zero the first M, renormalize.
std::vector<double> perturb_reference(const std::vector<double>& theta, int m) {
    std::vector<int> order(theta.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (theta[a] != theta[b]) return theta[a] > theta[b];
        return a < b;
    });
    std::vector<double> out = theta;
    for (int i = 0; i < m; ++i) out[order[i]] = 0.0;
    double s = std::accumulate(out.begin(), out.end(), 0.0);
    if (s < 1e-12) {
        int kept = static_cast<int>(theta.size()) - m;
        for (size_t i = 0; i < out.size(); ++i) out[i] = 0.0;
        for (size_t i = m; i < order.size(); ++i) out[order[i]] = 1.0 / kept;
        return out;
    }
    for (double& v : out) v /= s;
    return out;
}

}  // namespace

TEST_CASE("perturb_theta: hand cases") {
    auto r = perturb_theta({0.5, 0.3, 0.2}, 1);
    CHECK(r.theta_neg[0] == doctest::Approx(0.0));
    CHECK(r.theta_neg[1] == doctest::Approx(0.6));
    CHECK(r.theta_neg[2] == doctest::Approx(0.4));
    CHECK(r.zeroed == std::vector<int>{0});
    CHECK_FALSE(r.degenerate);

    // uniform with ties: zero the lowest indices first
    auto u = perturb_theta({0.25, 0.25, 0.25, 0.25}, 2);
    CHECK(u.theta_neg == std::vector<double>{0.0, 0.0, 0.5, 0.5});
}

TEST_CASE("perturb_theta: degenerate mass falls back to uniform complement") {
    auto r = perturb_theta({1.0, 0.0, 0.0}, 1);
    CHECK(r.degenerate);
    CHECK(r.theta_neg[0] == doctest::Approx(0.0));
    CHECK(r.theta_neg[1] == doctest::Approx(0.5));
    CHECK(r.theta_neg[2] == doctest::Approx(0.5));
}

TEST_CASE("perturb_theta: M out of range rejected") {
    NegSamplingConfig bad;
    bad.mode = SamplingMode::decoder;
    bad.top_topics = 3;
    CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);
    CHECK_THROWS_AS(perturb_theta({0.5, 0.5}, 2), std::invalid_argument);
}

TEST_CASE("perturb_theta: 1000 random cases match the sort-based reference") {
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        int t = 2 + static_cast<int>(rng.uniform(0, 10));
        int m = 1 + static_cast<int>(rng.uniform(0, t - 1));
        std::vector<double> theta(t);
        double s = 0;
        for (double& v : theta) {
            v = std::exp(rng.normal());
            s += v;
        }
        for (double& v : theta) v /= s;
        if (trial % 7 == 0) theta[0] = theta[t - 1];   // inject ties sometimes

        auto got = perturb_theta(theta, m);
        auto want = perturb_reference(theta, m);
        REQUIRE(got.theta_neg.size() == want.size());
        double sum = 0;
        for (int i = 0; i < t; ++i) {
            CHECK(got.theta_neg[i] == doctest::Approx(want[i]).epsilon(1e-12));
            sum += got.theta_neg[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(static_cast<int>(got.zeroed.size()) == m);
        for (int z : got.zeroed) CHECK(got.theta_neg[z] == 0.0);
    }
}

TEST_CASE("perturb_theta: permutation equivariance") {
    std::vector<double> theta{0.4, 0.1, 0.3, 0.2};
    std::vector<int> perm{2, 0, 3, 1};
    std::vector<double> permuted(4);
    for (int i = 0; i < 4; ++i) permuted[perm[i]] = theta[i];
    auto base = perturb_theta(theta, 2);
    auto shuf = perturb_theta(permuted, 2);
    for (int i = 0; i < 4; ++i)
        CHECK(shuf.theta_neg[perm[i]] == doctest::Approx(base.theta_neg[i]).epsilon(1e-12));
}

TEST_CASE("perturb_theta_rows matches the scalar version and backward checks out") {
    Rng rng(12);
    Tensor2 theta(6, 5);
    for (int i = 0; i < 6; ++i) {
        double s = 0;
        for (int j = 0; j < 5; ++j) {
            theta(i, j) = std::exp(rng.normal());
            s += theta(i, j);
        }
        for (int j = 0; j < 5; ++j) theta(i, j) /= s;
    }
    PerturbBatch batch = perturb_theta_rows(theta, 2);
    for (int i = 0; i < 6; ++i) {
        std::vector<double> row(5);
        for (int j = 0; j < 5; ++j) row[j] = theta(i, j);
        auto single = perturb_theta(row, 2);
        for (int j = 0; j < 5; ++j)
            CHECK(batch.theta_neg(i, j) == doctest::Approx(single.theta_neg[j]).epsilon(1e-12));
    }

    // finite differences on sum-of-squares of theta_neg wrt theta. The top-M
    // (mask) selection is piecewise constant, so the derivative of the
    // renormalization is all that matters.
    Tensor2 up(6, 5);
    for (size_t i = 0; i < up.data.size(); ++i) up.data[i] = 2.0 * batch.theta_neg.data[i];
    Tensor2 analytic = perturb_theta_backward(up, theta, batch);
    double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 5; ++j) {
            auto loss_at = [&](double v) {
                Tensor2 t2 = theta;
                t2(i, j) = v;
                PerturbBatch b2 = perturb_theta_rows(t2, 2);
                double s = 0;
                for (double x : b2.theta_neg.data) s += x * x;
                return s;
            };
            double num = (loss_at(theta(i, j) + h) - loss_at(theta(i, j) - h)) / (2 * h);
            CHECK(analytic(i, j) ==
                  doctest::Approx(num).epsilon(1e-4).scale(std::max(1.0, std::fabs(num))));
        }
    }
}

TEST_CASE("triplet_loss: closed forms") {
    // anchor equals positive, negative at distance 2, margin 1 -> 0
    std::vector<double> xhat{0.5, 0.5, 0.0};
    std::vector<double> xneg{0.5, 0.5, 2.0};   // distance 2 from xhat
    CHECK(triplet_loss(xhat, xhat, xneg, 1.0) == 0.0);

    // negative equals anchor -> loss = ||xhat - x_bow|| + m
    std::vector<double> xbow{0.0, 0.5, 0.5};
    double d = std::sqrt(0.25 + 0.25);
    CHECK(triplet_loss(xhat, xbow, xhat, 1.0) == doctest::Approx(d + 1.0).epsilon(1e-12));

    // random triple vs independent recomputation
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(7), b(7), c(7);
        for (int i = 0; i < 7; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
            c[i] = rng.normal();
        }
        double dp = 0, dn = 0;
        for (int i = 0; i < 7; ++i) {
            dp += (a[i] - b[i]) * (a[i] - b[i]);
            dn += (a[i] - c[i]) * (a[i] - c[i]);
        }
        double want = std::max(std::sqrt(dp) - std::sqrt(dn) + 0.7, 0.0);
        CHECK(triplet_loss(a, b, c, 0.7) == doctest::Approx(want).epsilon(1e-12));
        CHECK(triplet_loss(a, b, c, 0.7) >= 0.0);
    }
}

TEST_CASE("combined_loss: weighted sum") {
    CHECK(combined_loss(1.0, 2.0, 3.0, 0.5) == doctest::Approx(4.5));
    CHECK(combined_loss(1.5, 2.5, 0.0, 0.9) == doctest::Approx(4.0));
}

TEST_CASE("make_encoder_samples: hand case, k=0, disjoint support") {
    auto [pos, neg] = make_encoder_samples({0.5, 0.3, 0.2}, 1);
    CHECK(neg[0] == doctest::Approx(0.0));
    CHECK(neg[1] == doctest::Approx(0.6));
    CHECK(neg[2] == doctest::Approx(0.4));
    CHECK(pos[0] == doctest::Approx(0.625));
    CHECK(pos[1] == doctest::Approx(0.375));
    CHECK(pos[2] == doctest::Approx(0.0));

    auto [p0, n0] = make_encoder_samples({0.5, 0.3, 0.2}, 0);
    CHECK(p0 == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(n0 == std::vector<double>{0.5, 0.3, 0.2});

    CHECK_THROWS_AS(make_encoder_samples({0.5, 0.5, 0.0}, 2), std::invalid_argument);

    Rng rng(14);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(12, 0.0);
        int nnz = 4 + static_cast<int>(rng.uniform(0, 8));
        for (int i = 0; i < nnz; ++i) x[i] = std::exp(rng.normal());
        int k = 1 + static_cast<int>(rng.uniform(0, nnz - 1));
        auto [p, n] = make_encoder_samples(x, k);
        // the k largest entries of x must be outside the negative's support
        std::vector<int> order(12);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return x[a] != x[b] ? x[a] > x[b] : a < b; });
        for (int i = 0; i < k; ++i) CHECK(n[order[i]] == 0.0);
        double mass_x = std::accumulate(x.begin(), x.end(), 0.0);
        CHECK(std::accumulate(n.begin(), n.end(), 0.0) ==
              doctest::Approx(mass_x).epsilon(1e-9));
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) ==
              doctest::Approx(mass_x).epsilon(1e-9));
    }
}

TEST_CASE("infonce_loss: closed form, limits, monotonicity") {
    std::vector<double> z{0.3, -0.2, 0.5};
    CHECK(infonce_loss(z, z, z, 0.5) == doctest::Approx(std::log(1.5)).epsilon(1e-12));

    // z.z+ >> z.z- drives the loss to 0
    std::vector<double> zp{30.0, -20.0, 50.0};
    std::vector<double> zn{-30.0, 20.0, -50.0};
    CHECK(infonce_loss(z, zp, zn, 0.5) < 1e-8);

    // direct-formula comparison on random vectors
    Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(4), b(4), c(4);
        for (int i = 0; i < 4; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
            c[i] = rng.normal();
        }
        double pp = 0, nn = 0;
        for (int i = 0; i < 4; ++i) {
            pp += a[i] * b[i];
            nn += a[i] * c[i];
        }
        long double direct =
            -logl(expl((long double)pp) / (expl((long double)pp) + 0.5L * expl((long double)nn)));
        CHECK(infonce_loss(a, b, c, 0.5) ==
              doctest::Approx(static_cast<double>(direct)).epsilon(1e-10));
    }

    // strictly decreasing in z.z+ with z.z- fixed
    std::vector<double> zfix{1.0, 0.0};
    std::vector<double> znx{0.2, 0.0};
    double prev = infonce_loss(zfix, {0.0, 0.0}, znx, 0.5);
    for (double v = 0.5; v < 3.0; v += 0.5) {
        double cur = infonce_loss(zfix, {v, 0.0}, znx, 0.5);
        CHECK(cur < prev);
        prev = cur;
    }

    // stability for big dot products
    std::vector<double> big{1000.0};
    CHECK(std::isfinite(infonce_loss(big, {1.0}, {2.0}, 0.5)));
}

TEST_CASE("NegSamplingConfig validation ranges") {
    NegSamplingConfig c;
    c.mode = SamplingMode::decoder;
    c.top_topics = 1;
    c.lambda = 0.5;
    CHECK_NOTHROW(c.validate(5));
    c.lambda = 0.0;
    CHECK_THROWS_AS(c.validate(5), std::invalid_argument);
    c.lambda = 1.5;
    CHECK_THROWS_AS(c.validate(5), std::invalid_argument);
    c.lambda = 1.0;
    c.margin = 0.0;
    CHECK_THROWS_AS(c.validate(5), std::invalid_argument);
    c.margin = 1.0;
    c.mode = SamplingMode::encoder;
    c.eta = 0.0;
    CHECK_THROWS_AS(c.validate(5), std::invalid_argument);
}
