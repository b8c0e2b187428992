#include "negtm/tensor.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace negtm {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;

CMap map(const Tensor2& t) { return CMap(t.data.data(), t.rows, t.cols); }
MMap map(Tensor2& t) { return MMap(t.data.data(), t.rows, t.cols); }

}  // namespace

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
    Tensor2 out(a.rows, b.cols);
    map(out).noalias() = map(a) * map(b);
    return out;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.cols) throw std::invalid_argument("matmul_nt: shape mismatch");
    Tensor2 out(a.rows, b.rows);
    map(out).noalias() = map(a) * map(b).transpose();
    return out;
}

Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b) {
    if (a.rows != b.rows) throw std::invalid_argument("matmul_tn: shape mismatch");
    Tensor2 out(a.cols, b.cols);
    map(out).noalias() = map(a).transpose() * map(b);
    return out;
}

void add_matmul_tn(Tensor2& c, const Tensor2& a, const Tensor2& b) {
    if (a.rows != b.rows || c.rows != a.cols || c.cols != b.cols)
        throw std::invalid_argument("add_matmul_tn: shape mismatch");
    map(c).noalias() += map(a).transpose() * map(b);
}

Tensor2 softmax_rows(const Tensor2& t) {
    Tensor2 out(t.rows, t.cols);
    for (int r = 0; r < t.rows; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < t.cols; ++c) mx = std::max(mx, t(r, c));
        double sum = 0.0;
        for (int c = 0; c < t.cols; ++c) {
            double e = std::exp(t(r, c) - mx);
            out(r, c) = e;
            sum += e;
        }
        for (int c = 0; c < t.cols; ++c) out(r, c) /= sum;
    }
    return out;
}

Tensor2 softmax_rows_backward(const Tensor2& upstream, const Tensor2& y) {
    if (!upstream.same_shape(y)) throw std::invalid_argument("softmax backward: shape mismatch");
    Tensor2 dx(y.rows, y.cols);
    for (int r = 0; r < y.rows; ++r) {
        double dot = 0.0;
        for (int c = 0; c < y.cols; ++c) dot += upstream(r, c) * y(r, c);
        for (int c = 0; c < y.cols; ++c) dx(r, c) = y(r, c) * (upstream(r, c) - dot);
    }
    return dx;
}

bool all_finite(const Tensor2& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

void check_finite(const Tensor2& t, const std::string& what) {
    if (!all_finite(t)) throw std::runtime_error("non-finite values in " + what);
}

}  // namespace negtm
