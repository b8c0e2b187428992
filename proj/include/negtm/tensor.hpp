#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace negtm {

// Dense row-major matrix of doubles. Vectors are 1xN or Nx1 tensors.
struct Tensor2 {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Tensor2: negative shape");
    }

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }
    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// a (r x k) * b (k x c)
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
// a (r x k) * b^T (c x k)
Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b);
// a^T (k x r) * b (k x c)
Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b);
// c += a^T * b
void add_matmul_tn(Tensor2& c, const Tensor2& a, const Tensor2& b);

// Row-wise softmax with max subtraction.
Tensor2 softmax_rows(const Tensor2& t);

// Backward of y = softmax_rows(x): given dL/dy and y, returns dL/dx.
Tensor2 softmax_rows_backward(const Tensor2& upstream, const Tensor2& y);

bool all_finite(const Tensor2& t);
// Throws std::runtime_error naming `what` if t holds a NaN or Inf.
void check_finite(const Tensor2& t, const std::string& what);

}  // namespace negtm
