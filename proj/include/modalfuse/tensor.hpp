#ifndef MODALFUSE_TENSOR_HPP_
#define MODALFUSE_TENSOR_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "modalfuse/errors.hpp"

namespace modalfuse {

// Embeddings and gradients are plain dense vectors of doubles. Files store
// float32; everything in memory is promoted to double.
using Vec = std::vector<double>;

// Dense row-major matrix.
struct Tensor2 {
    size_t rows = 0;
    size_t cols = 0;
    Vec data;

    Tensor2() = default;
    Tensor2(size_t r, size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    size_t size() const { return data.size(); }

    static Tensor2 identity(size_t n) {
        Tensor2 t(n, n);
        for (size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
        return t;
    }
};

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const Tensor2& t) { return all_finite(t.data); }

// y = M x
inline Vec matvec(const Tensor2& m, const Vec& x) {
    if (m.cols != x.size())
        throw StructuralError("matvec: matrix is " + std::to_string(m.rows) + "x" +
                              std::to_string(m.cols) + " but vector has dim " +
                              std::to_string(x.size()));
    Vec y(m.rows, 0.0);
    for (size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        double acc = 0.0;
        for (size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
    return y;
}

// y = M^T x
inline Vec matvec_t(const Tensor2& m, const Vec& x) {
    if (m.rows != x.size())
        throw StructuralError("matvec_t: matrix is " + std::to_string(m.rows) + "x" +
                              std::to_string(m.cols) + " but vector has dim " +
                              std::to_string(x.size()));
    Vec y(m.cols, 0.0);
    for (size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        const double xr = x[r];
        for (size_t c = 0; c < m.cols; ++c) y[c] += row[c] * xr;
    }
    return y;
}

// G += a b^T  (gradient of matvec w.r.t. the matrix)
inline void add_outer(Tensor2& g, const Vec& a, const Vec& b) {
    if (g.rows != a.size() || g.cols != b.size())
        throw StructuralError("add_outer: shape mismatch");
    for (size_t r = 0; r < g.rows; ++r) {
        double* row = g.data.data() + r * g.cols;
        const double ar = a[r];
        for (size_t c = 0; c < g.cols; ++c) row[c] += ar * b[c];
    }
}

inline void axpy(double a, const Vec& x, Vec& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace modalfuse

#endif  // MODALFUSE_TENSOR_HPP_
