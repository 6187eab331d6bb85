#ifndef MODALFUSE_NUMERICS_HPP_
#define MODALFUSE_NUMERICS_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "modalfuse/tensor.hpp"

namespace modalfuse {

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);

// cos(a, b) in [-1, 1]. Throws StructuralError on dim mismatch,
// DomainError on a zero-norm input.
double cosine(const Vec& a, const Vec& b);

// v / ||v||. Throws DomainError on the zero vector.
Vec l2_normalize(const Vec& v);

double sigmoid(double x);

// Per-vector standardization with population variance, then affine map:
//   out = gain * (x - mean) / sqrt(var + eps) + bias
struct LayerNormCache {
    Vec xhat;
    double inv_std = 0.0;
};

Vec layer_norm(const Vec& x, const Vec& gain, const Vec& bias, double eps,
               LayerNormCache* cache = nullptr);

// Accumulates into d_x / d_gain / d_bias (which must be pre-sized).
void layer_norm_backward(const Vec& d_out, const Vec& gain, const LayerNormCache& cache,
                         Vec& d_x, Vec& d_gain, Vec& d_bias);

// ---------------------------------------------------------------------------
// Finite-difference gradient verification.

// A named view into live parameter storage. finite_diff_check perturbs the
// values in place and restores them, so the loss callback sees the
// perturbation through whatever structure owns the memory.
struct ParamView {
    std::string name;
    double* data = nullptr;
    size_t size = 0;
};

struct GradMismatch {
    std::string tensor;
    size_t index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_tensor;
    size_t worst_index = 0;
    size_t checked = 0;
    std::vector<GradMismatch> violations;

    bool ok() const { return violations.empty(); }
};

// Central differences at the given step, one parameter at a time:
//   rel_err = |analytic - fd| / max(1, |fd|)
// `analytic` must align with `params` entry by entry. Entries whose rel_err
// exceeds tol are collected as violations. Throws NumericalError, naming the
// parameter, if the loss is non-finite at a perturbed point.
GradCheckReport finite_diff_check(const std::function<double()>& loss_fn,
                                  const std::vector<ParamView>& params,
                                  const std::vector<ParamView>& analytic,
                                  double step, double tol);

}  // namespace modalfuse

#endif  // MODALFUSE_NUMERICS_HPP_
