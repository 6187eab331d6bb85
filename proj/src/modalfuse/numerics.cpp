#include "modalfuse/numerics.hpp"

#include <cmath>

#include "modalfuse/errors.hpp"

namespace modalfuse {

double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double cosine(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw StructuralError("cosine: dim mismatch " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    double na = norm2(a);
    double nb = norm2(b);
    if (na == 0.0 || nb == 0.0) throw DomainError("cosine: zero-norm input");
    return dot(a, b) / (na * nb);
}

Vec l2_normalize(const Vec& v) {
    double n = norm2(v);
    if (n == 0.0) throw DomainError("l2_normalize: zero vector");
    Vec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double sigmoid(double x) {
    if (x >= 0.0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

Vec layer_norm(const Vec& x, const Vec& gain, const Vec& bias, double eps,
               LayerNormCache* cache) {
    const size_t n = x.size();
    if (gain.size() != n || bias.size() != n)
        throw StructuralError("layer_norm: dim mismatch");
    if (n == 0) throw StructuralError("layer_norm: empty input");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    double var = 0.0;  // population variance
    for (double v : x) {
        double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);

    double inv_std = 1.0 / std::sqrt(var + eps);
    Vec out(n);
    Vec xhat(n);
    for (size_t i = 0; i < n; ++i) {
        xhat[i] = (x[i] - mean) * inv_std;
        out[i] = gain[i] * xhat[i] + bias[i];
    }
    if (cache) {
        cache->xhat = std::move(xhat);
        cache->inv_std = inv_std;
    }
    return out;
}

void layer_norm_backward(const Vec& d_out, const Vec& gain, const LayerNormCache& cache,
                         Vec& d_x, Vec& d_gain, Vec& d_bias) {
    const size_t n = d_out.size();
    const Vec& xhat = cache.xhat;

    double sum_dxhat = 0.0;
    double sum_dxhat_xhat = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dxh = d_out[i] * gain[i];
        sum_dxhat += dxh;
        sum_dxhat_xhat += dxh * xhat[i];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
        double dxh = d_out[i] * gain[i];
        d_x[i] += cache.inv_std * (dxh - inv_n * sum_dxhat - xhat[i] * inv_n * sum_dxhat_xhat);
        d_gain[i] += d_out[i] * xhat[i];
        d_bias[i] += d_out[i];
    }
}

GradCheckReport finite_diff_check(const std::function<double()>& loss_fn,
                                  const std::vector<ParamView>& params,
                                  const std::vector<ParamView>& analytic,
                                  double step, double tol) {
    if (step <= 0.0) throw ConfigError("finite_diff_check: step must be positive");
    if (params.size() != analytic.size())
        throw StructuralError("finite_diff_check: param/gradient view count mismatch");

    GradCheckReport report;
    for (size_t t = 0; t < params.size(); ++t) {
        const ParamView& p = params[t];
        const ParamView& g = analytic[t];
        if (p.size != g.size)
            throw StructuralError("finite_diff_check: size mismatch for tensor " + p.name);
        for (size_t i = 0; i < p.size; ++i) {
            const double saved = p.data[i];
            p.data[i] = saved + step;
            double plus = loss_fn();
            p.data[i] = saved - step;
            double minus = loss_fn();
            p.data[i] = saved;
            if (!std::isfinite(plus) || !std::isfinite(minus))
                throw NumericalError("finite_diff_check: non-finite loss when perturbing " +
                                     p.name + "[" + std::to_string(i) + "]");
            double fd = (plus - minus) / (2.0 * step);
            double rel = std::abs(g.data[i] - fd) / std::max(1.0, std::abs(fd));
            ++report.checked;
            if (rel > report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst_tensor = p.name;
                report.worst_index = i;
            }
            if (rel > tol)
                report.violations.push_back({p.name, i, g.data[i], fd, rel});
        }
    }
    return report;
}

}  // namespace modalfuse
