#include "modalfuse/fusion.hpp"

#include <cmath>

#include "modalfuse/errors.hpp"
#include "modalfuse/rng.hpp"

namespace modalfuse {

namespace {

void check_dim(const Vec& v, size_t dim, const char* what) {
    if (v.size() != dim)
        throw StructuralError(std::string(what) + ": expected dim " + std::to_string(dim) +
                              ", got " + std::to_string(v.size()));
}

void fill_uniform(Vec& v, double bound, Rng& rng) {
    for (double& x : v) x = rng.uniform(-bound, bound);
}

// forward through the interaction MLP, filling the cache slots
void mlp_forward(const FusionParams& p, const Vec& in, Vec& pre, Vec& act, Vec& out) {
    pre = matvec(p.mlp_w1, in);
    for (size_t i = 0; i < pre.size(); ++i) pre[i] += p.mlp_b1[i];
    act.resize(pre.size());
    for (size_t i = 0; i < pre.size(); ++i) act[i] = pre[i] > 0.0 ? pre[i] : 0.0;
    out = matvec(p.mlp_w2, act);
    for (size_t i = 0; i < out.size(); ++i) out[i] += p.mlp_b2[i];
}

// d_out -> d_in, accumulating parameter grads
void mlp_backward(const FusionParams& p, const FuseCache& c, const Vec& d_out,
                  FusionParams& g, Vec& d_in) {
    for (size_t i = 0; i < d_out.size(); ++i) g.mlp_b2[i] += d_out[i];
    add_outer(g.mlp_w2, d_out, c.mlp_act);
    Vec d_act = matvec_t(p.mlp_w2, d_out);
    // rectifier subgradient: 0 at the kink
    Vec d_pre(d_act.size());
    for (size_t i = 0; i < d_act.size(); ++i) d_pre[i] = c.mlp_pre[i] > 0.0 ? d_act[i] : 0.0;
    for (size_t i = 0; i < d_pre.size(); ++i) g.mlp_b1[i] += d_pre[i];
    add_outer(g.mlp_w1, d_pre, c.mlp_in);
    d_in = matvec_t(p.mlp_w1, d_pre);
}

Vec concat(const Vec& a, const Vec& b) {
    Vec out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

const char* variant_name(FusionVariant v) {
    switch (v) {
        case FusionVariant::Mlp: return "MLP";
        case FusionVariant::Moe: return "MoE";
        case FusionVariant::MoeMlp: return "MoE+MLP";
        case FusionVariant::Attention: return "Attention";
        case FusionVariant::MoeBilinear: return "MoE+Bilinear";
    }
    return "?";
}

FusionVariant variant_from_name(const std::string& name) {
    for (FusionVariant v : all_variants())
        if (name == variant_name(v)) return v;
    throw ConfigError("unknown fusion variant: " + name +
                      " (expected MLP, MoE, MoE+MLP, Attention or MoE+Bilinear)");
}

std::vector<FusionVariant> all_variants() {
    return {FusionVariant::Mlp, FusionVariant::Moe, FusionVariant::MoeMlp,
            FusionVariant::Attention, FusionVariant::MoeBilinear};
}

FusionParams init_fusion_params(FusionVariant variant, size_t dim, size_t heads,
                                size_t proj_dim, size_t mlp_hidden, uint64_t seed) {
    if (dim == 0) throw ConfigError("fusion params: dim must be >= 1");
    FusionParams p;
    p.variant = variant;
    p.dim = dim;

    p.query_adapter = Tensor2::identity(dim);
    p.text_adapter = Tensor2::identity(dim);
    p.image_adapter = Tensor2::identity(dim);
    p.ln_gain.assign(dim, 1.0);
    p.ln_bias.assign(dim, 0.0);

    if (p.has_gate()) p.gate_w.assign(2 * dim, 0.0);

    if (p.has_attention()) {
        p.attn_text_w.assign(dim, 0.0);
        p.attn_image_w.assign(dim, 0.0);
    }

    Rng rng(seed);
    if (p.has_bilinear()) {
        p.heads = heads == 0 ? 4 : heads;
        p.proj_dim = proj_dim == 0 ? std::max<size_t>(1, dim / 4) : proj_dim;
        double bound = 1.0 / std::sqrt(static_cast<double>(dim));
        for (size_t k = 0; k < p.heads; ++k) {
            Tensor2 wt(p.proj_dim, dim), wi(p.proj_dim, dim);
            fill_uniform(wt.data, bound, rng);
            fill_uniform(wi.data, bound, rng);
            p.text_proj.push_back(std::move(wt));
            p.image_proj.push_back(std::move(wi));
        }
    }
    if (p.has_mlp()) {
        p.mlp_hidden = mlp_hidden == 0 ? dim : mlp_hidden;
        size_t in_dim = p.mlp_input_dim();
        double b1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
        double b2 = 1.0 / std::sqrt(static_cast<double>(p.mlp_hidden));
        p.mlp_w1 = Tensor2(p.mlp_hidden, in_dim);
        p.mlp_b1.assign(p.mlp_hidden, 0.0);
        p.mlp_w2 = Tensor2(dim, p.mlp_hidden);
        p.mlp_b2.assign(dim, 0.0);
        fill_uniform(p.mlp_w1.data, b1, rng);
        fill_uniform(p.mlp_b1, b1, rng);
        fill_uniform(p.mlp_w2.data, b2, rng);
        fill_uniform(p.mlp_b2, b2, rng);
    }
    return p;
}

FusionParams zeros_like(const FusionParams& p) {
    FusionParams z = p;
    auto wipe_t = [](Tensor2& t) { std::fill(t.data.begin(), t.data.end(), 0.0); };
    auto wipe_v = [](Vec& v) { std::fill(v.begin(), v.end(), 0.0); };
    wipe_t(z.query_adapter);
    wipe_t(z.text_adapter);
    wipe_t(z.image_adapter);
    wipe_v(z.gate_w);
    z.gate_b = 0.0;
    wipe_v(z.attn_text_w);
    wipe_v(z.attn_image_w);
    z.attn_text_b = 0.0;
    z.attn_image_b = 0.0;
    for (Tensor2& t : z.text_proj) wipe_t(t);
    for (Tensor2& t : z.image_proj) wipe_t(t);
    wipe_t(z.mlp_w1);
    wipe_t(z.mlp_w2);
    wipe_v(z.mlp_b1);
    wipe_v(z.mlp_b2);
    wipe_v(z.ln_gain);
    wipe_v(z.ln_bias);
    return z;
}

std::vector<ParamView> active_views(FusionParams& p) {
    std::vector<ParamView> views;
    auto add_t = [&](const char* name, Tensor2& t) {
        views.push_back({name, t.data.data(), t.data.size()});
    };
    auto add_v = [&](const char* name, Vec& v) { views.push_back({name, v.data(), v.size()}); };
    auto add_s = [&](const char* name, double& s) { views.push_back({name, &s, 1}); };

    add_t("query_adapter", p.query_adapter);
    add_t("text_adapter", p.text_adapter);
    add_t("image_adapter", p.image_adapter);
    if (p.has_gate()) {
        add_v("gate_w", p.gate_w);
        add_s("gate_b", p.gate_b);
    }
    if (p.has_attention()) {
        add_v("attn_text_w", p.attn_text_w);
        add_s("attn_text_b", p.attn_text_b);
        add_v("attn_image_w", p.attn_image_w);
        add_s("attn_image_b", p.attn_image_b);
    }
    if (p.has_bilinear()) {
        for (size_t k = 0; k < p.heads; ++k) {
            views.push_back({"text_proj." + std::to_string(k), p.text_proj[k].data.data(),
                             p.text_proj[k].data.size()});
            views.push_back({"image_proj." + std::to_string(k), p.image_proj[k].data.data(),
                             p.image_proj[k].data.size()});
        }
    }
    if (p.has_mlp()) {
        add_t("mlp_w1", p.mlp_w1);
        add_v("mlp_b1", p.mlp_b1);
        add_t("mlp_w2", p.mlp_w2);
        add_v("mlp_b2", p.mlp_b2);
    }
    add_v("ln_gain", p.ln_gain);
    add_v("ln_bias", p.ln_bias);
    return views;
}

size_t active_size(const FusionParams& p) {
    size_t total = 0;
    auto& mp = const_cast<FusionParams&>(p);
    for (const ParamView& v : active_views(mp)) total += v.size;
    return total;
}

double gate_weight(const Vec& text, const Vec& image, const FusionParams& p) {
    if (p.gate_w.size() != text.size() + image.size())
        throw StructuralError("gate_weight: gate expects dim " + std::to_string(p.gate_w.size()) +
                              ", got " + std::to_string(text.size() + image.size()));
    double pre = p.gate_b;
    for (size_t i = 0; i < text.size(); ++i) pre += p.gate_w[i] * text[i];
    for (size_t i = 0; i < image.size(); ++i) pre += p.gate_w[text.size() + i] * image[i];
    return sigmoid(pre);
}

Vec blend_modalities(const Vec& text, const Vec& image, double alpha) {
    if (text.size() != image.size()) throw StructuralError("blend_modalities: dim mismatch");
    Vec out(text.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = alpha * text[i] + (1.0 - alpha) * image[i];
    return out;
}

Vec bilinear_interaction(const Vec& text, const Vec& image, const FusionParams& p) {
    if (!p.has_bilinear())
        throw StructuralError("bilinear_interaction: variant has no bilinear path");
    check_dim(text, p.dim, "bilinear_interaction text");
    check_dim(image, p.dim, "bilinear_interaction image");
    Vec products;
    products.reserve(p.heads * p.proj_dim);
    for (size_t k = 0; k < p.heads; ++k) {
        Vec a = matvec(p.text_proj[k], text);
        Vec b = matvec(p.image_proj[k], image);
        for (size_t j = 0; j < p.proj_dim; ++j) products.push_back(a[j] * b[j]);
    }
    Vec pre, act, out;
    mlp_forward(p, products, pre, act, out);
    return out;
}

Vec apply_adapter(const Vec& v, AdapterKind which, const FusionParams& p) {
    check_dim(v, p.dim, "apply_adapter");
    switch (which) {
        case AdapterKind::Query: return matvec(p.query_adapter, v);
        case AdapterKind::Text: return matvec(p.text_adapter, v);
        case AdapterKind::Image: return matvec(p.image_adapter, v);
    }
    throw StructuralError("apply_adapter: bad kind");
}

FusionTrace fuse_item(const Vec& text_embedding, const Vec& image_embedding,
                      const FusionParams& p) {
    FuseCache cache;
    return fuse_item_cached(text_embedding, image_embedding, p, cache);
}

FusionTrace fuse_item_cached(const Vec& text_embedding, const Vec& image_embedding,
                             const FusionParams& p, FuseCache& c) {
    check_dim(text_embedding, p.dim, "fuse_item text");
    check_dim(image_embedding, p.dim, "fuse_item image");

    c.text_adapted = matvec(p.text_adapter, text_embedding);
    c.image_adapted = matvec(p.image_adapter, image_embedding);

    switch (p.variant) {
        case FusionVariant::Mlp: {
            c.alpha = 0.5;  // no gate; placeholder only
            c.mlp_in = concat(c.text_adapted, c.image_adapted);
            mlp_forward(p, c.mlp_in, c.mlp_pre, c.mlp_act, c.mlp_out);
            c.pre_norm = c.mlp_out;
            c.interaction_norm = 0.0;
            break;
        }
        case FusionVariant::Moe: {
            c.alpha = gate_weight(c.text_adapted, c.image_adapted, p);
            c.blended = blend_modalities(c.text_adapted, c.image_adapted, c.alpha);
            c.pre_norm = c.blended;
            c.interaction_norm = 0.0;
            break;
        }
        case FusionVariant::MoeMlp: {
            c.alpha = gate_weight(c.text_adapted, c.image_adapted, p);
            c.blended = blend_modalities(c.text_adapted, c.image_adapted, c.alpha);
            c.mlp_in = concat(c.text_adapted, c.image_adapted);
            mlp_forward(p, c.mlp_in, c.mlp_pre, c.mlp_act, c.mlp_out);
            c.pre_norm = c.blended;
            for (size_t i = 0; i < c.pre_norm.size(); ++i) c.pre_norm[i] += c.mlp_out[i];
            c.interaction_norm = norm2(c.mlp_out);
            break;
        }
        case FusionVariant::Attention: {
            double st = p.attn_text_b + dot(p.attn_text_w, c.text_adapted);
            double sv = p.attn_image_b + dot(p.attn_image_w, c.image_adapted);
            // two-way softmax
            double m = std::max(st, sv);
            double et = std::exp(st - m), ev = std::exp(sv - m);
            c.attn_wt = et / (et + ev);
            c.attn_wv = ev / (et + ev);
            c.alpha = c.attn_wt;
            c.blended = Vec(p.dim);
            for (size_t i = 0; i < p.dim; ++i)
                c.blended[i] = c.attn_wt * c.text_adapted[i] + c.attn_wv * c.image_adapted[i];
            c.pre_norm = c.blended;
            c.interaction_norm = 0.0;
            break;
        }
        case FusionVariant::MoeBilinear: {
            c.alpha = gate_weight(c.text_adapted, c.image_adapted, p);
            c.blended = blend_modalities(c.text_adapted, c.image_adapted, c.alpha);
            c.head_text.clear();
            c.head_image.clear();
            c.mlp_in.clear();
            c.mlp_in.reserve(p.heads * p.proj_dim);
            for (size_t k = 0; k < p.heads; ++k) {
                c.head_text.push_back(matvec(p.text_proj[k], c.text_adapted));
                c.head_image.push_back(matvec(p.image_proj[k], c.image_adapted));
                const Vec& a = c.head_text.back();
                const Vec& b = c.head_image.back();
                for (size_t j = 0; j < p.proj_dim; ++j) c.mlp_in.push_back(a[j] * b[j]);
            }
            mlp_forward(p, c.mlp_in, c.mlp_pre, c.mlp_act, c.mlp_out);
            c.pre_norm = c.blended;
            for (size_t i = 0; i < c.pre_norm.size(); ++i) c.pre_norm[i] += c.mlp_out[i];
            c.interaction_norm = norm2(c.mlp_out);
            break;
        }
    }

    c.fused = layer_norm(c.pre_norm, p.ln_gain, p.ln_bias, p.ln_eps, &c.ln);

    FusionTrace trace;
    trace.alpha = c.alpha;
    trace.blended = c.blended;
    trace.interaction_norm = c.interaction_norm;
    trace.fused = c.fused;
    return trace;
}

double score_pair(const Vec& adapted_query, const Vec& fused_item) {
    return cosine(adapted_query, fused_item);
}

void cosine_backward(const Vec& u, const Vec& x, double coeff, Vec& d_u, Vec& d_x) {
    double nu = norm2(u);
    double nx = norm2(x);
    if (nu == 0.0 || nx == 0.0) throw DomainError("cosine_backward: zero-norm input");
    double d = dot(u, x);
    double inv = 1.0 / (nu * nx);
    double s = d * inv;
    for (size_t i = 0; i < u.size(); ++i) {
        d_u[i] += coeff * (x[i] * inv - s * u[i] / (nu * nu));
        d_x[i] += coeff * (u[i] * inv - s * x[i] / (nx * nx));
    }
}

namespace {

// gate + blend backward shared by the three MoE-style variants.
// d_blend is the gradient on alpha*t + (1-alpha)*v.
void gate_blend_backward(const FusionParams& p, const FuseCache& c, const Vec& d_blend,
                         FusionParams& g, Vec& d_text, Vec& d_image) {
    const size_t dim = p.dim;
    double d_alpha = 0.0;
    for (size_t i = 0; i < dim; ++i) {
        d_alpha += d_blend[i] * (c.text_adapted[i] - c.image_adapted[i]);
        d_text[i] += c.alpha * d_blend[i];
        d_image[i] += (1.0 - c.alpha) * d_blend[i];
    }
    double d_pre = d_alpha * c.alpha * (1.0 - c.alpha);  // sigmoid'
    g.gate_b += d_pre;
    for (size_t i = 0; i < dim; ++i) {
        g.gate_w[i] += d_pre * c.text_adapted[i];
        g.gate_w[dim + i] += d_pre * c.image_adapted[i];
        d_text[i] += d_pre * p.gate_w[i];
        d_image[i] += d_pre * p.gate_w[dim + i];
    }
}

}  // namespace

void fuse_backward(const FusionParams& p, const Vec& text_embedding,
                   const Vec& image_embedding, const FuseCache& c, const Vec& d_fused,
                   FusionParams& g) {
    const size_t dim = p.dim;
    Vec d_pre(dim, 0.0);
    layer_norm_backward(d_fused, p.ln_gain, c.ln, d_pre, g.ln_gain, g.ln_bias);

    Vec d_text(dim, 0.0), d_image(dim, 0.0);

    switch (p.variant) {
        case FusionVariant::Mlp: {
            Vec d_in;
            mlp_backward(p, c, d_pre, g, d_in);
            for (size_t i = 0; i < dim; ++i) {
                d_text[i] += d_in[i];
                d_image[i] += d_in[dim + i];
            }
            break;
        }
        case FusionVariant::Moe: {
            gate_blend_backward(p, c, d_pre, g, d_text, d_image);
            break;
        }
        case FusionVariant::MoeMlp: {
            gate_blend_backward(p, c, d_pre, g, d_text, d_image);
            Vec d_in;
            mlp_backward(p, c, d_pre, g, d_in);
            for (size_t i = 0; i < dim; ++i) {
                d_text[i] += d_in[i];
                d_image[i] += d_in[dim + i];
            }
            break;
        }
        case FusionVariant::Attention: {
            double d_wt = 0.0, d_wv = 0.0;
            for (size_t i = 0; i < dim; ++i) {
                d_wt += d_pre[i] * c.text_adapted[i];
                d_wv += d_pre[i] * c.image_adapted[i];
                d_text[i] += c.attn_wt * d_pre[i];
                d_image[i] += c.attn_wv * d_pre[i];
            }
            // softmax over two scores
            double d_st = (d_wt - d_wv) * c.attn_wt * c.attn_wv;
            g.attn_text_b += d_st;
            g.attn_image_b -= d_st;
            for (size_t i = 0; i < dim; ++i) {
                g.attn_text_w[i] += d_st * c.text_adapted[i];
                g.attn_image_w[i] -= d_st * c.image_adapted[i];
                d_text[i] += d_st * p.attn_text_w[i];
                d_image[i] -= d_st * p.attn_image_w[i];
            }
            break;
        }
        case FusionVariant::MoeBilinear: {
            gate_blend_backward(p, c, d_pre, g, d_text, d_image);
            Vec d_products;
            mlp_backward(p, c, d_pre, g, d_products);
            for (size_t k = 0; k < p.heads; ++k) {
                const Vec& a = c.head_text[k];
                const Vec& b = c.head_image[k];
                Vec d_a(p.proj_dim), d_b(p.proj_dim);
                for (size_t j = 0; j < p.proj_dim; ++j) {
                    double dz = d_products[k * p.proj_dim + j];
                    d_a[j] = dz * b[j];
                    d_b[j] = dz * a[j];
                }
                add_outer(g.text_proj[k], d_a, c.text_adapted);
                add_outer(g.image_proj[k], d_b, c.image_adapted);
                Vec bt = matvec_t(p.text_proj[k], d_a);
                Vec bi = matvec_t(p.image_proj[k], d_b);
                for (size_t i = 0; i < dim; ++i) {
                    d_text[i] += bt[i];
                    d_image[i] += bi[i];
                }
            }
            break;
        }
    }

    add_outer(g.text_adapter, d_text, text_embedding);
    add_outer(g.image_adapter, d_image, image_embedding);
}

void adapter_backward(AdapterKind which, const Vec& input, const Vec& d_out,
                      FusionParams& grads) {
    switch (which) {
        case AdapterKind::Query: add_outer(grads.query_adapter, d_out, input); return;
        case AdapterKind::Text: add_outer(grads.text_adapter, d_out, input); return;
        case AdapterKind::Image: add_outer(grads.image_adapter, d_out, input); return;
    }
}

}  // namespace modalfuse
