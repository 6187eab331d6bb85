#ifndef MODALFUSE_FUSION_HPP_
#define MODALFUSE_FUSION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "modalfuse/numerics.hpp"
#include "modalfuse/tensor.hpp"

namespace modalfuse {

// Item-side fusion architectures under comparison.
enum class FusionVariant { Mlp, Moe, MoeMlp, Attention, MoeBilinear };

const char* variant_name(FusionVariant v);
FusionVariant variant_from_name(const std::string& name);
std::vector<FusionVariant> all_variants();

enum class AdapterKind { Query, Text, Image };

// All trainable tensors. Which fields exist (and receive gradients) depends
// on the variant; inactive fields stay empty.
//
// The interaction MLP input is the concatenated per-head bilinear products
// (heads * proj_dim) for MoE+Bilinear, and concat(text, image) (2 * dim) for
// the MLP and MoE+MLP variants.
struct FusionParams {
    FusionVariant variant = FusionVariant::MoeBilinear;
    size_t dim = 0;
    size_t heads = 0;     // bilinear head count K
    size_t proj_dim = 0;  // per-head projection dim
    size_t mlp_hidden = 0;
    double ln_eps = 1e-5;

    Tensor2 query_adapter, text_adapter, image_adapter;  // dim x dim

    Vec gate_w;  // 2*dim: text block then image block
    double gate_b = 0.0;

    Vec attn_text_w, attn_image_w;  // dim each
    double attn_text_b = 0.0, attn_image_b = 0.0;

    std::vector<Tensor2> text_proj, image_proj;  // K heads, proj_dim x dim

    Tensor2 mlp_w1;  // mlp_hidden x mlp_input_dim
    Vec mlp_b1;
    Tensor2 mlp_w2;  // dim x mlp_hidden
    Vec mlp_b2;

    Vec ln_gain, ln_bias;

    bool has_gate() const {
        return variant == FusionVariant::Moe || variant == FusionVariant::MoeMlp ||
               variant == FusionVariant::MoeBilinear;
    }
    bool has_bilinear() const { return variant == FusionVariant::MoeBilinear; }
    bool has_mlp() const {
        return variant == FusionVariant::Mlp || variant == FusionVariant::MoeMlp ||
               variant == FusionVariant::MoeBilinear;
    }
    bool has_attention() const { return variant == FusionVariant::Attention; }
    // The MLP-only variant reports a constant 0.5; treat it as undefined.
    bool alpha_defined() const { return variant != FusionVariant::Mlp; }

    size_t mlp_input_dim() const {
        return has_bilinear() ? heads * proj_dim : 2 * dim;
    }
};

// Identity adapters, zero gate/attention (alpha starts at 0.5), seeded
// uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] for bilinear and MLP weights,
// unit layer-norm gain. proj_dim 0 defaults to dim/4, mlp_hidden 0 to dim.
FusionParams init_fusion_params(FusionVariant variant, size_t dim, size_t heads,
                                size_t proj_dim, size_t mlp_hidden, uint64_t seed);

// Same shapes, all entries zero; gradient accumulators use this.
FusionParams zeros_like(const FusionParams& p);

// Named views over the variant-active tensors, in a fixed canonical order.
// Views alias the struct's storage; they stay valid while `p` is alive and
// not moved.
std::vector<ParamView> active_views(FusionParams& p);
size_t active_size(const FusionParams& p);

// ---------------------------------------------------------------------------
// Forward passes. The low-level ops operate on whatever vectors they are
// given; fuse_item applies the modality adapters first.

// sigmoid(gate_w . concat(text, image) + gate_b), strictly inside (0, 1).
double gate_weight(const Vec& text, const Vec& image, const FusionParams& p);

// alpha * text + (1 - alpha) * image
Vec blend_modalities(const Vec& text, const Vec& image, double alpha);

// MLP(concat_k (text_proj[k] text) * (image_proj[k] image)) — the
// pre-residual interaction term. Requires the bilinear variant.
Vec bilinear_interaction(const Vec& text, const Vec& image, const FusionParams& p);

// Linear map by the selected adapter matrix.
Vec apply_adapter(const Vec& v, AdapterKind which, const FusionParams& p);

// Per-item fusion outputs kept for analysis.
struct FusionTrace {
    double alpha = 0.5;          // gate weight on text (0.5 placeholder for MLP)
    Vec blended;                 // gated/attention mix before interaction
    double interaction_norm = 0; // L2 of the pre-residual interaction term
    Vec fused;                   // final item embedding
};

// Intermediates required by fuse_backward.
struct FuseCache {
    Vec text_adapted, image_adapted;
    double gate_pre = 0.0, alpha = 0.5;
    double attn_wt = 0.5, attn_wv = 0.5;
    Vec blended;
    std::vector<Vec> head_text, head_image;  // per-head projections
    Vec mlp_in, mlp_pre, mlp_act, mlp_out;
    Vec pre_norm;
    LayerNormCache ln;
    double interaction_norm = 0.0;
    Vec fused;
};

// Full item-side forward: adapters -> variant fusion -> layer norm.
FusionTrace fuse_item(const Vec& text_embedding, const Vec& image_embedding,
                      const FusionParams& p);
FusionTrace fuse_item_cached(const Vec& text_embedding, const Vec& image_embedding,
                             const FusionParams& p, FuseCache& cache);

// Cosine of the adapted query embedding and the fused item embedding.
double score_pair(const Vec& adapted_query, const Vec& fused_item);

// ---------------------------------------------------------------------------
// Hand-derived backward passes. All accumulate into `grads` (a zeros_like
// buffer with the same variant/shapes as `p`).

// d(c * cos(u, x)) accumulated into d_u and d_x given the forward values.
void cosine_backward(const Vec& u, const Vec& x, double coeff, Vec& d_u, Vec& d_x);

// Backprop d_fused through the item fusion path, including the text/image
// adapters (raw embeddings are data, not parameters).
void fuse_backward(const FusionParams& p, const Vec& text_embedding,
                   const Vec& image_embedding, const FuseCache& cache, const Vec& d_fused,
                   FusionParams& grads);

// Backprop through one adapter application: grads.A += d_out (x) input.
void adapter_backward(AdapterKind which, const Vec& input, const Vec& d_out,
                      FusionParams& grads);

}  // namespace modalfuse

#endif  // MODALFUSE_FUSION_HPP_
