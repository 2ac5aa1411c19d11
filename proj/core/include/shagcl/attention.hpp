#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "shagcl/nn.hpp"
#include "shagcl/tensor.hpp"

namespace shagcl {

/// Parameters of one attention unit: multi-head scaled dot-product attention
/// followed by a feed-forward module, both with residual + post-norm.
struct AttentionUnitParams {
    std::size_t head_count = 1;
    std::size_t model_dim = 0;
    Linear query, key, value, output;
    Linear ffn_in, ffn_out;
    LayerNorm norm_attn, norm_ffn;

    static AttentionUnitParams init(std::size_t model_dim, std::size_t head_count,
                                    std::size_t ffn_hidden, Rng& rng);
    void collect(const std::string& prefix, ParamMap& params) const;
};

/// Per-head attention weight matrices captured during a forward pass.
struct AttentionTrace {
    std::vector<Tensor> head_weights;  // each [n_queries, n_keys]
};

/// Queries from x, keys/values from y. Output has x's shape.
Tensor cross_attention(const AttentionUnitParams& unit, const Tensor& x, const Tensor& y,
                       AttentionTrace* trace = nullptr);

/// Cross-attention with both streams equal: intra-modal refinement.
Tensor self_attention(const AttentionUnitParams& unit, const Tensor& x,
                      AttentionTrace* trace = nullptr);

/// A hybrid-attention cell refines one modality: its SA unit reads the
/// modality itself, its CA unit reads the other modality.
struct HaCell {
    AttentionUnitParams self_unit;
    AttentionUnitParams cross_unit;
};

struct HaLayer {
    HaCell visual;
    HaCell semantic;

    static HaLayer init(std::size_t model_dim, std::size_t head_count, std::size_t ffn_hidden,
                        Rng& rng);
    void collect(const std::string& prefix, ParamMap& params) const;
};

/// X_out = SA(X) + CA(X, Y); Y_out = SA(Y) + CA(Y, X), both from the layer's
/// inputs (no sequential coupling inside a layer).
std::pair<Tensor, Tensor> ha_layer(const HaLayer& layer, const Tensor& x, const Tensor& y);

struct ShaStack {
    std::vector<HaLayer> layers;
    std::size_t model_dim = 0;

    static ShaStack init(std::size_t num_layers, std::size_t model_dim, std::size_t head_count,
                         std::size_t ffn_hidden, Rng& rng);
    void collect(const std::string& prefix, ParamMap& params) const;
};

/// Threads paired feature streams through every layer and sums the two final
/// streams. x0 and y0 must have equal row counts and model_dim columns.
Tensor sha_forward(const ShaStack& stack, const Tensor& x0, const Tensor& y0);

}  // namespace shagcl
