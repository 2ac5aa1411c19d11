#include "shagcl/attention.hpp"

#include <cmath>

namespace shagcl {

AttentionUnitParams AttentionUnitParams::init(std::size_t model_dim, std::size_t head_count,
                                              std::size_t ffn_hidden, Rng& rng) {
    if (head_count == 0 || model_dim % head_count != 0) {
        throw ConfigError("model_dim " + std::to_string(model_dim) +
                          " must be divisible by head_count " + std::to_string(head_count));
    }
    AttentionUnitParams unit;
    unit.head_count = head_count;
    unit.model_dim = model_dim;
    unit.query = Linear::init(model_dim, model_dim, rng);
    unit.key = Linear::init(model_dim, model_dim, rng);
    unit.value = Linear::init(model_dim, model_dim, rng);
    unit.output = Linear::init(model_dim, model_dim, rng);
    unit.ffn_in = Linear::init(model_dim, ffn_hidden, rng);
    unit.ffn_out = Linear::init(ffn_hidden, model_dim, rng);
    unit.norm_attn = LayerNorm::init(model_dim);
    unit.norm_ffn = LayerNorm::init(model_dim);
    return unit;
}

void AttentionUnitParams::collect(const std::string& prefix, ParamMap& params) const {
    query.collect(prefix + ".q", params);
    key.collect(prefix + ".k", params);
    value.collect(prefix + ".v", params);
    output.collect(prefix + ".o", params);
    ffn_in.collect(prefix + ".ffn_in", params);
    ffn_out.collect(prefix + ".ffn_out", params);
    norm_attn.collect(prefix + ".norm_attn", params);
    norm_ffn.collect(prefix + ".norm_ffn", params);
}

Tensor cross_attention(const AttentionUnitParams& unit, const Tensor& x, const Tensor& y,
                       AttentionTrace* trace) {
    if (x.ndim() != 2 || y.ndim() != 2 || x.cols() != unit.model_dim ||
        y.cols() != unit.model_dim) {
        throw ShapeError("attention inputs must be [n, " + std::to_string(unit.model_dim) +
                         "], got " + shape_str(x.shape()) + " and " + shape_str(y.shape()));
    }
    const std::size_t head_dim = unit.model_dim / unit.head_count;
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(head_dim));

    Tensor q = unit.query(x);
    Tensor k = unit.key(y);
    Tensor v = unit.value(y);

    std::vector<Tensor> head_outputs;
    head_outputs.reserve(unit.head_count);
    for (std::size_t h = 0; h < unit.head_count; ++h) {
        Tensor qh = slice_cols(q, h * head_dim, head_dim);
        Tensor kh = slice_cols(k, h * head_dim, head_dim);
        Tensor vh = slice_cols(v, h * head_dim, head_dim);
        Tensor weights = softmax(scale(matmul(qh, transpose(kh)), inv_sqrt_d), 1);
        if (trace) trace->head_weights.push_back(weights);
        head_outputs.push_back(matmul(weights, vh));
    }
    Tensor attended = unit.output(concat_cols(head_outputs));

    Tensor after_attn = unit.norm_attn(add(x, attended));
    Tensor ffn = unit.ffn_out(relu(unit.ffn_in(after_attn)));
    return unit.norm_ffn(add(after_attn, ffn));
}

Tensor self_attention(const AttentionUnitParams& unit, const Tensor& x, AttentionTrace* trace) {
    return cross_attention(unit, x, x, trace);
}

HaLayer HaLayer::init(std::size_t model_dim, std::size_t head_count, std::size_t ffn_hidden,
                      Rng& rng) {
    HaLayer layer;
    layer.visual.self_unit = AttentionUnitParams::init(model_dim, head_count, ffn_hidden, rng);
    layer.visual.cross_unit = AttentionUnitParams::init(model_dim, head_count, ffn_hidden, rng);
    layer.semantic.self_unit = AttentionUnitParams::init(model_dim, head_count, ffn_hidden, rng);
    layer.semantic.cross_unit = AttentionUnitParams::init(model_dim, head_count, ffn_hidden, rng);
    return layer;
}

void HaLayer::collect(const std::string& prefix, ParamMap& params) const {
    visual.self_unit.collect(prefix + ".vis.sa", params);
    visual.cross_unit.collect(prefix + ".vis.ca", params);
    semantic.self_unit.collect(prefix + ".sem.sa", params);
    semantic.cross_unit.collect(prefix + ".sem.ca", params);
}

std::pair<Tensor, Tensor> ha_layer(const HaLayer& layer, const Tensor& x, const Tensor& y) {
    Tensor x_out = add(self_attention(layer.visual.self_unit, x),
                       cross_attention(layer.visual.cross_unit, x, y));
    Tensor y_out = add(self_attention(layer.semantic.self_unit, y),
                       cross_attention(layer.semantic.cross_unit, y, x));
    return {x_out, y_out};
}

ShaStack ShaStack::init(std::size_t num_layers, std::size_t model_dim, std::size_t head_count,
                        std::size_t ffn_hidden, Rng& rng) {
    if (num_layers == 0) throw ConfigError("a SHA stack needs at least one layer");
    ShaStack stack;
    stack.model_dim = model_dim;
    stack.layers.reserve(num_layers);
    for (std::size_t l = 0; l < num_layers; ++l)
        stack.layers.push_back(HaLayer::init(model_dim, head_count, ffn_hidden, rng));
    return stack;
}

void ShaStack::collect(const std::string& prefix, ParamMap& params) const {
    for (std::size_t l = 0; l < layers.size(); ++l)
        layers[l].collect(prefix + ".layer" + std::to_string(l), params);
}

Tensor sha_forward(const ShaStack& stack, const Tensor& x0, const Tensor& y0) {
    if (x0.ndim() != 2 || y0.ndim() != 2 || x0.rows() != y0.rows()) {
        throw ShapeError("sha_forward expects paired streams with equal row counts, got " +
                         shape_str(x0.shape()) + " and " + shape_str(y0.shape()));
    }
    Tensor x = x0;
    Tensor y = y0;
    for (const auto& layer : stack.layers) {
        auto [nx, ny] = ha_layer(layer, x, y);
        x = nx;
        y = ny;
    }
    return add(x, y);
}

}  // namespace shagcl
