#include "shagcl/nn.hpp"

#include <cmath>

namespace shagcl {

Linear Linear::init(std::size_t in, std::size_t out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    Linear layer;
    layer.weight = Tensor::uniform({in, out}, rng, -limit, limit, true);
    layer.bias = Tensor::zeros({out}, true);
    return layer;
}

LayerNorm LayerNorm::init(std::size_t dim) {
    LayerNorm norm;
    norm.gain = Tensor::full({dim}, 1.0, true);
    norm.bias = Tensor::zeros({dim}, true);
    return norm;
}

Embedding Embedding::init(std::size_t num_classes, std::size_t dim, Rng& rng) {
    Embedding emb;
    emb.table = Tensor::uniform({num_classes, dim}, rng, -0.1, 0.1, true);
    return emb;
}

}  // namespace shagcl
