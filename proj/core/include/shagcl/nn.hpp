#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shagcl/tensor.hpp"

namespace shagcl {

/// Ordered (name, tensor) registry used by optimizers, checkpoints, and
/// gradient checks. Insertion order is the canonical parameter order.
struct ParamMap {
    std::vector<std::pair<std::string, Tensor>> entries;

    void add(std::string name, Tensor t) { entries.emplace_back(std::move(name), std::move(t)); }
    std::size_t size() const { return entries.size(); }
    void zero_grads() {
        for (auto& [name, t] : entries) t.zero_grad();
    }
    Tensor* find(const std::string& name) {
        for (auto& [n, t] : entries)
            if (n == name) return &t;
        return nullptr;
    }
};

/// Affine map y = x W + b with W: [in, out], b: [out].
struct Linear {
    Tensor weight;
    Tensor bias;

    static Linear init(std::size_t in, std::size_t out, Rng& rng);
    Tensor operator()(const Tensor& x) const { return add(matmul(x, weight), bias); }
    void collect(const std::string& prefix, ParamMap& params) const {
        params.add(prefix + ".weight", weight);
        params.add(prefix + ".bias", bias);
    }
};

/// Learned per-feature affine for layer normalization.
struct LayerNorm {
    Tensor gain;
    Tensor bias;
    double eps = 1e-5;

    static LayerNorm init(std::size_t dim);
    Tensor operator()(const Tensor& x) const { return layer_norm(x, gain, bias, eps); }
    void collect(const std::string& prefix, ParamMap& params) const {
        params.add(prefix + ".gain", gain);
        params.add(prefix + ".bias", bias);
    }
};

/// Learned label-embedding table, rows indexed by class id.
struct Embedding {
    Tensor table;  // [num_classes, dim]

    static Embedding init(std::size_t num_classes, std::size_t dim, Rng& rng);
    Tensor operator()(const std::vector<std::size_t>& ids) const {
        return gather_rows(table, ids);
    }
    void collect(const std::string& prefix, ParamMap& params) const {
        params.add(prefix + ".table", table);
    }
};

}  // namespace shagcl
