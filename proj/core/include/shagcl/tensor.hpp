#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "shagcl/errors.hpp"
#include "shagcl/rng.hpp"

namespace shagcl {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

/// Graph node behind a Tensor handle. The DAG built during a forward pass is
/// the computation tape: children reference parents, so walking the graph
/// from the loss in reverse topological order replays the recorded ops.
struct Node {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::vector<double> grad;  // persistent; accumulates across backward calls
    std::vector<double> pass;  // scratch upstream buffer for one backward pass
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;  // reads `pass`, accumulates into parents' `pass`

    std::size_t numel() const { return data.size(); }
};

}  // namespace detail

/// Dense row-major tensor of 64-bit floats with define-by-run reverse-mode
/// gradients. A Tensor is a cheap shared handle to its graph node; values are
/// immutable once created except for grad accumulation and the explicit
/// mutable_data() hook used by optimizers and finite-difference probes.
class Tensor {
  public:
    Tensor() = default;

    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor scalar(double value);
    static Tensor uniform(Shape shape, Rng& rng, double lo, double hi, bool requires_grad = false);
    static Tensor normal(Shape shape, Rng& rng, double mean, double stddev,
                         bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t ndim() const { return node_->shape.size(); }
    std::size_t numel() const { return node_->data.size(); }
    std::size_t rows() const;  // 2-D only
    std::size_t cols() const;  // 2-D only
    bool requires_grad() const { return node_->requires_grad; }

    const std::vector<double>& data() const { return node_->data; }
    /// In-place access for parameter updates between forward passes.
    std::vector<double>& mutable_data() { return node_->data; }

    bool has_grad() const { return !node_->grad.empty(); }
    /// Accumulated gradient; sized (zero-filled) on first access.
    std::vector<double>& grad();
    void zero_grad();

    double value() const;  // numel() == 1
    double at(std::size_t i) const { return node_->data.at(i); }
    double at(std::size_t r, std::size_t c) const;

    /// Constant copy cut off from the graph (no parents, no grad).
    Tensor detach() const;

    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
    const std::shared_ptr<detail::Node>& node() const { return node_; }

  private:
    std::shared_ptr<detail::Node> node_;
};

enum class Elementwise { kAdd, kSub, kMul };

/// Elementwise op with a fixed broadcast rule: either shapes are equal or b's
/// shape equals a trailing suffix of a's shape. Result has a's shape.
Tensor elementwise(Elementwise op, const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

/// Numerically stable softmax (max subtraction) along `axis`.
Tensor softmax(const Tensor& a, std::size_t axis);

Tensor log(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
Tensor sum(const Tensor& a);   // -> scalar, shape {1}
Tensor mean(const Tensor& a);  // -> scalar, shape {1}

Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len);
Tensor gather_rows(const Tensor& a, std::vector<std::size_t> row_ids);

/// Per-row layer normalization of a 2-D tensor; gain/bias have shape {cols}.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

/// Reverse-mode sweep from a scalar loss. Visits each reachable node exactly
/// once in reverse topological order; gradients of requires_grad tensors
/// accumulate across repeated calls.
void backward(const Tensor& loss);

}  // namespace shagcl
