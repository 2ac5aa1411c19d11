#include "shagcl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace shagcl {

namespace {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

NodePtr make_leaf(Shape shape, std::vector<double> values, bool requires_grad) {
    if (shape_numel(shape) != values.size()) {
        throw ShapeError("tensor data length " + std::to_string(values.size()) +
                         " does not match shape " + shape_str(shape));
    }
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(values);
    node->requires_grad = requires_grad;
    return node;
}

NodePtr make_result(Shape shape, std::vector<double> values, std::vector<NodePtr> parents,
                    std::function<void(Node&)> backprop) {
    auto node = std::make_shared<Node>();
    node->shape = std::move(shape);
    node->data = std::move(values);
    bool needs = false;
    for (const auto& p : parents) needs = needs || p->requires_grad;
    node->requires_grad = needs;
    if (needs) {
        node->parents = std::move(parents);
        node->backprop = std::move(backprop);
    }
    return node;
}

bool suffix_broadcastable(const Shape& a, const Shape& b) {
    if (b.size() > a.size()) return false;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (a[a.size() - b.size() + i] != b[i]) return false;
    }
    return true;
}

void require_2d(const Tensor& t, const char* what) {
    if (t.ndim() != 2) {
        throw ShapeError(std::string(what) + " expects a 2-D tensor, got shape " +
                         shape_str(t.shape()));
    }
}

}  // namespace

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    std::vector<double> values(shape_numel(shape), 0.0);
    return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    std::vector<double> values(shape_numel(shape), value);
    return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

Tensor Tensor::uniform(Shape shape, Rng& rng, double lo, double hi, bool requires_grad) {
    std::vector<double> values(shape_numel(shape));
    for (double& v : values) v = rng.uniform(lo, hi);
    return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::normal(Shape shape, Rng& rng, double mean, double stddev, bool requires_grad) {
    std::vector<double> values(shape_numel(shape));
    for (double& v : values) v = mean + stddev * rng.normal();
    return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

std::size_t Tensor::rows() const {
    require_2d(*this, "rows()");
    return node_->shape[0];
}

std::size_t Tensor::cols() const {
    require_2d(*this, "cols()");
    return node_->shape[1];
}

std::vector<double>& Tensor::grad() {
    if (node_->grad.size() != node_->data.size()) node_->grad.assign(node_->data.size(), 0.0);
    return node_->grad;
}

void Tensor::zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

double Tensor::value() const {
    if (numel() != 1) {
        throw ShapeError("value() requires a scalar tensor, got shape " + shape_str(shape()));
    }
    return node_->data[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    require_2d(*this, "at(r, c)");
    return node_->data.at(r * node_->shape[1] + c);
}

Tensor Tensor::detach() const { return Tensor(make_leaf(node_->shape, node_->data, false)); }

Tensor elementwise(Elementwise op, const Tensor& a, const Tensor& b) {
    if (!suffix_broadcastable(a.shape(), b.shape())) {
        throw ShapeError("elementwise shapes " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()) + " are not suffix-broadcastable");
    }
    const auto& ad = a.data();
    const auto& bd = b.data();
    const std::size_t n = ad.size();
    const std::size_t bn = bd.size();
    std::vector<double> out(n);
    switch (op) {
        case Elementwise::kAdd:
            for (std::size_t i = 0; i < n; ++i) out[i] = ad[i] + bd[i % bn];
            break;
        case Elementwise::kSub:
            for (std::size_t i = 0; i < n; ++i) out[i] = ad[i] - bd[i % bn];
            break;
        case Elementwise::kMul:
            for (std::size_t i = 0; i < n; ++i) out[i] = ad[i] * bd[i % bn];
            break;
    }
    auto an = a.node();
    auto bn_node = b.node();
    auto backprop = [op, an, bn_node](detail::Node& self) {
        const std::size_t n = self.pass.size();
        const std::size_t bn = bn_node->data.size();
        switch (op) {
            case Elementwise::kAdd:
                if (an->requires_grad)
                    for (std::size_t i = 0; i < n; ++i) an->pass[i] += self.pass[i];
                if (bn_node->requires_grad)
                    for (std::size_t i = 0; i < n; ++i) bn_node->pass[i % bn] += self.pass[i];
                break;
            case Elementwise::kSub:
                if (an->requires_grad)
                    for (std::size_t i = 0; i < n; ++i) an->pass[i] += self.pass[i];
                if (bn_node->requires_grad)
                    for (std::size_t i = 0; i < n; ++i) bn_node->pass[i % bn] -= self.pass[i];
                break;
            case Elementwise::kMul:
                if (an->requires_grad)
                    for (std::size_t i = 0; i < n; ++i)
                        an->pass[i] += self.pass[i] * bn_node->data[i % bn];
                if (bn_node->requires_grad)
                    for (std::size_t i = 0; i < n; ++i)
                        bn_node->pass[i % bn] += self.pass[i] * an->data[i];
                break;
        }
    };
    return Tensor(make_result(a.shape(), std::move(out), {an, bn_node}, std::move(backprop)));
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::kAdd, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::kSub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::kMul, a, b); }

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_2d(a, "matmul");
    require_2d(b, "matmul");
    const std::size_t m = a.shape()[0], k = a.shape()[1];
    const std::size_t k2 = b.shape()[0], n = b.shape()[1];
    if (k != k2) {
        throw ShapeError("matmul inner dimensions disagree: " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    const double* ad = a.data().data();
    const double* bd = b.data().data();
    std::vector<double> out(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ad[i * k + p];
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * bd[p * n + j];
        }
    }
    auto an = a.node();
    auto bn = b.node();
    auto backprop = [an, bn, m, k, n](detail::Node& self) {
        const double* up = self.pass.data();
        if (an->requires_grad) {  // grad_a = upstream * b^T
            const double* bd = bn->data.data();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const double uv = up[i * n + j];
                    for (std::size_t p = 0; p < k; ++p) an->pass[i * k + p] += uv * bd[p * n + j];
                }
        }
        if (bn->requires_grad) {  // grad_b = a^T * upstream
            const double* ad = an->data.data();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    const double av = ad[i * k + p];
                    for (std::size_t j = 0; j < n; ++j) bn->pass[p * n + j] += av * up[i * n + j];
                }
        }
    };
    return Tensor(make_result({m, n}, std::move(out), {an, bn}, std::move(backprop)));
}

Tensor transpose(const Tensor& a) {
    require_2d(a, "transpose");
    const std::size_t r = a.shape()[0], c = a.shape()[1];
    std::vector<double> out(r * c);
    const auto& ad = a.data();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j * r + i] = ad[i * c + j];
    auto an = a.node();
    auto backprop = [an, r, c](detail::Node& self) {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) an->pass[i * c + j] += self.pass[j * r + i];
    };
    return Tensor(make_result({c, r}, std::move(out), {an}, std::move(backprop)));
}

Tensor softmax(const Tensor& a, std::size_t axis) {
    if (axis >= a.ndim()) {
        throw ShapeError("softmax axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(a.shape()));
    }
    const Shape& shape = a.shape();
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
    const std::size_t len = shape[axis];
    const auto& ad = a.data();
    std::vector<double> out(ad.size());
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * len * inner + in;
            double mx = ad[base];
            for (std::size_t j = 1; j < len; ++j) mx = std::max(mx, ad[base + j * inner]);
            double total = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                const double e = std::exp(ad[base + j * inner] - mx);
                out[base + j * inner] = e;
                total += e;
            }
            for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= total;
        }
    }
    auto an = a.node();
    auto backprop = [an, outer, inner, len](detail::Node& self) {
        if (!an->requires_grad) return;
        const auto& y = self.data;
        const auto& up = self.pass;
        for (std::size_t o = 0; o < outer; ++o) {
            for (std::size_t in = 0; in < inner; ++in) {
                const std::size_t base = o * len * inner + in;
                double dot = 0.0;
                for (std::size_t j = 0; j < len; ++j) {
                    const std::size_t ix = base + j * inner;
                    dot += up[ix] * y[ix];
                }
                for (std::size_t j = 0; j < len; ++j) {
                    const std::size_t ix = base + j * inner;
                    an->pass[ix] += y[ix] * (up[ix] - dot);
                }
            }
        }
    };
    return Tensor(make_result(a.shape(), std::move(out), {an}, std::move(backprop)));
}

Tensor log(const Tensor& a) {
    const auto& ad = a.data();
    std::vector<double> out(ad.size());
    for (std::size_t i = 0; i < ad.size(); ++i) out[i] = std::log(ad[i]);
    auto an = a.node();
    auto backprop = [an](detail::Node& self) {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < self.pass.size(); ++i)
            an->pass[i] += self.pass[i] / an->data[i];
    };
    return Tensor(make_result(a.shape(), std::move(out), {an}, std::move(backprop)));
}

Tensor relu(const Tensor& a) {
    const auto& ad = a.data();
    std::vector<double> out(ad.size());
    for (std::size_t i = 0; i < ad.size(); ++i) out[i] = ad[i] > 0.0 ? ad[i] : 0.0;
    auto an = a.node();
    auto backprop = [an](detail::Node& self) {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < self.pass.size(); ++i)
            if (an->data[i] > 0.0) an->pass[i] += self.pass[i];
    };
    return Tensor(make_result(a.shape(), std::move(out), {an}, std::move(backprop)));
}

Tensor scale(const Tensor& a, double factor) {
    const auto& ad = a.data();
    std::vector<double> out(ad.size());
    for (std::size_t i = 0; i < ad.size(); ++i) out[i] = ad[i] * factor;
    auto an = a.node();
    auto backprop = [an, factor](detail::Node& self) {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < self.pass.size(); ++i) an->pass[i] += self.pass[i] * factor;
    };
    return Tensor(make_result(a.shape(), std::move(out), {an}, std::move(backprop)));
}

Tensor sum(const Tensor& a) {
    double total = 0.0;
    for (double v : a.data()) total += v;
    auto an = a.node();
    auto backprop = [an](detail::Node& self) {
        if (!an->requires_grad) return;
        const double up = self.pass[0];
        for (std::size_t i = 0; i < an->pass.size(); ++i) an->pass[i] += up;
    };
    return Tensor(make_result({1}, {total}, {an}, std::move(backprop)));
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols of zero tensors");
    const std::size_t r = parts[0].rows();
    std::size_t total_cols = 0;
    for (const auto& p : parts) {
        require_2d(p, "concat_cols");
        if (p.shape()[0] != r) throw ShapeError("concat_cols row counts differ");
        total_cols += p.shape()[1];
    }
    std::vector<double> out(r * total_cols);
    std::size_t col0 = 0;
    for (const auto& p : parts) {
        const std::size_t c = p.shape()[1];
        const auto& pd = p.data();
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) out[i * total_cols + col0 + j] = pd[i * c + j];
        col0 += c;
    }
    std::vector<NodePtr> parents;
    parents.reserve(parts.size());
    for (const auto& p : parts) parents.push_back(p.node());
    auto backprop = [parents, r, total_cols](detail::Node& self) {
        std::size_t col0 = 0;
        for (const auto& pn : parents) {
            const std::size_t c = pn->shape[1];
            if (pn->requires_grad) {
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j)
                        pn->pass[i * c + j] += self.pass[i * total_cols + col0 + j];
            }
            col0 += c;
        }
    };
    return Tensor(make_result({r, total_cols}, std::move(out), std::move(parents),
                              std::move(backprop)));
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows of zero tensors");
    const std::size_t c = parts[0].cols();
    std::size_t total_rows = 0;
    for (const auto& p : parts) {
        require_2d(p, "concat_rows");
        if (p.shape()[1] != c) throw ShapeError("concat_rows column counts differ");
        total_rows += p.shape()[0];
    }
    std::vector<double> out;
    out.reserve(total_rows * c);
    for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
    std::vector<NodePtr> parents;
    parents.reserve(parts.size());
    for (const auto& p : parts) parents.push_back(p.node());
    auto backprop = [parents](detail::Node& self) {
        std::size_t offset = 0;
        for (const auto& pn : parents) {
            const std::size_t n = pn->data.size();
            if (pn->requires_grad) {
                for (std::size_t i = 0; i < n; ++i) pn->pass[i] += self.pass[offset + i];
            }
            offset += n;
        }
    };
    return Tensor(make_result({total_rows, c}, std::move(out), std::move(parents),
                              std::move(backprop)));
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len) {
    require_2d(a, "slice_cols");
    const std::size_t r = a.shape()[0], c = a.shape()[1];
    if (start + len > c) {
        throw ShapeError("slice_cols [" + std::to_string(start) + ", " +
                         std::to_string(start + len) + ") exceeds " + std::to_string(c) +
                         " columns");
    }
    const auto& ad = a.data();
    std::vector<double> out(r * len);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < len; ++j) out[i * len + j] = ad[i * c + start + j];
    auto an = a.node();
    auto backprop = [an, r, c, start, len](detail::Node& self) {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < len; ++j)
                an->pass[i * c + start + j] += self.pass[i * len + j];
    };
    return Tensor(make_result({r, len}, std::move(out), {an}, std::move(backprop)));
}

Tensor gather_rows(const Tensor& a, std::vector<std::size_t> row_ids) {
    require_2d(a, "gather_rows");
    const std::size_t r = a.shape()[0], c = a.shape()[1];
    for (std::size_t id : row_ids) {
        if (id >= r) {
            throw IndexError("gather_rows index " + std::to_string(id) + " out of range for " +
                             std::to_string(r) + " rows");
        }
    }
    const auto& ad = a.data();
    std::vector<double> out(row_ids.size() * c);
    for (std::size_t i = 0; i < row_ids.size(); ++i)
        for (std::size_t j = 0; j < c; ++j) out[i * c + j] = ad[row_ids[i] * c + j];
    auto an = a.node();
    auto backprop = [an, ids = std::move(row_ids), c](detail::Node& self) {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = 0; j < c; ++j) an->pass[ids[i] * c + j] += self.pass[i * c + j];
    };
    return Tensor(make_result({out.size() / c, c}, std::move(out), {an}, std::move(backprop)));
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    require_2d(x, "layer_norm");
    const std::size_t r = x.shape()[0], c = x.shape()[1];
    if (gain.numel() != c || bias.numel() != c) {
        throw ShapeError("layer_norm gain/bias must have " + std::to_string(c) + " elements");
    }
    const auto& xd = x.data();
    const auto& gd = gain.data();
    const auto& bd = bias.data();
    std::vector<double> out(r * c);
    std::vector<double> xhat(r * c);
    std::vector<double> inv_sigma(r);
    for (std::size_t i = 0; i < r; ++i) {
        double mu = 0.0;
        for (std::size_t j = 0; j < c; ++j) mu += xd[i * c + j];
        mu /= static_cast<double>(c);
        double var = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const double d = xd[i * c + j] - mu;
            var += d * d;
        }
        var /= static_cast<double>(c);
        const double inv = 1.0 / std::sqrt(var + eps);
        inv_sigma[i] = inv;
        for (std::size_t j = 0; j < c; ++j) {
            const double h = (xd[i * c + j] - mu) * inv;
            xhat[i * c + j] = h;
            out[i * c + j] = h * gd[j] + bd[j];
        }
    }
    auto xn = x.node();
    auto gn = gain.node();
    auto bn = bias.node();
    auto backprop = [xn, gn, bn, r, c, xhat = std::move(xhat),
                     inv_sigma = std::move(inv_sigma)](detail::Node& self) {
        const auto& up = self.pass;
        if (gn->requires_grad || bn->requires_grad) {
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) {
                    const double u = up[i * c + j];
                    if (gn->requires_grad) gn->pass[j] += u * xhat[i * c + j];
                    if (bn->requires_grad) bn->pass[j] += u;
                }
        }
        if (xn->requires_grad) {
            const auto& gd = gn->data;
            for (std::size_t i = 0; i < r; ++i) {
                double mean_dh = 0.0, mean_dh_xhat = 0.0;
                for (std::size_t j = 0; j < c; ++j) {
                    const double dh = up[i * c + j] * gd[j];
                    mean_dh += dh;
                    mean_dh_xhat += dh * xhat[i * c + j];
                }
                mean_dh /= static_cast<double>(c);
                mean_dh_xhat /= static_cast<double>(c);
                for (std::size_t j = 0; j < c; ++j) {
                    const double dh = up[i * c + j] * gd[j];
                    xn->pass[i * c + j] +=
                        inv_sigma[i] * (dh - mean_dh - xhat[i * c + j] * mean_dh_xhat);
                }
            }
        }
    };
    return Tensor(make_result({r, c}, std::move(out), {xn, gn, bn}, std::move(backprop)));
}

void backward(const Tensor& loss) {
    if (!loss.defined()) throw ShapeError("backward on an undefined tensor");
    if (loss.numel() != 1) {
        throw ShapeError("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
    }

    // Iterative post-order DFS; emission order is a topological order because
    // every node is emitted only after all of its parents.
    std::vector<Node*> topo;
    std::unordered_set<Node*> visited;
    struct Frame {
        Node* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;
    stack.push_back({loss.node().get(), 0});
    visited.insert(loss.node().get());
    while (!stack.empty()) {
        Frame& frame = stack.back();
        if (frame.next_parent < frame.node->parents.size()) {
            Node* parent = frame.node->parents[frame.next_parent++].get();
            if (visited.insert(parent).second) stack.push_back({parent, 0});
        } else {
            topo.push_back(frame.node);
            stack.pop_back();
        }
    }

    for (Node* node : topo) node->pass.assign(node->data.size(), 0.0);
    loss.node()->pass[0] = 1.0;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        if ((*it)->backprop) (*it)->backprop(**it);
    }
    for (Node* node : topo) {
        if (node->requires_grad) {
            if (node->grad.size() != node->data.size()) node->grad.assign(node->data.size(), 0.0);
            for (std::size_t i = 0; i < node->pass.size(); ++i) node->grad[i] += node->pass[i];
        }
        node->pass.clear();
        node->pass.shrink_to_fit();
    }
}

}  // namespace shagcl
