#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sptir/tensor.hpp"

namespace sptir {

// Reverse-mode autodiff over a dynamically built DAG. Nodes own their
// parents; a backward function distributes the node's gradient into them.
// Single-threaded per graph, fixed iteration order everywhere, so results
// are bitwise deterministic.
template <class T>
struct Node {
    Tensor<T> value;
    Tensor<T> grad;        // allocated on first accumulation
    bool has_grad = false;
    bool requires_grad = false;
    const char* op = "leaf";
    std::vector<std::shared_ptr<Node<T>>> parents;
    std::function<void(Node<T>&)> backward_fn;

    void accumulate(const Tensor<T>& g) {
        if (!requires_grad) return;
        if (!has_grad) {
            grad = g;
            has_grad = true;
            return;
        }
        for (std::size_t i = 0; i < grad.data.size(); ++i) grad.data[i] += g.data[i];
    }
};

template <class T>
using NodePtr = std::shared_ptr<Node<T>>;

// Cheap handle to a graph node.
template <class T>
class Value {
public:
    Value() = default;
    explicit Value(NodePtr<T> n) : node_(std::move(n)) {}

    static Value leaf(Tensor<T> t, bool requires_grad = false) {
        auto n = std::make_shared<Node<T>>();
        n->value = std::move(t);
        n->requires_grad = requires_grad;
        return Value(std::move(n));
    }

    bool defined() const { return node_ != nullptr; }
    // rvalue overloads copy: the node dies with the handle, so references
    // into a temporary Value must not escape
    const Tensor<T>& tensor() const& { return node_->value; }
    Tensor<T> tensor() && { return node_->value; }
    Tensor<T>& tensor_mut() { return node_->value; }
    const std::vector<std::int64_t>& shape() const& { return node_->value.shape; }
    std::vector<std::int64_t> shape() && { return node_->value.shape; }
    bool requires_grad() const { return node_ && node_->requires_grad; }
    bool has_grad() const { return node_ && node_->has_grad; }

    const Tensor<T>& grad() const {
        if (!node_ || !node_->has_grad)
            throw std::logic_error("gradient absent; run backward first");
        return node_->grad;
    }

    void zero_grad() {
        if (!node_) return;
        node_->has_grad = false;
        node_->grad = Tensor<T>();
    }

    const NodePtr<T>& node() const { return node_; }

private:
    NodePtr<T> node_;
};

namespace detail {

// Shared op constructor: propagates requires_grad, validates finiteness.
template <class T>
Value<T> make_op(const char* op, Tensor<T> out, std::vector<NodePtr<T>> parents,
                 std::function<void(Node<T>&)> backward) {
    ensure_finite(out, op);
    auto n = std::make_shared<Node<T>>();
    n->value = std::move(out);
    n->op = op;
    for (const auto& p : parents)
        if (p->requires_grad) n->requires_grad = true;
    n->parents = std::move(parents);
    if (n->requires_grad) n->backward_fn = std::move(backward);
    return Value<T>(std::move(n));
}

} // namespace detail

template <class T>
Value<T> add(const Value<T>& a, const Value<T>& b) {
    if (!a.tensor().same_shape(b.tensor()))
        throw std::invalid_argument("add: shape mismatch " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    Tensor<T> out = a.tensor();
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.tensor().data[i];
    return detail::make_op<T>("add", std::move(out), {a.node(), b.node()}, [](Node<T>& self) {
        self.parents[0]->accumulate(self.grad);
        self.parents[1]->accumulate(self.grad);
    });
}

template <class T>
Value<T> mul(const Value<T>& a, const Value<T>& b) {
    if (!a.tensor().same_shape(b.tensor()))
        throw std::invalid_argument("mul: shape mismatch " + shape_str(a.shape()) + " vs " +
                                    shape_str(b.shape()));
    Tensor<T> out = a.tensor();
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.tensor().data[i];
    return detail::make_op<T>("mul", std::move(out), {a.node(), b.node()}, [](Node<T>& self) {
        const auto& av = self.parents[0]->value;
        const auto& bv = self.parents[1]->value;
        if (self.parents[0]->requires_grad) {
            Tensor<T> ga = self.grad;
            for (std::size_t i = 0; i < ga.data.size(); ++i) ga.data[i] *= bv.data[i];
            self.parents[0]->accumulate(ga);
        }
        if (self.parents[1]->requires_grad) {
            Tensor<T> gb = self.grad;
            for (std::size_t i = 0; i < gb.data.size(); ++i) gb.data[i] *= av.data[i];
            self.parents[1]->accumulate(gb);
        }
    });
}

template <class T>
Value<T> scalar_scale(const Value<T>& x, double s) {
    Tensor<T> out = x.tensor();
    for (auto& v : out.data) v = static_cast<T>(v * s);
    return detail::make_op<T>("scalar_scale", std::move(out), {x.node()}, [s](Node<T>& self) {
        Tensor<T> g = self.grad;
        for (auto& v : g.data) v = static_cast<T>(v * s);
        self.parents[0]->accumulate(g);
    });
}

// Stack [N,C_k,H,W] parts along the channel axis in argument order.
template <class T>
Value<T> concat_channels(const std::vector<Value<T>>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_channels: no parts");
    for (const auto& p : parts)
        if (p.tensor().rank() != 4)
            throw std::invalid_argument("concat_channels: parts must be [N,C,H,W]");
    const auto& first = parts[0].tensor();
    const std::int64_t n = first.dim(0), h = first.dim(2), w = first.dim(3);
    std::int64_t ctot = 0;
    for (const auto& p : parts) {
        const auto& t = p.tensor();
        if (t.dim(0) != n || t.dim(2) != h || t.dim(3) != w)
            throw std::invalid_argument("concat_channels: N/H/W mismatch " + shape_str(t.shape) +
                                        " vs " + shape_str(first.shape));
        ctot += t.dim(1);
    }
    Tensor<T> out({n, ctot, h, w});
    const std::int64_t plane = h * w;
    std::int64_t coff = 0;
    for (const auto& p : parts) {
        const auto& t = p.tensor();
        const std::int64_t c = t.dim(1);
        for (std::int64_t ni = 0; ni < n; ++ni)
            std::copy(t.data.begin() + ni * c * plane, t.data.begin() + (ni + 1) * c * plane,
                      out.data.begin() + (ni * ctot + coff) * plane);
        coff += c;
    }
    std::vector<NodePtr<T>> nodes;
    nodes.reserve(parts.size());
    for (const auto& p : parts) nodes.push_back(p.node());
    return detail::make_op<T>("concat_channels", std::move(out), std::move(nodes),
                              [n, ctot, plane](Node<T>& self) {
        std::int64_t coff = 0;
        for (auto& parent : self.parents) {
            const std::int64_t c = parent->value.dim(1);
            if (parent->requires_grad) {
                Tensor<T> g(parent->value.shape);
                for (std::int64_t ni = 0; ni < n; ++ni)
                    std::copy(self.grad.data.begin() + (ni * ctot + coff) * plane,
                              self.grad.data.begin() + (ni * ctot + coff + c) * plane,
                              g.data.begin() + ni * c * plane);
                parent->accumulate(g);
            }
            coff += c;
        }
    });
}

template <class T>
Value<T> sum(const Value<T>& x) {
    double acc = 0.0;
    for (const T& v : x.tensor().data) acc += static_cast<double>(v);
    Tensor<T> out({1});
    out.data[0] = static_cast<T>(acc);
    return detail::make_op<T>("sum", std::move(out), {x.node()}, [](Node<T>& self) {
        Tensor<T> g(self.parents[0]->value.shape, self.grad.data[0]);
        self.parents[0]->accumulate(g);
    });
}

template <class T>
Value<T> mean(const Value<T>& x) {
    const std::int64_t n = x.tensor().numel();
    double acc = 0.0;
    for (const T& v : x.tensor().data) acc += static_cast<double>(v);
    Tensor<T> out({1});
    out.data[0] = static_cast<T>(acc / static_cast<double>(n));
    return detail::make_op<T>("mean", std::move(out), {x.node()}, [n](Node<T>& self) {
        Tensor<T> g(self.parents[0]->value.shape,
                    static_cast<T>(self.grad.data[0] / static_cast<T>(n)));
        self.parents[0]->accumulate(g);
    });
}

// Mean absolute difference. Subgradient at a tie is 0.
template <class T>
Value<T> l1_loss(const Value<T>& pred, const Tensor<T>& target) {
    if (!pred.tensor().same_shape(target))
        throw std::invalid_argument("l1_loss: shape mismatch " + shape_str(pred.shape()) + " vs " +
                                    shape_str(target.shape));
    const std::int64_t n = target.numel();
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
        acc += std::abs(static_cast<double>(pred.tensor()[i]) - static_cast<double>(target[i]));
    Tensor<T> out({1});
    out.data[0] = static_cast<T>(acc / static_cast<double>(n));
    return detail::make_op<T>("l1_loss", std::move(out), {pred.node()}, [target, n](Node<T>& self) {
        const T scale = self.grad.data[0] / static_cast<T>(n);
        Tensor<T> g(self.parents[0]->value.shape);
        for (std::int64_t i = 0; i < n; ++i) {
            const T d = self.parents[0]->value[i] - target[i];
            g[i] = d > T(0) ? scale : (d < T(0) ? -scale : T(0));
        }
        self.parents[0]->accumulate(g);
    });
}

template <class T>
Value<T> l2_loss(const Value<T>& pred, const Tensor<T>& target) {
    if (!pred.tensor().same_shape(target))
        throw std::invalid_argument("l2_loss: shape mismatch");
    const std::int64_t n = target.numel();
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pred.tensor()[i]) - static_cast<double>(target[i]);
        acc += d * d;
    }
    Tensor<T> out({1});
    out.data[0] = static_cast<T>(acc / static_cast<double>(n));
    return detail::make_op<T>("l2_loss", std::move(out), {pred.node()}, [target, n](Node<T>& self) {
        const T scale = T(2) * self.grad.data[0] / static_cast<T>(n);
        Tensor<T> g(self.parents[0]->value.shape);
        for (std::int64_t i = 0; i < n; ++i)
            g[i] = scale * (self.parents[0]->value[i] - target[i]);
        self.parents[0]->accumulate(g);
    });
}

// Populates grad on every requires_grad node reachable from the scalar loss.
// Fan-out accumulates by summation. Calling again while gradients from a
// previous call are still present is an error: zero them first.
template <class T>
void backward(const Value<T>& loss) {
    if (!loss.defined() || loss.tensor().numel() != 1)
        throw std::invalid_argument("backward: loss must be a defined scalar");
    if (!loss.node()->requires_grad) return;

    enum class Mark : std::uint8_t { kOpen, kDone };
    std::unordered_map<Node<T>*, Mark> marks;
    std::vector<Node<T>*> order; // reverse topological (root first after reversal)
    std::vector<std::pair<Node<T>*, std::size_t>> stack;
    stack.emplace_back(loss.node().get(), 0);
    marks[loss.node().get()] = Mark::kOpen;
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (node->has_grad)
            throw std::logic_error(std::string("backward: node '") + node->op +
                                   "' already holds a gradient; zero_grad before the next backward");
        if (idx < node->parents.size()) {
            Node<T>* parent = node->parents[idx++].get();
            auto it = marks.find(parent);
            if (it == marks.end()) {
                marks[parent] = Mark::kOpen;
                stack.emplace_back(parent, 0);
            } else if (it->second == Mark::kOpen) {
                throw std::logic_error("backward: cycle detected in computation graph");
            }
        } else {
            marks[node] = Mark::kDone;
            order.push_back(node);
            stack.pop_back();
        }
    }

    loss.node()->accumulate(Tensor<T>({1}, T(1)));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* node = *it;
        if (node->has_grad && node->backward_fn) node->backward_fn(*node);
    }
}

// Max relative error between analytic gradients and central finite
// differences of a scalar-valued tensor function. 64-bit only: float
// cancellation drowns the comparison.
inline double grad_check(const std::function<Value<double>(const Value<double>&)>& f,
                         const Tensor<double>& x, double h = 1e-5) {
    auto leaf = Value<double>::leaf(x, true);
    Value<double> y = f(leaf);
    if (y.tensor().numel() != 1) throw std::invalid_argument("grad_check: f must be scalar-valued");
    backward(y);
    Tensor<double> analytic =
        leaf.has_grad() ? leaf.grad() : Tensor<double>::zeros(x.shape);

    // clear gradients from every reachable node (shared parameter leaves
    // outlive this graph and would poison the caller's next backward)
    {
        std::vector<Node<double>*> stack{y.node().get()};
        std::unordered_map<Node<double>*, bool> seen;
        while (!stack.empty()) {
            Node<double>* node = stack.back();
            stack.pop_back();
            if (seen[node]) continue;
            seen[node] = true;
            node->has_grad = false;
            node->grad = Tensor<double>();
            for (const auto& p : node->parents) stack.push_back(p.get());
        }
    }

    double max_rel = 0.0;
    for (std::int64_t i = 0; i < x.numel(); ++i) {
        Tensor<double> xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fp = f(Value<double>::leaf(xp, false)).tensor()[0];
        const double fm = f(Value<double>::leaf(xm, false)).tensor()[0];
        const double numeric = (fp - fm) / (2.0 * h);
        const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, std::abs(analytic[i] - numeric) / denom);
    }
    return max_rel;
}

} // namespace sptir
