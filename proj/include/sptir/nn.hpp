#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "sptir/autograd.hpp"

namespace sptir {

// '*' matches any character run; used for parameter name patterns.
inline bool glob_match(std::string_view pattern, std::string_view s) {
    std::size_t p = 0, i = 0, star = std::string_view::npos, star_i = 0;
    while (i < s.size()) {
        if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            star_i = i;
        } else if (p < pattern.size() && pattern[p] == s[i]) {
            ++p;
            ++i;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            i = ++star_i;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

// Ordered name -> parameter registry with freeze flags and Adam moment
// buffers. Registration order is the serialization order.
template <class T>
class ParamSet {
public:
    struct Entry {
        std::string name;
        Value<T> param;
        bool trainable = true;
        Tensor<T> adam_m, adam_v; // sized on first optimizer step
    };

    Value<T> add(const std::string& name, Tensor<T> init, bool trainable = true) {
        if (index_.count(name)) throw std::invalid_argument("parameter registered twice: " + name);
        Entry e;
        e.name = name;
        e.param = Value<T>::leaf(std::move(init), trainable);
        e.trainable = trainable;
        index_[name] = entries_.size();
        entries_.push_back(std::move(e));
        return entries_.back().param;
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    Entry& at(const std::string& name) {
        auto it = index_.find(name);
        if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + name);
        return entries_[it->second];
    }
    const Entry& at(const std::string& name) const {
        return const_cast<ParamSet*>(this)->at(name);
    }

    std::vector<Entry>& entries() { return entries_; }
    const std::vector<Entry>& entries() const { return entries_; }

    // A frozen parameter also stops requiring gradients, so backward skips it.
    std::size_t set_trainable(const std::string& pattern, bool flag) {
        std::size_t matched = 0;
        for (auto& e : entries_) {
            if (!glob_match(pattern, e.name)) continue;
            e.trainable = flag;
            e.param.node()->requires_grad = flag;
            if (!flag) e.param.zero_grad();
            ++matched;
        }
        if (matched == 0)
            throw std::invalid_argument("set_trainable: pattern matched nothing: " + pattern);
        return matched;
    }

    void zero_grad() {
        for (auto& e : entries_) e.param.zero_grad();
    }

    std::int64_t n_scalars() const {
        std::int64_t n = 0;
        for (const auto& e : entries_) n += e.param.tensor().numel();
        return n;
    }
    std::int64_t n_trainable_scalars() const {
        std::int64_t n = 0;
        for (const auto& e : entries_)
            if (e.trainable) n += e.param.tensor().numel();
        return n;
    }

private:
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

// Stride-1, zero-padded same-size convolution parameters.
template <class T>
struct ConvParams {
    Value<T> weight; // [C_out, C_in, k, k]
    Value<T> bias;   // [C_out]
    int cin = 0, cout = 0, k = 0;
};

// Weights ~ uniform(-a, a), a = sqrt(6 / fan_in); biases zero.
template <class T>
ConvParams<T> make_conv(ParamSet<T>& ps, const std::string& prefix, int cin, int cout, int k,
                        Rng& rng, bool trainable = true) {
    if (k < 1 || k % 2 == 0)
        throw std::invalid_argument("kernel size must be odd and positive, got " + std::to_string(k));
    if (cin < 1 || cout < 1) throw std::invalid_argument("conv channels must be >= 1");
    const double a = std::sqrt(6.0 / (static_cast<double>(cin) * k * k));
    Tensor<T> w({cout, cin, k, k});
    for (auto& v : w.data) v = static_cast<T>(rng.uniform(-a, a));
    ConvParams<T> p;
    p.cin = cin;
    p.cout = cout;
    p.k = k;
    p.weight = ps.add(prefix + ".weight", std::move(w), trainable);
    p.bias = ps.add(prefix + ".bias", Tensor<T>({cout}), trainable);
    return p;
}

namespace detail {

template <class T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// cols layout: [C_in*k*k rows, N*H*W columns], column index = n*H*W + y*W + x.
template <class T>
void im2col(const Tensor<T>& x, int k, std::vector<T>& cols) {
    const std::int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const std::int64_t p = k / 2, hw = h * w, nhw = n * hw;
    cols.assign(static_cast<std::size_t>(c * k * k * nhw), T(0));
    for (std::int64_t ci = 0; ci < c; ++ci) {
        for (std::int64_t ky = 0; ky < k; ++ky) {
            for (std::int64_t kx = 0; kx < k; ++kx) {
                T* crow = cols.data() + ((ci * k + ky) * k + kx) * nhw;
                const std::int64_t dx = kx - p;
                const std::int64_t x0 = std::max<std::int64_t>(0, -dx);
                const std::int64_t x1 = std::min<std::int64_t>(w, w - dx);
                for (std::int64_t ni = 0; ni < n; ++ni) {
                    const T* xplane = x.data.data() + (ni * c + ci) * hw;
                    T* dst = crow + ni * hw;
                    for (std::int64_t y = 0; y < h; ++y) {
                        const std::int64_t sy = y + ky - p;
                        if (sy < 0 || sy >= h || x0 >= x1) continue;
                        std::copy(xplane + sy * w + x0 + dx, xplane + sy * w + x1 + dx,
                                  dst + y * w + x0);
                    }
                }
            }
        }
    }
}

// Scatter-add transpose of im2col.
template <class T>
void col2im(const std::vector<T>& cols, int k, Tensor<T>& dx_acc) {
    const std::int64_t n = dx_acc.dim(0), c = dx_acc.dim(1), h = dx_acc.dim(2), w = dx_acc.dim(3);
    const std::int64_t p = k / 2, hw = h * w, nhw = n * hw;
    for (std::int64_t ci = 0; ci < c; ++ci) {
        for (std::int64_t ky = 0; ky < k; ++ky) {
            for (std::int64_t kx = 0; kx < k; ++kx) {
                const T* crow = cols.data() + ((ci * k + ky) * k + kx) * nhw;
                const std::int64_t dx = kx - p;
                const std::int64_t x0 = std::max<std::int64_t>(0, -dx);
                const std::int64_t x1 = std::min<std::int64_t>(w, w - dx);
                for (std::int64_t ni = 0; ni < n; ++ni) {
                    T* xplane = dx_acc.data.data() + (ni * c + ci) * hw;
                    const T* src = crow + ni * hw;
                    for (std::int64_t y = 0; y < h; ++y) {
                        const std::int64_t sy = y + ky - p;
                        if (sy < 0 || sy >= h || x0 >= x1) continue;
                        for (std::int64_t xi = x0; xi < x1; ++xi)
                            xplane[sy * w + xi + dx] += src[y * w + xi];
                    }
                }
            }
        }
    }
}

template <class T>
Tensor<T> conv_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, int k) {
    const std::int64_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), wd = x.dim(3);
    const std::int64_t cout = w.dim(0), hw = h * wd, nhw = n * hw;
    std::vector<T> cols;
    im2col(x, k, cols);
    std::vector<T> outm(static_cast<std::size_t>(cout * nhw));
    Eigen::Map<const MatRM<T>> wm(w.data.data(), cout, cin * k * k);
    Eigen::Map<const MatRM<T>> cm(cols.data(), cin * k * k, nhw);
    Eigen::Map<MatRM<T>> om(outm.data(), cout, nhw);
    om.noalias() = wm * cm;
    Tensor<T> out({n, cout, h, wd});
    for (std::int64_t ni = 0; ni < n; ++ni) {
        for (std::int64_t co = 0; co < cout; ++co) {
            const T* src = outm.data() + co * nhw + ni * hw;
            T* dst = out.data.data() + (ni * cout + co) * hw;
            const T bv = b.data[static_cast<std::size_t>(co)];
            for (std::int64_t i = 0; i < hw; ++i) dst[i] = src[i] + bv;
        }
    }
    return out;
}

} // namespace detail

// Same-padded stride-1 cross-correlation plus bias. The im2col/GEMM path is
// an implementation detail; tests pin it against a direct nested-loop oracle.
template <class T>
Value<T> conv2d(const Value<T>& x, const ConvParams<T>& p) {
    if (x.tensor().rank() != 4)
        throw std::invalid_argument("conv2d: input must be [N,C,H,W], got " + shape_str(x.shape()));
    if (x.tensor().dim(1) != p.cin)
        throw std::invalid_argument("conv2d: channel mismatch, input has " +
                                    std::to_string(x.tensor().dim(1)) + " channels, layer expects " +
                                    std::to_string(p.cin));
    const int k = p.k;
    Tensor<T> out = detail::conv_forward(x.tensor(), p.weight.tensor(), p.bias.tensor(), k);
    return detail::make_op<T>(
        "conv2d", std::move(out), {x.node(), p.weight.node(), p.bias.node()}, [k](Node<T>& self) {
            Node<T>& xn = *self.parents[0];
            Node<T>& wn = *self.parents[1];
            Node<T>& bn = *self.parents[2];
            const std::int64_t n = xn.value.dim(0), cin = xn.value.dim(1);
            const std::int64_t h = xn.value.dim(2), w = xn.value.dim(3);
            const std::int64_t cout = wn.value.dim(0), hw = h * w, nhw = n * hw;

            // gather [C_out, N*H*W] view of the output gradient
            std::vector<T> doutm(static_cast<std::size_t>(cout * nhw));
            for (std::int64_t ni = 0; ni < n; ++ni)
                for (std::int64_t co = 0; co < cout; ++co)
                    std::copy(self.grad.data.begin() + (ni * cout + co) * hw,
                              self.grad.data.begin() + (ni * cout + co + 1) * hw,
                              doutm.begin() + co * nhw + ni * hw);
            Eigen::Map<const detail::MatRM<T>> dom(doutm.data(), cout, nhw);

            if (bn.requires_grad) {
                Tensor<T> db({cout});
                for (std::int64_t co = 0; co < cout; ++co) {
                    double acc = 0.0;
                    const T* row = doutm.data() + co * nhw;
                    for (std::int64_t i = 0; i < nhw; ++i) acc += static_cast<double>(row[i]);
                    db[co] = static_cast<T>(acc);
                }
                bn.accumulate(db);
            }
            if (wn.requires_grad) {
                std::vector<T> cols;
                detail::im2col(xn.value, k, cols);
                Eigen::Map<const detail::MatRM<T>> cm(cols.data(), cin * k * k, nhw);
                Tensor<T> dw(wn.value.shape);
                Eigen::Map<detail::MatRM<T>> dwm(dw.data.data(), cout, cin * k * k);
                dwm.noalias() = dom * cm.transpose();
                wn.accumulate(dw);
            }
            if (xn.requires_grad) {
                std::vector<T> gcols(static_cast<std::size_t>(cin * k * k * nhw));
                Eigen::Map<const detail::MatRM<T>> wm(wn.value.data.data(), cout, cin * k * k);
                Eigen::Map<detail::MatRM<T>> gm(gcols.data(), cin * k * k, nhw);
                gm.noalias() = wm.transpose() * dom;
                Tensor<T> dx(xn.value.shape);
                detail::col2im(gcols, k, dx);
                xn.accumulate(dx);
            }
        });
}

template <class T>
Value<T> relu(const Value<T>& x) {
    Tensor<T> out = x.tensor();
    for (auto& v : out.data) v = v > T(0) ? v : T(0);
    return detail::make_op<T>("relu", std::move(out), {x.node()}, [](Node<T>& self) {
        const auto& xv = self.parents[0]->value;
        Tensor<T> g = self.grad;
        for (std::size_t i = 0; i < g.data.size(); ++i)
            if (!(xv.data[i] > T(0))) g.data[i] = T(0);
        self.parents[0]->accumulate(g);
    });
}

// Sub-pixel rearrangement: out[n,c,y,x] = in[n, c*r^2 + r*(y%r) + (x%r), y/r, x/r].
template <class T>
Value<T> pixel_shuffle(const Value<T>& x, int r) {
    if (r < 1) throw std::invalid_argument("pixel_shuffle: factor must be >= 1");
    if (x.tensor().rank() != 4)
        throw std::invalid_argument("pixel_shuffle: input must be [N,C,H,W]");
    const std::int64_t n = x.tensor().dim(0), cin = x.tensor().dim(1);
    const std::int64_t h = x.tensor().dim(2), w = x.tensor().dim(3);
    const std::int64_t r2 = static_cast<std::int64_t>(r) * r;
    if (cin % r2 != 0)
        throw std::invalid_argument("pixel_shuffle: channels (" + std::to_string(cin) +
                                    ") not divisible by r^2 (" + std::to_string(r2) + ")");
    const std::int64_t cout = cin / r2, ho = h * r, wo = w * r;
    Tensor<T> out({n, cout, ho, wo});
    const auto& in = x.tensor();
    for (std::int64_t ni = 0; ni < n; ++ni)
        for (std::int64_t c = 0; c < cout; ++c)
            for (std::int64_t y = 0; y < ho; ++y)
                for (std::int64_t xo = 0; xo < wo; ++xo) {
                    const std::int64_t ci = c * r2 + r * (y % r) + (xo % r);
                    out[((ni * cout + c) * ho + y) * wo + xo] =
                        in[((ni * cin + ci) * h + y / r) * w + xo / r];
                }
    return detail::make_op<T>("pixel_shuffle", std::move(out), {x.node()},
                              [r, r2, cout, ho, wo](Node<T>& self) {
        Node<T>& xn = *self.parents[0];
        const std::int64_t n = xn.value.dim(0), cin = xn.value.dim(1);
        const std::int64_t h = xn.value.dim(2), w = xn.value.dim(3);
        Tensor<T> g(xn.value.shape);
        for (std::int64_t ni = 0; ni < n; ++ni)
            for (std::int64_t c = 0; c < cout; ++c)
                for (std::int64_t y = 0; y < ho; ++y)
                    for (std::int64_t xo = 0; xo < wo; ++xo) {
                        const std::int64_t ci = c * r2 + r * (y % r) + (xo % r);
                        g[((ni * cin + ci) * h + y / r) * w + xo / r] =
                            self.grad[((ni * cout + c) * ho + y) * wo + xo];
                    }
        xn.accumulate(g);
    });
}

// conv -> ReLU -> conv with per-instance parameters; the f(.) building
// element reused by the prior encoder, SPT branches and backbone blocks.
template <class T>
struct FBlock {
    ConvParams<T> conv1, conv2;
    int cin() const { return conv1.cin; }
    int cout() const { return conv2.cout; }
};

template <class T>
FBlock<T> make_f_block(ParamSet<T>& ps, const std::string& prefix, int cin, int cmid, int cout,
                       int k, Rng& rng, bool trainable = true) {
    FBlock<T> f;
    f.conv1 = make_conv(ps, prefix + ".conv1", cin, cmid, k, rng, trainable);
    f.conv2 = make_conv(ps, prefix + ".conv2", cmid, cout, k, rng, trainable);
    return f;
}

template <class T>
Value<T> f_block(const Value<T>& x, const FBlock<T>& f) {
    return conv2d(relu(conv2d(x, f.conv1)), f.conv2);
}

} // namespace sptir
