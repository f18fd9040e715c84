#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sptir/common.hpp"
#include "sptir/rng.hpp"

namespace sptir {

inline std::int64_t shape_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

inline std::string shape_str(const std::vector<std::int64_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

// Dense row-major n-dimensional value container. Plain value type; the
// autograd graph wraps it (see autograd.hpp). T is float for training and
// double for gradient verification.
template <class T>
struct Tensor {
    std::vector<std::int64_t> shape;
    std::vector<T> data;

    Tensor() = default;

    explicit Tensor(std::vector<std::int64_t> s, T fill = T(0)) : shape(std::move(s)) {
        validate_shape();
        data.assign(static_cast<std::size_t>(numel()), fill);
    }

    Tensor(std::vector<std::int64_t> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        validate_shape();
        if (static_cast<std::int64_t>(data.size()) != numel())
            throw std::invalid_argument("tensor data length does not match shape " + shape_str(shape));
    }

    static Tensor zeros(std::vector<std::int64_t> s) { return Tensor(std::move(s), T(0)); }

    static Tensor constant(std::vector<std::int64_t> s, T v) { return Tensor(std::move(s), v); }

    static Tensor seeded_uniform(std::vector<std::int64_t> s, std::uint64_t seed,
                                 T lo = T(0), T hi = T(1)) {
        Tensor t(std::move(s));
        Rng rng(seed);
        for (auto& v : t.data) v = static_cast<T>(rng.uniform(static_cast<double>(lo), static_cast<double>(hi)));
        return t;
    }

    std::int64_t numel() const { return shape_numel(shape); }
    int rank() const { return static_cast<int>(shape.size()); }
    std::int64_t dim(int i) const { return shape[static_cast<std::size_t>(i)]; }

    T& operator[](std::int64_t i) { return data[static_cast<std::size_t>(i)]; }
    const T& operator[](std::int64_t i) const { return data[static_cast<std::size_t>(i)]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    template <class U>
    Tensor<U> cast() const {
        Tensor<U> out;
        out.shape = shape;
        out.data.resize(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }

private:
    void validate_shape() const {
        if (shape.empty()) throw std::invalid_argument("tensor rank must be >= 1");
        for (auto d : shape)
            if (d < 1) throw std::invalid_argument("tensor dimensions must be >= 1, got " + shape_str(shape));
    }
};

template <class T>
void ensure_finite(const Tensor<T>& t, const char* op) {
    if (!t.all_finite())
        throw NumericError(std::string("non-finite values produced by op '") + op + "'");
}

} // namespace sptir
