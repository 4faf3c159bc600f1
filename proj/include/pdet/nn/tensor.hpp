#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "pdet/errors.hpp"

namespace pdet::nn {

// Dense row-major tensor. Activations are (batch, channels, length); conv
// weights reuse the same container as (out_ch, in_ch, k); 1-D tensors (biases,
// batchnorm vectors) as (n). Scalar type S is float in training mode and
// double in test/gradcheck mode.
template <typename S>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<S> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shp) : shape(std::move(shp)) {
        data.assign(count(shape), S(0));
    }

    static std::size_t count(const std::vector<std::size_t>& shp) {
        std::size_t n = 1;
        for (std::size_t d : shp) n *= d;
        return n;
    }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    // (batch, channels, length) accessors
    std::size_t batch() const { return shape.at(0); }
    std::size_t channels() const { return shape.at(1); }
    std::size_t length() const { return shape.at(2); }

    S* row(std::size_t b, std::size_t c) {
        return data.data() + (b * shape[1] + c) * shape[2];
    }
    const S* row(std::size_t b, std::size_t c) const {
        return data.data() + (b * shape[1] + c) * shape[2];
    }

    void zero() { std::fill(data.begin(), data.end(), S(0)); }
};

// Learnable tensor with its gradient accumulator.
template <typename S>
struct Param {
    Tensor<S> value;
    Tensor<S> grad;
    std::string name;

    Param() = default;
    Param(std::string nm, std::vector<std::size_t> shp)
        : value(shp), grad(std::move(shp)), name(std::move(nm)) {}
};

template <typename S>
inline void require_shape(const Tensor<S>& t, std::size_t dims, const char* who) {
    if (t.shape.size() != dims)
        fail(ErrorCode::ShapeMismatch, std::string(who) + ": wrong tensor rank");
}

} // namespace pdet::nn
