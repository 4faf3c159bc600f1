#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "pdet/nn/tensor.hpp"

namespace pdet::nn {

// Layers cache whatever the exact backward pass needs during forward() and
// release it in backward(); calling backward() twice without an intervening
// forward() trips GraphConsumed. Parameter gradients accumulate additively
// until zeroed by the optimizer step.

// ---------------------------------------------------------------------------
// 1-D convolution, zero-padded "same" cross-correlation, odd kernel.
template <typename S>
class Conv1dSame {
public:
    Param<S> w; // (out_ch, in_ch, k)
    Param<S> b; // (out_ch)

    Conv1dSame() = default;
    Conv1dSame(std::string name, std::size_t in_ch, std::size_t out_ch, std::size_t k)
        : w(name + ".weight", {out_ch, in_ch, k}),
          b(name + ".bias", {out_ch}),
          in_ch_(in_ch), out_ch_(out_ch), k_(k) {
        if (k % 2 == 0)
            fail(ErrorCode::ShapeMismatch, "Conv1dSame: kernel must be odd");
    }

    Tensor<S> forward(const Tensor<S>& x) {
        require_shape(x, 3, "conv1d");
        if (x.channels() != in_ch_)
            fail(ErrorCode::ShapeMismatch, "conv1d: input channels " +
                 std::to_string(x.channels()) + " != " + std::to_string(in_ch_));
        const std::size_t B = x.batch(), L = x.length();
        const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k_ / 2);
        const std::ptrdiff_t Ls = static_cast<std::ptrdiff_t>(L);

        Tensor<S> y({B, out_ch_, L});
        for (std::size_t bi = 0; bi < B; ++bi) {
            for (std::size_t oc = 0; oc < out_ch_; ++oc) {
                S* out = y.row(bi, oc);
                const S bias = b.value.data[oc];
                for (std::size_t t = 0; t < L; ++t) out[t] = bias;
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    const S* xin = x.row(bi, ic);
                    const S* wk = w.value.data.data() + (oc * in_ch_ + ic) * k_;
                    for (std::size_t kk = 0; kk < k_; ++kk) {
                        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(kk) - pad;
                        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
                        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(Ls, Ls - shift);
                        const S wv = wk[kk];
                        for (std::ptrdiff_t t = t0; t < t1; ++t)
                            out[t] += wv * xin[t + shift];
                    }
                }
            }
        }
        x_cache_ = x;
        ready_ = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& gy) {
        consume("conv1d");
        const Tensor<S>& x = x_cache_;
        if (gy.shape != std::vector<std::size_t>{x.batch(), out_ch_, x.length()})
            fail(ErrorCode::ShapeMismatch, "conv1d backward: bad grad shape");
        const std::size_t B = x.batch(), L = x.length();
        const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k_ / 2);
        const std::ptrdiff_t Ls = static_cast<std::ptrdiff_t>(L);

        Tensor<S> gx({B, in_ch_, L});
        for (std::size_t bi = 0; bi < B; ++bi) {
            for (std::size_t oc = 0; oc < out_ch_; ++oc) {
                const S* gout = gy.row(bi, oc);
                S gb = S(0);
                for (std::size_t t = 0; t < L; ++t) gb += gout[t];
                b.grad.data[oc] += gb;
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    const S* xin = x.row(bi, ic);
                    S* gin = gx.row(bi, ic);
                    S* gw = w.grad.data.data() + (oc * in_ch_ + ic) * k_;
                    const S* wk = w.value.data.data() + (oc * in_ch_ + ic) * k_;
                    for (std::size_t kk = 0; kk < k_; ++kk) {
                        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(kk) - pad;
                        const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, -shift);
                        const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(Ls, Ls - shift);
                        S acc = S(0);
                        const S wv = wk[kk];
                        for (std::ptrdiff_t t = t0; t < t1; ++t) {
                            acc += gout[t] * xin[t + shift];
                            gin[t + shift] += wv * gout[t];
                        }
                        gw[kk] += acc;
                    }
                }
            }
        }
        x_cache_ = Tensor<S>();
        return gx;
    }

    std::size_t in_channels() const { return in_ch_; }
    std::size_t out_channels() const { return out_ch_; }
    std::size_t kernel() const { return k_; }

private:
    void consume(const char* who) {
        if (!ready_)
            fail(ErrorCode::GraphConsumed,
                 std::string(who) + ": backward without a recorded forward");
        ready_ = false;
    }

    std::size_t in_ch_ = 0, out_ch_ = 0, k_ = 0;
    Tensor<S> x_cache_;
    bool ready_ = false;
};

// ---------------------------------------------------------------------------
// Batch normalization over (batch, length) per channel. Biased variance with
// floor 1e-5 (floored channels are treated as constant-σ in backward);
// running stats updated with momentum 0.1 in train mode, used in eval mode.
template <typename S>
class BatchNorm1d {
public:
    Param<S> gamma;
    Param<S> beta;
    Tensor<S> running_mean;
    Tensor<S> running_var;

    static constexpr double kMomentum = 0.1;
    static constexpr double kVarFloor = 1e-5;

    BatchNorm1d() = default;
    BatchNorm1d(std::string name, std::size_t channels)
        : gamma(name + ".gamma", {channels}),
          beta(name + ".beta", {channels}),
          running_mean({channels}),
          running_var({channels}),
          ch_(channels),
          name_(std::move(name)) {
        std::fill(gamma.value.data.begin(), gamma.value.data.end(), S(1));
        std::fill(running_var.data.begin(), running_var.data.end(), S(1));
    }

    Tensor<S> forward(const Tensor<S>& x, bool train) {
        require_shape(x, 3, "batchnorm1d");
        if (x.channels() != ch_)
            fail(ErrorCode::ShapeMismatch, "batchnorm1d: channel mismatch");
        const std::size_t B = x.batch(), L = x.length();
        const std::size_t m = B * L;
        if (train && m < 2)
            fail(ErrorCode::ShapeMismatch, "batchnorm1d: train mode needs batch*length >= 2");

        Tensor<S> y(x.shape);
        mean_.assign(ch_, S(0));
        inv_sd_.assign(ch_, S(0));
        floored_.assign(ch_, false);

        for (std::size_t c = 0; c < ch_; ++c) {
            S mu, var;
            if (train) {
                double acc = 0.0;
                for (std::size_t bi = 0; bi < B; ++bi) {
                    const S* xin = x.row(bi, c);
                    for (std::size_t t = 0; t < L; ++t) acc += static_cast<double>(xin[t]);
                }
                mu = static_cast<S>(acc / static_cast<double>(m));
                double vacc = 0.0;
                for (std::size_t bi = 0; bi < B; ++bi) {
                    const S* xin = x.row(bi, c);
                    for (std::size_t t = 0; t < L; ++t) {
                        const double d = static_cast<double>(xin[t]) - static_cast<double>(mu);
                        vacc += d * d;
                    }
                }
                var = static_cast<S>(vacc / static_cast<double>(m));
                running_mean.data[c] = static_cast<S>(
                    (1.0 - kMomentum) * static_cast<double>(running_mean.data[c]) +
                    kMomentum * static_cast<double>(mu));
                running_var.data[c] = static_cast<S>(
                    (1.0 - kMomentum) * static_cast<double>(running_var.data[c]) +
                    kMomentum * static_cast<double>(var));
            } else {
                mu = running_mean.data[c];
                var = running_var.data[c];
            }
            if (static_cast<double>(var) < kVarFloor) {
                var = static_cast<S>(kVarFloor);
                floored_[c] = true;
            }
            const S inv_sd = S(1) / static_cast<S>(std::sqrt(static_cast<double>(var)));
            mean_[c] = mu;
            inv_sd_[c] = inv_sd;

            const S g = gamma.value.data[c], be = beta.value.data[c];
            for (std::size_t bi = 0; bi < B; ++bi) {
                const S* xin = x.row(bi, c);
                S* out = y.row(bi, c);
                for (std::size_t t = 0; t < L; ++t)
                    out[t] = g * (xin[t] - mu) * inv_sd + be;
            }
        }
        x_cache_ = x;
        train_cached_ = train;
        ready_ = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& gy) {
        if (!ready_)
            fail(ErrorCode::GraphConsumed, "batchnorm1d: backward without a recorded forward");
        ready_ = false;
        const Tensor<S>& x = x_cache_;
        if (!gy.same_shape(x))
            fail(ErrorCode::ShapeMismatch, "batchnorm1d backward: bad grad shape");
        const std::size_t B = x.batch(), L = x.length();
        const double m = static_cast<double>(B * L);

        Tensor<S> gx(x.shape);
        for (std::size_t c = 0; c < ch_; ++c) {
            const S mu = mean_[c], inv_sd = inv_sd_[c];
            const S g = gamma.value.data[c];
            double sum_gy = 0.0, sum_gy_xhat = 0.0;
            for (std::size_t bi = 0; bi < B; ++bi) {
                const S* xin = x.row(bi, c);
                const S* gout = gy.row(bi, c);
                for (std::size_t t = 0; t < L; ++t) {
                    const double xhat = static_cast<double>((xin[t] - mu) * inv_sd);
                    sum_gy += static_cast<double>(gout[t]);
                    sum_gy_xhat += static_cast<double>(gout[t]) * xhat;
                }
            }
            gamma.grad.data[c] += static_cast<S>(sum_gy_xhat);
            beta.grad.data[c] += static_cast<S>(sum_gy);

            if (!train_cached_) {
                // eval mode: μ, σ are constants
                for (std::size_t bi = 0; bi < B; ++bi) {
                    const S* gout = gy.row(bi, c);
                    S* gin = gx.row(bi, c);
                    for (std::size_t t = 0; t < L; ++t)
                        gin[t] = g * inv_sd * gout[t];
                }
                continue;
            }
            const double mean_gy = sum_gy / m;
            const double mean_gy_xhat = floored_[c] ? 0.0 : sum_gy_xhat / m;
            for (std::size_t bi = 0; bi < B; ++bi) {
                const S* xin = x.row(bi, c);
                const S* gout = gy.row(bi, c);
                S* gin = gx.row(bi, c);
                for (std::size_t t = 0; t < L; ++t) {
                    const double xhat = static_cast<double>((xin[t] - mu) * inv_sd);
                    gin[t] = static_cast<S>(
                        static_cast<double>(g) * static_cast<double>(inv_sd) *
                        (static_cast<double>(gout[t]) - mean_gy - xhat * mean_gy_xhat));
                }
            }
        }
        x_cache_ = Tensor<S>();
        return gx;
    }

    std::size_t channels() const { return ch_; }
    const std::string& name() const { return name_; }

private:
    std::size_t ch_ = 0;
    std::string name_;
    Tensor<S> x_cache_;
    std::vector<S> mean_, inv_sd_;
    std::vector<bool> floored_;
    bool train_cached_ = false;
    bool ready_ = false;
};

// ---------------------------------------------------------------------------
// Elementwise activations. ReLU's subgradient at 0 is defined as 0.
template <typename S>
class ReLU {
public:
    Tensor<S> forward(const Tensor<S>& x) {
        Tensor<S> y(x.shape);
        for (std::size_t i = 0; i < x.size(); ++i)
            y.data[i] = x.data[i] > S(0) ? x.data[i] : S(0);
        x_cache_ = x;
        ready_ = true;
        return y;
    }
    Tensor<S> backward(const Tensor<S>& gy) {
        if (!ready_) fail(ErrorCode::GraphConsumed, "relu: backward without forward");
        ready_ = false;
        if (!gy.same_shape(x_cache_))
            fail(ErrorCode::ShapeMismatch, "relu backward: bad grad shape");
        Tensor<S> gx(gy.shape);
        for (std::size_t i = 0; i < gy.size(); ++i)
            gx.data[i] = x_cache_.data[i] > S(0) ? gy.data[i] : S(0);
        x_cache_ = Tensor<S>();
        return gx;
    }

private:
    Tensor<S> x_cache_;
    bool ready_ = false;
};

template <typename S>
class Tanh {
public:
    Tensor<S> forward(const Tensor<S>& x) {
        Tensor<S> y(x.shape);
        for (std::size_t i = 0; i < x.size(); ++i)
            y.data[i] = static_cast<S>(std::tanh(static_cast<double>(x.data[i])));
        y_cache_ = y;
        ready_ = true;
        return y;
    }
    Tensor<S> backward(const Tensor<S>& gy) {
        if (!ready_) fail(ErrorCode::GraphConsumed, "tanh: backward without forward");
        ready_ = false;
        if (!gy.same_shape(y_cache_))
            fail(ErrorCode::ShapeMismatch, "tanh backward: bad grad shape");
        Tensor<S> gx(gy.shape);
        for (std::size_t i = 0; i < gy.size(); ++i) {
            const S th = y_cache_.data[i];
            gx.data[i] = gy.data[i] * (S(1) - th * th);
        }
        y_cache_ = Tensor<S>();
        return gx;
    }

private:
    Tensor<S> y_cache_;
    bool ready_ = false;
};

// ---------------------------------------------------------------------------
// Non-overlapping mean pooling; a tail shorter than k is dropped. Backward
// spreads 1/k to the pooled positions (dropped tail gets zero gradient).
template <typename S>
class AvgPool1d {
public:
    explicit AvgPool1d(std::size_t k = 2) : k_(k) {}

    Tensor<S> forward(const Tensor<S>& x) {
        require_shape(x, 3, "avgpool1d");
        if (k_ < 2) fail(ErrorCode::ShapeMismatch, "avgpool1d: k must be >= 2");
        if (x.length() < k_)
            fail(ErrorCode::InputTooShort, "avgpool1d: length < k");
        const std::size_t B = x.batch(), C = x.channels();
        const std::size_t Lo = x.length() / k_;
        Tensor<S> y({B, C, Lo});
        const S inv = S(1) / static_cast<S>(k_);
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < C; ++c) {
                const S* xin = x.row(bi, c);
                S* out = y.row(bi, c);
                for (std::size_t t = 0; t < Lo; ++t) {
                    S acc = S(0);
                    for (std::size_t j = 0; j < k_; ++j) acc += xin[t * k_ + j];
                    out[t] = acc * inv;
                }
            }
        in_len_ = x.length();
        in_shape_ = x.shape;
        ready_ = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& gy) {
        if (!ready_) fail(ErrorCode::GraphConsumed, "avgpool1d: backward without forward");
        ready_ = false;
        Tensor<S> gx(in_shape_);
        const std::size_t B = gx.batch(), C = gx.channels();
        const std::size_t Lo = in_len_ / k_;
        if (gy.shape != std::vector<std::size_t>{B, C, Lo})
            fail(ErrorCode::ShapeMismatch, "avgpool1d backward: bad grad shape");
        const S inv = S(1) / static_cast<S>(k_);
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < C; ++c) {
                const S* gout = gy.row(bi, c);
                S* gin = gx.row(bi, c);
                for (std::size_t t = 0; t < Lo; ++t) {
                    const S v = gout[t] * inv;
                    for (std::size_t j = 0; j < k_; ++j) gin[t * k_ + j] = v;
                }
            }
        return gx;
    }

    std::size_t k() const { return k_; }

private:
    std::size_t k_ = 2;
    std::size_t in_len_ = 0;
    std::vector<std::size_t> in_shape_;
    bool ready_ = false;
};

// ---------------------------------------------------------------------------
// Nearest-neighbor upsampling by k; backward sums over each repeat group.
template <typename S>
class UpsampleNearest {
public:
    explicit UpsampleNearest(std::size_t k = 2) : k_(k) {}

    Tensor<S> forward(const Tensor<S>& x) {
        require_shape(x, 3, "upsample_nearest");
        if (k_ < 2) fail(ErrorCode::ShapeMismatch, "upsample_nearest: k must be >= 2");
        const std::size_t B = x.batch(), C = x.channels(), L = x.length();
        Tensor<S> y({B, C, L * k_});
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < C; ++c) {
                const S* xin = x.row(bi, c);
                S* out = y.row(bi, c);
                for (std::size_t t = 0; t < L; ++t)
                    for (std::size_t j = 0; j < k_; ++j) out[t * k_ + j] = xin[t];
            }
        in_shape_ = x.shape;
        ready_ = true;
        return y;
    }

    Tensor<S> backward(const Tensor<S>& gy) {
        if (!ready_) fail(ErrorCode::GraphConsumed, "upsample_nearest: backward without forward");
        ready_ = false;
        Tensor<S> gx(in_shape_);
        const std::size_t B = gx.batch(), C = gx.channels(), L = gx.length();
        if (gy.shape != std::vector<std::size_t>{B, C, L * k_})
            fail(ErrorCode::ShapeMismatch, "upsample_nearest backward: bad grad shape");
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t c = 0; c < C; ++c) {
                const S* gout = gy.row(bi, c);
                S* gin = gx.row(bi, c);
                for (std::size_t t = 0; t < L; ++t) {
                    S acc = S(0);
                    for (std::size_t j = 0; j < k_; ++j) acc += gout[t * k_ + j];
                    gin[t] = acc;
                }
            }
        return gx;
    }

private:
    std::size_t k_ = 2;
    std::vector<std::size_t> in_shape_;
    bool ready_ = false;
};

// ---------------------------------------------------------------------------
// Channel concatenation (free functions; the split is its exact adjoint).
template <typename S>
Tensor<S> concat_channels(const Tensor<S>& a, const Tensor<S>& b) {
    require_shape(a, 3, "concat_channels");
    require_shape(b, 3, "concat_channels");
    if (a.batch() != b.batch() || a.length() != b.length())
        fail(ErrorCode::ShapeMismatch, "concat_channels: batch/length mismatch");
    const std::size_t B = a.batch(), L = a.length();
    Tensor<S> y({B, a.channels() + b.channels(), L});
    for (std::size_t bi = 0; bi < B; ++bi) {
        for (std::size_t c = 0; c < a.channels(); ++c)
            std::copy(a.row(bi, c), a.row(bi, c) + L, y.row(bi, c));
        for (std::size_t c = 0; c < b.channels(); ++c)
            std::copy(b.row(bi, c), b.row(bi, c) + L, y.row(bi, a.channels() + c));
    }
    return y;
}

template <typename S>
std::pair<Tensor<S>, Tensor<S>> split_channels(const Tensor<S>& g, std::size_t ch_a) {
    require_shape(g, 3, "split_channels");
    if (ch_a > g.channels())
        fail(ErrorCode::ShapeMismatch, "split_channels: split point beyond channels");
    const std::size_t B = g.batch(), L = g.length();
    Tensor<S> ga({B, ch_a, L});
    Tensor<S> gb({B, g.channels() - ch_a, L});
    for (std::size_t bi = 0; bi < B; ++bi) {
        for (std::size_t c = 0; c < ch_a; ++c)
            std::copy(g.row(bi, c), g.row(bi, c) + L, ga.row(bi, c));
        for (std::size_t c = ch_a; c < g.channels(); ++c)
            std::copy(g.row(bi, c), g.row(bi, c) + L, gb.row(bi, c - ch_a));
    }
    return {std::move(ga), std::move(gb)};
}

} // namespace pdet::nn
