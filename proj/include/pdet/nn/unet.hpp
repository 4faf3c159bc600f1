#pragma once

#include <string>
#include <vector>

#include "pdet/nn/layers.hpp"
#include "pdet/rng.hpp"

namespace pdet::nn {

// Fixed 3-stage encoder/decoder; channel plan scales with base_channels as
// base → 2·base → 3·base → 4·base down and 3·base → 2·base → base up (the
// reference configuration base=32 gives 32/64/96/128 and 96/64/32).
struct UNetConfig {
    std::size_t base_channels = 32;
    static constexpr std::size_t kDepth = 3;
    static constexpr std::size_t kKernel = 3;

    void validate() const {
        if (base_channels < 1)
            fail(ErrorCode::BadConfig, "UNetConfig: base_channels must be >= 1");
    }
};

// 1D U-Net signal filter. Wiring per stage: conv(k=3, same) → batchnorm →
// relu, then avgpool(2) on the way down / upsample(2) before the conv on the
// way up. Each down conv past the first additionally sees the raw input
// average-pooled to its resolution as one extra channel; each up conv sees
// the matching down-stage output as a skip. Final conv maps to one channel
// through tanh (no batchnorm).
template <typename S>
class UNet1D {
public:
    explicit UNet1D(UNetConfig cfg = {}) : cfg_(cfg) {
        cfg_.validate();
        const std::size_t B = cfg_.base_channels;
        enc0_ = Conv1dSame<S>("enc0", 1, B, UNetConfig::kKernel);
        bn0_ = BatchNorm1d<S>("enc0.bn", B);
        down1_ = Conv1dSame<S>("down1", B, 2 * B, UNetConfig::kKernel);
        bn1_ = BatchNorm1d<S>("down1.bn", 2 * B);
        down2_ = Conv1dSame<S>("down2", 2 * B + 1, 3 * B, UNetConfig::kKernel);
        bn2_ = BatchNorm1d<S>("down2.bn", 3 * B);
        down3_ = Conv1dSame<S>("down3", 3 * B + 1, 4 * B, UNetConfig::kKernel);
        bn3_ = BatchNorm1d<S>("down3.bn", 4 * B);
        up1_ = Conv1dSame<S>("up1", 4 * B + 3 * B, 3 * B, UNetConfig::kKernel);
        bnu1_ = BatchNorm1d<S>("up1.bn", 3 * B);
        up2_ = Conv1dSame<S>("up2", 3 * B + 2 * B, 2 * B, UNetConfig::kKernel);
        bnu2_ = BatchNorm1d<S>("up2.bn", 2 * B);
        up3_ = Conv1dSame<S>("up3", 2 * B + B, B, UNetConfig::kKernel);
        bnu3_ = BatchNorm1d<S>("up3.bn", B);
        outc_ = Conv1dSame<S>("out", B, 1, UNetConfig::kKernel);
    }

    const UNetConfig& config() const { return cfg_; }

    // Kaiming-uniform fan-in init for conv weights (bound √(6/fan_in)), zero
    // biases, γ=1/β=0; parameters are filled in registration order so a seed
    // pins every weight.
    void init_params(std::uint64_t seed) {
        Rng rng(seed);
        for (Conv1dSame<S>* c : convs()) {
            const double fan_in =
                static_cast<double>(c->in_channels() * c->kernel());
            const double bound = std::sqrt(6.0 / fan_in);
            for (S& v : c->w.value.data)
                v = static_cast<S>(rng.uniform(-bound, bound));
            for (S& v : c->b.value.data) v = S(0);
        }
    }

    Tensor<S> forward(const Tensor<S>& x, bool train) {
        require_shape(x, 3, "unet_forward");
        if (x.channels() != 1)
            fail(ErrorCode::ShapeMismatch, "unet_forward: expected a single input channel");
        const std::size_t T = x.length();
        if (T % 8 != 0)
            fail(ErrorCode::BadLength,
                 "unet_forward: input length " + std::to_string(T) + " not divisible by 8");
        if (T < 16)
            fail(ErrorCode::BadLength, "unet_forward: input length must be >= 16");

        s0_ch_ = cfg_.base_channels;

        Tensor<S> s0 = relu0_.forward(bn0_.forward(enc0_.forward(x), train));
        Tensor<S> d1 = pool1_.forward(relu1_.forward(bn1_.forward(down1_.forward(s0), train)));
        Tensor<S> xp2 = poolx2_.forward(x);
        Tensor<S> d2 = pool2_.forward(relu2_.forward(
            bn2_.forward(down2_.forward(concat_channels(d1, xp2)), train)));
        Tensor<S> xp4 = poolx4_.forward(x);
        Tensor<S> d3 = pool3_.forward(relu3_.forward(
            bn3_.forward(down3_.forward(concat_channels(d2, xp4)), train)));

        Tensor<S> u1 = reluu1_.forward(bnu1_.forward(
            up1_.forward(concat_channels(ups1_.forward(d3), d2)), train));
        Tensor<S> u2 = reluu2_.forward(bnu2_.forward(
            up2_.forward(concat_channels(ups2_.forward(u1), d1)), train));
        Tensor<S> u3 = reluu3_.forward(bnu3_.forward(
            up3_.forward(concat_channels(ups3_.forward(u2), s0)), train));
        Tensor<S> z = act_out_.forward(outc_.forward(u3));
        ready_ = true;
        return z;
    }

    // Reverse pass; returns d(loss)/d(input). Tensors reused by two consumers
    // (the stage outputs feeding both the next stage and a skip) have their
    // gradients summed before flowing further back.
    Tensor<S> backward(const Tensor<S>& gz) {
        if (!ready_)
            fail(ErrorCode::GraphConsumed, "unet backward: no recorded forward");
        ready_ = false;
        const std::size_t B = cfg_.base_channels;

        Tensor<S> g = outc_.backward(act_out_.backward(gz));
        g = up3_.backward(bnu3_.backward(reluu3_.backward(g)));
        auto [g_us3, g_s0_skip] = split_channels(g, 2 * B);
        Tensor<S> g_u2 = ups3_.backward(g_us3);

        g = up2_.backward(bnu2_.backward(reluu2_.backward(g_u2)));
        auto [g_us2, g_d1_skip] = split_channels(g, 3 * B);
        Tensor<S> g_u1 = ups2_.backward(g_us2);

        g = up1_.backward(bnu1_.backward(reluu1_.backward(g_u1)));
        auto [g_us1, g_d2_skip] = split_channels(g, 4 * B);
        Tensor<S> g_d3 = ups1_.backward(g_us1);

        g = down3_.backward(bn3_.backward(relu3_.backward(pool3_.backward(g_d3))));
        auto [g_d2_main, g_xp4] = split_channels(g, 3 * B);
        add_into(g_d2_main, g_d2_skip);

        g = down2_.backward(bn2_.backward(relu2_.backward(pool2_.backward(g_d2_main))));
        auto [g_d1_main, g_xp2] = split_channels(g, 2 * B);
        add_into(g_d1_main, g_d1_skip);

        Tensor<S> g_s0 = down1_.backward(bn1_.backward(relu1_.backward(pool1_.backward(g_d1_main))));
        add_into(g_s0, g_s0_skip);

        Tensor<S> gx = enc0_.backward(bn0_.backward(relu0_.backward(g_s0)));
        add_into(gx, poolx2_.backward(g_xp2));
        add_into(gx, poolx4_.backward(g_xp4));
        return gx;
    }

    std::vector<Param<S>*> params() {
        std::vector<Param<S>*> out;
        for (Conv1dSame<S>* c : convs()) {
            out.push_back(&c->w);
            out.push_back(&c->b);
        }
        for (BatchNorm1d<S>* bn : bns()) {
            out.push_back(&bn->gamma);
            out.push_back(&bn->beta);
        }
        return out;
    }

    // Everything a checkpoint must persist to reproduce eval-mode forwards:
    // learnable parameters plus batchnorm running statistics.
    std::vector<std::pair<std::string, Tensor<S>*>> named_state() {
        std::vector<std::pair<std::string, Tensor<S>*>> out;
        for (Param<S>* p : params()) out.emplace_back(p->name, &p->value);
        for (BatchNorm1d<S>* bn : bns()) {
            out.emplace_back(bn->name() + ".running_mean", &bn->running_mean);
            out.emplace_back(bn->name() + ".running_var", &bn->running_var);
        }
        return out;
    }

    std::size_t param_count() {
        std::size_t n = 0;
        for (Param<S>* p : params()) n += p->value.size();
        return n;
    }

private:
    static void add_into(Tensor<S>& dst, const Tensor<S>& src) {
        if (!dst.same_shape(src))
            fail(ErrorCode::ShapeMismatch, "unet backward: skip gradient shape mismatch");
        for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
    }

    std::vector<Conv1dSame<S>*> convs() {
        return {&enc0_, &down1_, &down2_, &down3_, &up1_, &up2_, &up3_, &outc_};
    }
    std::vector<BatchNorm1d<S>*> bns() {
        return {&bn0_, &bn1_, &bn2_, &bn3_, &bnu1_, &bnu2_, &bnu3_};
    }

    UNetConfig cfg_;
    Conv1dSame<S> enc0_, down1_, down2_, down3_, up1_, up2_, up3_, outc_;
    BatchNorm1d<S> bn0_, bn1_, bn2_, bn3_, bnu1_, bnu2_, bnu3_;
    ReLU<S> relu0_, relu1_, relu2_, relu3_, reluu1_, reluu2_, reluu3_;
    AvgPool1d<S> pool1_{2}, pool2_{2}, pool3_{2}, poolx2_{2}, poolx4_{4};
    UpsampleNearest<S> ups1_{2}, ups2_{2}, ups3_{2};
    Tanh<S> act_out_;
    std::size_t s0_ch_ = 0;
    bool ready_ = false;
};

template <typename S>
Tensor<S> unet_forward(UNet1D<S>& model, const Tensor<S>& x, bool train = false) {
    return model.forward(x, train);
}

} // namespace pdet::nn
