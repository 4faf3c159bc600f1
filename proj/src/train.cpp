#include "pdet/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "pdet/nn/adam.hpp"
#include "pdet/rng.hpp"

namespace pdet {

void TrainConfig::validate() const {
    if (!(lr > 0.0) || !std::isfinite(lr))
        fail(ErrorCode::BadConfig, "train: lr must be positive");
    if (batch_size < 1) fail(ErrorCode::BadConfig, "train: batch_size must be >= 1");
    if (max_epochs < 1) fail(ErrorCode::BadConfig, "train: max_epochs must be >= 1");
    if (patience < 1) fail(ErrorCode::BadConfig, "train: patience must be >= 1");
    if (!(lr_halving > 0.0) || !(lr_halving < 1.0))
        fail(ErrorCode::BadConfig, "train: lr_halving must be in (0, 1)");
    if (!(min_lr > 0.0)) fail(ErrorCode::BadConfig, "train: min_lr must be positive");
    if (nfft < 2) fail(ErrorCode::BadNfft, "train: nfft too small");
}

TrainResult train(nn::UNet1D<float>& model, const std::vector<TimeSeries>& windows,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (windows.empty()) fail(ErrorCode::BadConfig, "train: no windows");
    const std::size_t T = windows.front().size();
    const double fs = windows.front().fs;
    for (const TimeSeries& w : windows) {
        w.validate();
        if (w.size() != T)
            fail(ErrorCode::LengthMismatch, "train: windows have mixed lengths");
        if (w.fs != fs)
            fail(ErrorCode::BadConfig, "train: windows have mixed sample rates");
    }
    if (cfg.nfft < T) fail(ErrorCode::BadNfft, "train: nfft < window length");

    const std::size_t n = windows.size();
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    nn::AdamState<float> adam;
    adam.lr = cfg.lr;
    std::vector<nn::Param<float>*> params = model.params();

    TrainResult result;
    result.best_loss = std::numeric_limits<double>::infinity();
    auto state = model.named_state();
    std::vector<std::vector<float>> best_state(state.size());

    double lr = cfg.lr;
    std::size_t stale = 0; // epochs since the last strict improvement
    bool lr_floored = false;

    TimeSeries yts, xts;
    yts.fs = fs;
    xts.fs = fs;
    yts.samples.resize(T);
    xts.samples.resize(T);

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);

        double sum_se = 0.0, sum_ds = 0.0, sum_bw = 0.0, sum_total = 0.0;

        for (std::size_t start = 0, batch_idx = 0; start < n;
             start += cfg.batch_size, ++batch_idx) {
            const std::size_t bsz = std::min(cfg.batch_size, n - start);

            nn::Tensor<float> xb({bsz, 1, T});
            for (std::size_t b = 0; b < bsz; ++b) {
                const std::vector<double>& src = windows[order[start + b]].samples;
                float* dst = xb.row(b, 0);
                for (std::size_t t = 0; t < T; ++t) dst[t] = static_cast<float>(src[t]);
            }

            nn::Tensor<float> yb = model.forward(xb, /*train=*/true);

            // loss and its gradient are evaluated sample-by-sample in 64-bit;
            // only the averaged gradient drops back to the model's precision
            nn::Tensor<float> gy({bsz, 1, T});
            for (std::size_t b = 0; b < bsz; ++b) {
                const float* yrow = yb.row(b, 0);
                const float* xrow = xb.row(b, 0);
                for (std::size_t t = 0; t < T; ++t) {
                    yts.samples[t] = static_cast<double>(yrow[t]);
                    xts.samples[t] = static_cast<double>(xrow[t]);
                }
                LossBreakdown lb;
                std::vector<double> grad;
                try {
                    grad = periodicity_loss_grad(yts, xts, cfg.band, cfg.nfft,
                                                 cfg.weights, &lb);
                } catch (const Error& e) {
                    if (e.code() == ErrorCode::DegenerateOutput)
                        fail(ErrorCode::DegenerateOutput,
                             "train: epoch " + std::to_string(epoch) + " batch " +
                                 std::to_string(batch_idx) + " sample " +
                                 std::to_string(order[start + b]) + ": " + e.what());
                    throw;
                }
                if (!std::isfinite(lb.total))
                    fail(ErrorCode::NonFiniteLoss,
                         "train: non-finite loss at epoch " + std::to_string(epoch) +
                             " batch " + std::to_string(batch_idx));
                sum_se += lb.se;
                sum_ds += lb.ds;
                sum_bw += lb.bw;
                sum_total += lb.total;
                float* grow = gy.row(b, 0);
                const double inv_b = 1.0 / static_cast<double>(bsz);
                for (std::size_t t = 0; t < T; ++t)
                    grow[t] = static_cast<float>(grad[t] * inv_b);
            }

            model.backward(gy);
            adam.lr = lr;
            nn::adam_step(params, adam);
            nn::zero_grads(params);
        }

        EpochStats st;
        st.epoch = epoch;
        st.se = sum_se / static_cast<double>(n);
        st.ds = sum_ds / static_cast<double>(n);
        st.bw = sum_bw / static_cast<double>(n);
        st.total = sum_total / static_cast<double>(n);
        st.lr = lr;
        result.history.push_back(st);

        if (st.total < result.best_loss) {
            result.best_loss = st.total;
            result.best_epoch = epoch;
            for (std::size_t i = 0; i < state.size(); ++i)
                best_state[i] = state[i].second->data;
            stale = 0;
        } else {
            ++stale;
        }

        if (stale >= cfg.patience) {
            lr *= cfg.lr_halving;
            stale = 0;
            if (lr <= cfg.min_lr) {
                lr = cfg.min_lr;
                lr_floored = true;
            }
        }
        if (lr_floored) break;
    }

    for (std::size_t i = 0; i < state.size(); ++i)
        if (!best_state[i].empty()) state[i].second->data = best_state[i];

    return result;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) fail(ErrorCode::IoError, "cannot open for writing: " + path);
    std::fprintf(f, "epoch,se,ds,bw,total,lr\n");
    for (const EpochStats& st : history)
        std::fprintf(f, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", st.epoch, st.se,
                     st.ds, st.bw, st.total, st.lr);
    if (std::fclose(f) != 0) fail(ErrorCode::IoError, "write failed: " + path);
}

} // namespace pdet
