#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdet/loss.hpp"
#include "pdet/nn/unet.hpp"
#include "pdet/time_series.hpp"

namespace pdet {

struct TrainConfig {
    double lr = 1e-3;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 100;
    std::size_t patience = 15;  // epochs without strict improvement before halving lr
    double lr_halving = 0.5;
    double min_lr = 1e-5;       // training stops once a halving reaches this floor
    LossWeights weights;
    std::uint64_t seed = 0;
    std::size_t nfft = 512;
    FrequencyBand band{0.5, 4.0};

    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0; // 1-based
    double se = 0.0;       // per-sample means over the epoch
    double ds = 0.0;
    double bw = 0.0;
    double total = 0.0;
    double lr = 0.0;       // rate used during this epoch
};

struct TrainResult {
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
    double best_loss = 0.0;
};

// Self-supervised training: no labels enter here by construction — the loop
// only ever sees raw windows. Shuffling, batching, and reductions are fully
// deterministic for a given seed. On return the model holds the parameters of
// the best epoch (lowest mean total loss); batchnorm running stats are
// restored from that same epoch.
TrainResult train(nn::UNet1D<float>& model, const std::vector<TimeSeries>& windows,
                  const TrainConfig& cfg);

// "epoch,se,ds,bw,total,lr" with full-precision values.
void write_history_csv(const std::vector<EpochStats>& history, const std::string& path);

} // namespace pdet
