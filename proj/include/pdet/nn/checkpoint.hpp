#pragma once

#include <cstdint>
#include <string>

#include "pdet/nn/unet.hpp"
#include "pdet/time_series.hpp"

namespace pdet::nn {

// How windows were prepared for the model, persisted so inference can apply
// the exact training pipeline to raw input.
struct PipelineDescriptor {
    double fs = 25.0;
    std::uint32_t raw_win_len = 200; // samples per generated/segmented window
    std::uint32_t model_len = 256;   // after symmetric zero-pad/crop
    bool zscore = true;
    FrequencyBand band{0.5, 4.0};
    std::uint32_t nfft = 512;
};

struct TrainMeta {
    std::uint32_t epochs = 0;
    double final_loss = 0.0;
    std::uint64_t seed = 0;
};

struct CheckpointInfo {
    UNetConfig config;
    PipelineDescriptor pipeline;
    TrainMeta meta;
};

// Binary format "PDM1": magic, u32 version, config + pipeline + training
// metadata, then named parameter tensors (length-prefixed name, dims, raw
// 32-bit little-endian IEEE-754 values). Batchnorm running statistics are
// stored alongside the learnables so eval-mode forwards round-trip bit-exactly.
void save_checkpoint(UNet1D<float>& model, const CheckpointInfo& info,
                     const std::string& path);

UNet1D<float> load_checkpoint(const std::string& path, CheckpointInfo* info = nullptr);

} // namespace pdet::nn
