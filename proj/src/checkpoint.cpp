#include "pdet/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

namespace pdet::nn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'P', 'D', 'M', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_str(std::ostream& os, const std::string& s) {
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) fail(ErrorCode::CorruptCheckpoint, "checkpoint: truncated file");
    return v;
}

std::string get_str(std::istream& is) {
    const auto n = get<std::uint32_t>(is);
    if (n > (1u << 20)) fail(ErrorCode::CorruptCheckpoint, "checkpoint: absurd string length");
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) fail(ErrorCode::CorruptCheckpoint, "checkpoint: truncated string");
    return s;
}

} // namespace

void save_checkpoint(UNet1D<float>& model, const CheckpointInfo& info,
                     const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::IoError, "checkpoint: cannot open for write: " + path);

    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(info.config.base_channels));
    put<double>(os, info.pipeline.fs);
    put<std::uint32_t>(os, info.pipeline.raw_win_len);
    put<std::uint32_t>(os, info.pipeline.model_len);
    put<std::uint8_t>(os, info.pipeline.zscore ? 1 : 0);
    put<double>(os, info.pipeline.band.lo);
    put<double>(os, info.pipeline.band.hi);
    put<std::uint32_t>(os, info.pipeline.nfft);
    put<std::uint32_t>(os, info.meta.epochs);
    put<double>(os, info.meta.final_loss);
    put<std::uint64_t>(os, info.meta.seed);

    auto state = model.named_state();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(state.size()));
    for (auto& [name, tensor] : state) {
        put_str(os, name);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(tensor->shape.size()));
        for (std::size_t d : tensor->shape) put<std::uint32_t>(os, static_cast<std::uint32_t>(d));
        os.write(reinterpret_cast<const char*>(tensor->data.data()),
                 static_cast<std::streamsize>(tensor->data.size() * sizeof(float)));
    }
    os.flush();
    if (!os) fail(ErrorCode::IoError, "checkpoint: write failed: " + path);
}

UNet1D<float> load_checkpoint(const std::string& path, CheckpointInfo* info_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCode::IoError, "checkpoint: cannot open: " + path);

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        fail(ErrorCode::BadMagic, "checkpoint: bad magic");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion)
        fail(ErrorCode::UnsupportedVersion,
             "checkpoint: unsupported format version " + std::to_string(version));

    CheckpointInfo info;
    info.config.base_channels = get<std::uint32_t>(is);
    info.pipeline.fs = get<double>(is);
    info.pipeline.raw_win_len = get<std::uint32_t>(is);
    info.pipeline.model_len = get<std::uint32_t>(is);
    info.pipeline.zscore = get<std::uint8_t>(is) != 0;
    const double lo = get<double>(is);
    const double hi = get<double>(is);
    info.pipeline.band = FrequencyBand(lo, hi);
    info.pipeline.nfft = get<std::uint32_t>(is);
    info.meta.epochs = get<std::uint32_t>(is);
    info.meta.final_loss = get<double>(is);
    info.meta.seed = get<std::uint64_t>(is);

    const auto n_tensors = get<std::uint32_t>(is);
    std::map<std::string, Tensor<float>> loaded;
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
        const std::string name = get_str(is);
        const auto ndim = get<std::uint32_t>(is);
        if (ndim == 0 || ndim > 4)
            fail(ErrorCode::CorruptCheckpoint, "checkpoint: bad tensor rank for " + name);
        std::vector<std::size_t> shape(ndim);
        for (auto& d : shape) d = get<std::uint32_t>(is);
        Tensor<float> t(shape);
        is.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * sizeof(float)));
        if (!is) fail(ErrorCode::CorruptCheckpoint, "checkpoint: truncated tensor " + name);
        if (!loaded.emplace(name, std::move(t)).second)
            fail(ErrorCode::CorruptCheckpoint, "checkpoint: duplicate tensor " + name);
    }

    UNet1D<float> model(info.config);
    auto state = model.named_state();
    if (state.size() != loaded.size())
        fail(ErrorCode::CorruptCheckpoint, "checkpoint: tensor count mismatch");
    for (auto& [name, tensor] : state) {
        auto it = loaded.find(name);
        if (it == loaded.end())
            fail(ErrorCode::CorruptCheckpoint, "checkpoint: missing tensor " + name);
        if (it->second.shape != tensor->shape)
            fail(ErrorCode::CorruptCheckpoint, "checkpoint: shape mismatch for " + name);
        *tensor = std::move(it->second);
    }

    if (info_out) *info_out = info;
    return model;
}

} // namespace pdet::nn
