#include "pdet/datagen.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "pdet/signal_ops.hpp"

namespace pdet {

static_assert(std::endian::native == std::endian::little,
              "dataset I/O assumes a little-endian host");

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559005768;
}

std::size_t SyntheticConfig::raw_len() const {
    return static_cast<std::size_t>(std::llround(win_sec * fs));
}

void SyntheticConfig::validate() const {
    if (!(fs > 0.0) || !(win_sec > 0.0))
        fail(ErrorCode::BadConfig, "SyntheticConfig: fs and win_sec must be > 0");
    if (band.hi >= fs / 2.0)
        fail(ErrorCode::BadConfig, "SyntheticConfig: band must stay below Nyquist");
    if (!(f0_lo >= band.lo) || !(f0_hi <= band.hi) || !(f0_lo < f0_hi))
        fail(ErrorCode::BadConfig, "SyntheticConfig: f0 range must sit inside the band");
    if (f0_hi > fs / 4.0)
        fail(ErrorCode::BadConfig, "SyntheticConfig: f0_hi must be <= fs/4");
    if (!(width_frac > 0.0) || !(width_frac < 0.5))
        fail(ErrorCode::BadConfig, "SyntheticConfig: width_frac must lie in (0, 0.5)");
    if (interferer_amp_ratio < 0.0 || noise_sigma < 0.0)
        fail(ErrorCode::BadConfig, "SyntheticConfig: amplitudes must be non-negative");
    if (interferer_amp_ratio > 0.0 && band.hi - band.lo <= 2.0 * min_separation_hz)
        fail(ErrorCode::BadConfig,
             "SyntheticConfig: band too narrow for the interferer separation margin");
    if (n_samples < 1)
        fail(ErrorCode::BadConfig, "SyntheticConfig: n_samples must be >= 1");
    if (model_len % 8 != 0 || model_len < 16)
        fail(ErrorCode::BadConfig, "SyntheticConfig: model_len must be >= 16 and divisible by 8");
}

TimeSeries gen_pulse_train(double f0, double fs, double dur_sec, double width_frac) {
    if (!(f0 > 0.0) || f0 > fs / 4.0)
        fail(ErrorCode::BadFrequency,
             "gen_pulse_train: need 0 < f0 <= fs/4, got " + std::to_string(f0));
    if (!(width_frac > 0.0) || !(width_frac < 0.5))
        fail(ErrorCode::BadConfig, "gen_pulse_train: width_frac must lie in (0, 0.5)");

    const std::size_t n = static_cast<std::size_t>(std::llround(dur_sec * fs));
    if (n == 0) fail(ErrorCode::BadConfig, "gen_pulse_train: zero-length window");

    const double period = 1.0 / f0;
    const double sigma = width_frac * period;
    std::vector<double> x(n, 0.0);
    // unit-peak Gaussian derivative: p(t) = -(t/sigma) * exp(1/2 - t^2/(2 sigma^2))
    for (double tc = 0.5 * period; tc < dur_sec; tc += period) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / fs - tc;
            const double u = t / sigma;
            x[i] += -u * std::exp(0.5 - 0.5 * u * u);
        }
    }
    double mu = 0.0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(n);
    for (double& v : x) v -= mu;
    return TimeSeries(std::move(x), fs);
}

std::pair<TimeSeries, double> gen_sample(const SyntheticConfig& cfg, Rng& rng) {
    cfg.validate();
    const double f0 = rng.uniform(cfg.f0_lo, cfg.f0_hi);
    TimeSeries x = gen_pulse_train(f0, cfg.fs, cfg.win_sec, cfg.width_frac);

    if (cfg.interferer_amp_ratio > 0.0) {
        double fi = 0.0;
        int tries = 0;
        do {
            fi = rng.uniform(cfg.band.lo, cfg.band.hi);
            if (++tries > 10000)
                fail(ErrorCode::BadConfig, "gen_sample: cannot place interferer in band");
        } while (std::abs(fi - f0) < cfg.min_separation_hz);
        const double phi = rng.uniform(0.0, kTwoPi);
        for (std::size_t i = 0; i < x.size(); ++i)
            x.samples[i] += cfg.interferer_amp_ratio *
                            std::sin(kTwoPi * fi * static_cast<double>(i) / cfg.fs + phi);
    }
    if (cfg.noise_sigma > 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i)
            x.samples[i] += cfg.noise_sigma * rng.normal();
    }
    return {std::move(x), f0};
}

std::pair<TimeSeries, double> gen_sample_at(const SyntheticConfig& cfg, std::size_t index) {
    Rng rng(stream_seed(cfg.seed, index));
    return gen_sample(cfg, rng);
}

TimeSeries pad_or_crop_center(const TimeSeries& ts, std::size_t target_len) {
    const std::size_t n = ts.size();
    if (n == target_len) return ts;
    std::vector<double> out(target_len, 0.0);
    if (n < target_len) {
        const std::size_t left = (target_len - n) / 2;
        for (std::size_t i = 0; i < n; ++i) out[left + i] = ts.samples[i];
    } else {
        const std::size_t left = (n - target_len) / 2;
        for (std::size_t i = 0; i < target_len; ++i) out[i] = ts.samples[left + i];
    }
    return TimeSeries(std::move(out), ts.fs);
}

LabeledDataset gen_dataset(const SyntheticConfig& cfg) {
    cfg.validate();
    LabeledDataset ds;
    ds.fs = cfg.fs;
    ds.band = cfg.band;
    ds.has_labels = true;
    ds.provenance = "synth seed=" + std::to_string(cfg.seed) +
                    " n=" + std::to_string(cfg.n_samples);
    ds.windows.reserve(cfg.n_samples);
    ds.labels.reserve(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        auto [w, f0] = gen_sample_at(cfg, i);
        if (cfg.zscore) w = zscore(w);
        ds.windows.push_back(pad_or_crop_center(w, cfg.model_len));
        ds.labels.push_back(f0);
    }
    return ds;
}

namespace {

constexpr char kMagic[4] = {'P', 'D', 'T', 'S'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) fail(ErrorCode::Truncated, "dataset: truncated file");
    return v;
}

} // namespace

void save_dataset(const LabeledDataset& ds, const std::string& path) {
    if (ds.windows.empty())
        fail(ErrorCode::BadConfig, "save_dataset: empty dataset");
    const std::size_t win_len = ds.windows.front().size();
    for (const auto& w : ds.windows)
        if (w.size() != win_len)
            fail(ErrorCode::BadConfig, "save_dataset: ragged window lengths");
    if (ds.has_labels && ds.labels.size() != ds.windows.size())
        fail(ErrorCode::BadConfig, "save_dataset: labels/windows count mismatch");

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::IoError, "save_dataset: cannot open for write: " + path);

    os.write(kMagic, 4);
    put<std::uint16_t>(os, kVersion);
    put<float>(os, static_cast<float>(ds.fs));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(win_len));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(ds.windows.size()));
    put<float>(os, static_cast<float>(ds.band.lo));
    put<float>(os, static_cast<float>(ds.band.hi));
    put<std::uint8_t>(os, ds.has_labels ? 1 : 0);
    for (const auto& w : ds.windows)
        for (double v : w.samples) put<float>(os, static_cast<float>(v));
    if (ds.has_labels)
        for (double v : ds.labels) put<float>(os, static_cast<float>(v));
    os.flush();
    if (!os) fail(ErrorCode::IoError, "save_dataset: write failed: " + path);
}

LabeledDataset load_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorCode::IoError, "load_dataset: cannot open: " + path);

    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        fail(ErrorCode::BadMagic, "load_dataset: bad magic");
    const auto version = get<std::uint16_t>(is);
    if (version != kVersion)
        fail(ErrorCode::UnsupportedVersion,
             "load_dataset: unsupported version " + std::to_string(version));

    LabeledDataset ds;
    ds.fs = static_cast<double>(get<float>(is));
    const auto win_len = get<std::uint32_t>(is);
    const auto count = get<std::uint32_t>(is);
    const float lo = get<float>(is);
    const float hi = get<float>(is);
    ds.band = FrequencyBand(static_cast<double>(lo), static_cast<double>(hi));
    ds.has_labels = get<std::uint8_t>(is) != 0;
    if (win_len == 0 || count == 0)
        fail(ErrorCode::Truncated, "load_dataset: header declares an empty dataset");

    ds.windows.reserve(count);
    std::vector<double> buf(win_len);
    for (std::uint32_t i = 0; i < count; ++i) {
        for (std::uint32_t j = 0; j < win_len; ++j)
            buf[j] = static_cast<double>(get<float>(is));
        ds.windows.emplace_back(buf, ds.fs);
    }
    if (ds.has_labels) {
        ds.labels.resize(count);
        for (std::uint32_t i = 0; i < count; ++i)
            ds.labels[i] = static_cast<double>(get<float>(is));
    }
    ds.provenance = "loaded from " + path;
    return ds;
}

TimeSeries load_csv(const std::string& path, double fs, bool has_header) {
    std::ifstream is(path);
    if (!is) fail(ErrorCode::IoError, "load_csv: cannot open: " + path);

    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (has_header && row == 1) continue;
        if (line.empty()) continue;

        // value is the whole row, or the second column of "time,value" rows
        std::string field = line;
        const auto comma = line.find(',');
        if (comma != std::string::npos) {
            field = line.substr(comma + 1);
            const auto next = field.find(',');
            if (next != std::string::npos) field = field.substr(0, next);
        }
        const char* begin = field.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        while (end && *end == ' ') ++end;
        if (end == begin || (end && *end != '\0'))
            fail(ErrorCode::ParseError,
                 "load_csv: cannot parse row " + std::to_string(row) + ": \"" + line + "\"");
        if (!std::isfinite(v))
            fail(ErrorCode::ParseError,
                 "load_csv: non-finite value at row " + std::to_string(row));
        values.push_back(v);
    }
    if (values.empty())
        fail(ErrorCode::EmptyFile, "load_csv: no values in " + path);
    return TimeSeries(std::move(values), fs);
}

} // namespace pdet
