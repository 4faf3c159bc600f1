#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdet/rng.hpp"
#include "pdet/time_series.hpp"

namespace pdet {

// Synthetic quasi-periodic benchmark: a Gaussian-derivative pulse train (the
// morphology-rich target, QRS-like) plus an in-band sinusoidal interferer and
// white Gaussian noise. The interferer is spectrally dominant at the default
// amplitude ratio, so plain Fourier argmax locks onto it while the pulse
// morphology remains the learnable cue.
struct SyntheticConfig {
    double fs = 25.0;
    double win_sec = 8.0;              // raw window: T = round(win_sec*fs) samples
    FrequencyBand band{0.5, 4.0};
    double f0_lo = 0.8;                // target fundamental range, inside band
    double f0_hi = 2.0;
    double width_frac = 0.15;          // pulse sigma as a fraction of the period
    double interferer_amp_ratio = 2.0; // sinusoid amplitude vs unit pulse peak
    double min_separation_hz = 0.3;    // |f_i - f0| lower bound
    double noise_sigma = 0.5;
    std::size_t n_samples = 256;
    std::uint64_t seed = 1;
    std::size_t model_len = 256;       // windows zero-padded/cropped to this
    bool zscore = true;

    std::size_t raw_len() const;
    void validate() const;
};

struct LabeledDataset {
    std::vector<TimeSeries> windows; // equal length
    std::vector<double> labels;      // f0 in Hz per window (evaluation only)
    double fs = 0.0;
    FrequencyBand band;
    bool has_labels = true;
    std::string provenance; // in-memory note, not persisted

    std::size_t size() const { return windows.size(); }
};

// Periodic train of unit-peak Gaussian-derivative pulses at fundamental f0,
// mean-removed. width_frac sets the pulse sigma as a fraction of the period,
// which makes the harmonic amplitude ratios independent of f0.
TimeSeries gen_pulse_train(double f0, double fs, double dur_sec, double width_frac);

// One raw (unpadded, un-normalized) window plus its label, drawn from rng:
// x = pulse_train(f0) + ratio*sin(2*pi*f_i*t + phi) + N(0, sigma),
// f0 ~ U(f0_range), f_i in band with |f_i - f0| >= min_separation_hz.
std::pair<TimeSeries, double> gen_sample(const SyntheticConfig& cfg, Rng& rng);

// Deterministic per (cfg.seed, index): derives a per-index rng stream.
std::pair<TimeSeries, double> gen_sample_at(const SyntheticConfig& cfg, std::size_t index);

// Full dataset: each raw window is z-scored (if cfg.zscore) and symmetrically
// zero-padded/center-cropped to cfg.model_len.
LabeledDataset gen_dataset(const SyntheticConfig& cfg);

// PDTS container: magic "PDTS", u16 version, f32 fs, u32 window length,
// u32 count, f32 band lo/hi, u8 has_labels, row-major f32 LE samples, labels.
void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path);

// One value per row, or comma-separated rows where the second column is the
// value. has_header skips the first line.
TimeSeries load_csv(const std::string& path, double fs, bool has_header);

// Symmetric zero-pad (or center-crop) to target_len; helper shared by datagen
// and the CLI preprocessing path.
TimeSeries pad_or_crop_center(const TimeSeries& ts, std::size_t target_len);

} // namespace pdet
