#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "pdet/time_series.hpp"

namespace pdet {

struct DetectionResult {
    double freq_hz = 0.0;
    double confidence = 0.0; // in [0,1]; see each detector for its semantics
    std::string method;
};

// Frequency of the strongest one-sided power bin inside the band; ties break
// toward the lower frequency. Confidence = peak power / total band power.
DetectionResult detect_fourier(const TimeSeries& x, const FrequencyBand& band,
                               std::size_t nfft);

// fs / argmax of the normalized autocorrelation over the lag range
// [fs/hi, fs/lo] (clamped to len/2); ties break toward the smaller lag.
// Confidence = clamp(r[lag*], 0, 1)^2 — the squared peak correlation, which
// puts it on the same variance-fraction scale the other detectors use.
DetectionResult detect_acf(const TimeSeries& x, const FrequencyBand& band);

// Time/frequency cross-validation: the top-3 autocorrelation peaks are walked
// in descending-r order and the first whose implied frequency carries real
// periodogram support (power within ±1 bin >= 10% of the band maximum) wins;
// spurious subharmonic lags have no spectral line and are skipped. Falls back
// to detect_fourier outright when the ACF confidence is below 0.1.
DetectionResult detect_hybrid(const TimeSeries& x, const FrequencyBand& band,
                              std::size_t nfft);

// z = model(x), then Fourier argmax on z. The model is any window-to-window
// map (the trained U-Net in practice; tests pass stubs).
using SignalFilter = std::function<TimeSeries(const TimeSeries&)>;
DetectionResult detect_neural(const SignalFilter& model, const TimeSeries& x,
                              const FrequencyBand& band, std::size_t nfft);

} // namespace pdet
