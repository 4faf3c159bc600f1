#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pdet/errors.hpp"

namespace pdet {

// Uniformly sampled real sequence. Core math paths keep 64-bit samples.
struct TimeSeries {
    std::vector<double> samples;
    double fs = 0.0; // Hz

    TimeSeries() = default;
    TimeSeries(std::vector<double> s, double sample_rate)
        : samples(std::move(s)), fs(sample_rate) {
        validate();
    }

    std::size_t size() const { return samples.size(); }
    double duration_sec() const { return static_cast<double>(samples.size()) / fs; }

    void validate() const {
        if (samples.empty())
            fail(ErrorCode::SignalTooShort, "TimeSeries: samples must be non-empty");
        if (!(fs > 0.0) || !std::isfinite(fs))
            fail(ErrorCode::BadConfig, "TimeSeries: fs must be finite and > 0");
        for (double v : samples)
            if (!std::isfinite(v))
                fail(ErrorCode::BadConfig, "TimeSeries: non-finite sample");
    }
};

// Frequency interval of interest, [lo, hi] in Hz.
struct FrequencyBand {
    double lo = 0.0;
    double hi = 0.0;

    FrequencyBand() = default;
    FrequencyBand(double lo_hz, double hi_hz) : lo(lo_hz), hi(hi_hz) {
        if (!(lo >= 0.0) || !(lo < hi) || !std::isfinite(hi))
            fail(ErrorCode::BadConfig,
                 "FrequencyBand: need 0 <= lo < hi, got [" + std::to_string(lo) +
                     ", " + std::to_string(hi) + "]");
    }

    // hi must stay strictly below Nyquist for the series it is used against
    void check_against(double fs) const {
        if (hi >= fs / 2.0)
            fail(ErrorCode::BandOutOfRange,
                 "band hi " + std::to_string(hi) + " Hz >= Nyquist " +
                     std::to_string(fs / 2.0) + " Hz");
    }

    bool contains(double f) const { return f >= lo && f <= hi; }
};

// Segmentation geometry (e.g. 8 s windows with 2 s shifts).
struct WindowSpec {
    double win_sec = 8.0;
    double shift_sec = 2.0;

    WindowSpec() = default;
    WindowSpec(double w, double s) : win_sec(w), shift_sec(s) {
        if (!(win_sec > 0.0) || !(shift_sec > 0.0) || shift_sec > win_sec)
            fail(ErrorCode::BadConfig,
                 "WindowSpec: need win_sec > 0 and 0 < shift_sec <= win_sec");
    }
};

} // namespace pdet
