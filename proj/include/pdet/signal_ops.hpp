#pragma once

#include <vector>

#include "pdet/time_series.hpp"

namespace pdet {

// Cuts ts into windows of win_sec seconds strided by shift_sec seconds.
// Produces floor((L − W)/S) + 1 windows; the tail remainder is dropped.
std::vector<TimeSeries> segment(const TimeSeries& ts, const WindowSpec& spec);

// (x − mean) / population_std. Throws ZeroVariance on constant input.
TimeSeries zscore(const TimeSeries& ts);

// Affine map of [min, max] onto [0, 1]. Throws ZeroVariance on constant input.
TimeSeries minmax01(const TimeSeries& ts);

// Fourth-order Butterworth bandpass: two cascaded biquads (direct form II
// transposed) designed by bilinear transform with frequency pre-warping.
// Causal forward pass only; output length equals input length.
TimeSeries bandpass_butterworth4(const TimeSeries& ts, const FrequencyBand& band);

// out[n] = (x[n+1] − x[n])², length L−1 (ECG-style slope-energy emphasis).
TimeSeries diff_square(const TimeSeries& ts);

// Linear interpolation onto a uniform fs_out grid; first and last input
// samples are anchored (inclusive endpoints).
TimeSeries resample_linear(const TimeSeries& ts, double fs_out);

// Analytic magnitude response of the same 4th-order Butterworth bandpass at a
// digital frequency f (evaluated on the pre-warped analog axis). Exposed so
// tests can check the filter against the closed-form response.
double butterworth4_bandpass_gain(const FrequencyBand& band, double fs, double f);

} // namespace pdet
