#include "pdet/signal_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace pdet {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double population_mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double population_var(const std::vector<double>& x, double mu) {
    double s = 0.0;
    for (double v : x) s += (v - mu) * (v - mu);
    return s / static_cast<double>(x.size());
}

} // namespace

std::vector<TimeSeries> segment(const TimeSeries& ts, const WindowSpec& spec) {
    ts.validate();
    const std::size_t L = ts.size();
    const std::size_t W = static_cast<std::size_t>(std::llround(spec.win_sec * ts.fs));
    const std::size_t S = static_cast<std::size_t>(std::llround(spec.shift_sec * ts.fs));
    if (W == 0 || S == 0)
        fail(ErrorCode::BadConfig, "segment: window/shift round to zero samples");
    if (L < W)
        fail(ErrorCode::SignalTooShort,
             "segment: signal length " + std::to_string(L) + " < window " + std::to_string(W));

    const std::size_t count = (L - W) / S + 1;
    std::vector<TimeSeries> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto begin = ts.samples.begin() + static_cast<std::ptrdiff_t>(i * S);
        out.emplace_back(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(W)), ts.fs);
    }
    return out;
}

TimeSeries zscore(const TimeSeries& ts) {
    ts.validate();
    const double mu = population_mean(ts.samples);
    const double var = population_var(ts.samples, mu);
    if (!(var > 0.0))
        fail(ErrorCode::ZeroVariance, "zscore: constant input");
    const double inv_sd = 1.0 / std::sqrt(var);
    std::vector<double> y(ts.size());
    for (std::size_t n = 0; n < y.size(); ++n)
        y[n] = (ts.samples[n] - mu) * inv_sd;
    return TimeSeries(std::move(y), ts.fs);
}

TimeSeries minmax01(const TimeSeries& ts) {
    ts.validate();
    const auto [mn_it, mx_it] = std::minmax_element(ts.samples.begin(), ts.samples.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn))
        fail(ErrorCode::ZeroVariance, "minmax01: constant input");
    const double inv = 1.0 / (mx - mn);
    std::vector<double> y(ts.size());
    for (std::size_t n = 0; n < y.size(); ++n)
        y[n] = (ts.samples[n] - mn) * inv;
    return TimeSeries(std::move(y), ts.fs);
}

namespace {

// One second-order section, direct form II transposed.
struct Biquad {
    double b0, b1, b2; // numerator
    double a1, a2;     // denominator (a0 normalized to 1)
    double s1 = 0.0, s2 = 0.0;

    double step(double x) {
        const double y = b0 * x + s1;
        s1 = b1 * x - a1 * y + s2;
        s2 = b2 * x - a2 * y;
        return y;
    }
};

// 4th-order Butterworth bandpass design. The 2nd-order lowpass prototype pole
// pair p = exp(j·3π/4) is bandpass-transformed (s → (s² + W0²)/(B·s)) around
// the pre-warped edges, then mapped by the bilinear transform. Digital zeros
// land at z = ±1 (one pair per section); overall gain is normalized to 1 at
// the warped center frequency.
std::array<Biquad, 2> design_butterworth4(const FrequencyBand& band, double fs) {
    const double k2fs = 2.0 * fs;
    const double W1 = k2fs * std::tan(kPi * band.lo / fs); // pre-warped edges (rad/s)
    const double W2 = k2fs * std::tan(kPi * band.hi / fs);
    const double B = W2 - W1;
    const double W0sq = W1 * W2;

    // analog bandpass poles: for prototype pole p, q = (B·p ± sqrt((B·p)² − 4·W0²))/2
    const std::complex<double> p(-std::sqrt(0.5), std::sqrt(0.5));
    const std::complex<double> bp = B * p;
    const std::complex<double> disc = std::sqrt(bp * bp - 4.0 * W0sq);
    const std::complex<double> q[2] = {(bp + disc) * 0.5, (bp - disc) * 0.5};

    // bilinear: z = (2fs + s)/(2fs − s); each conjugate pole pair forms one biquad
    std::array<Biquad, 2> sos{};
    std::complex<double> zp[2];
    for (int i = 0; i < 2; ++i) {
        zp[i] = (k2fs + q[i]) / (k2fs - q[i]);
        sos[i].b0 = 1.0;
        sos[i].b1 = 0.0;
        sos[i].b2 = -1.0; // zeros at z = +1 and z = −1
        sos[i].a1 = -2.0 * zp[i].real();
        sos[i].a2 = std::norm(zp[i]);
    }

    // unit gain at the warped center: evaluate the cascade at z0 = e^{jw0}
    const double w0 = 2.0 * std::atan(std::sqrt(W0sq) / k2fs);
    const std::complex<double> z0(std::cos(w0), std::sin(w0));
    double mag = 1.0;
    for (int i = 0; i < 2; ++i) {
        const std::complex<double> num = z0 * z0 - 1.0;
        const std::complex<double> den = (z0 - zp[i]) * (z0 - std::conj(zp[i]));
        mag *= std::abs(num / den);
    }
    const double section_gain = 1.0 / std::sqrt(mag);
    sos[0].b0 *= section_gain; sos[0].b2 *= section_gain;
    sos[1].b0 *= section_gain; sos[1].b2 *= section_gain;
    return sos;
}

} // namespace

TimeSeries bandpass_butterworth4(const TimeSeries& ts, const FrequencyBand& band) {
    ts.validate();
    if (band.hi >= ts.fs / 2.0)
        fail(ErrorCode::BandOutOfRange,
             "bandpass: band hi " + std::to_string(band.hi) + " Hz >= Nyquist");

    auto sos = design_butterworth4(band, ts.fs);
    std::vector<double> y(ts.size());
    for (std::size_t n = 0; n < ts.size(); ++n)
        y[n] = sos[1].step(sos[0].step(ts.samples[n]));
    return TimeSeries(std::move(y), ts.fs);
}

double butterworth4_bandpass_gain(const FrequencyBand& band, double fs, double f) {
    // closed form |H_lp(jw)|² = 1/(1 + w⁴) for the order-2 prototype, with the
    // bandpass substitution w = (Ω² − W0²)/(B·Ω) at the pre-warped frequency Ω
    const double k2fs = 2.0 * fs;
    const double W1 = k2fs * std::tan(kPi * band.lo / fs);
    const double W2 = k2fs * std::tan(kPi * band.hi / fs);
    const double B = W2 - W1;
    const double W0sq = W1 * W2;
    const double omega = k2fs * std::tan(kPi * f / fs);
    if (omega == 0.0) return 0.0; // DC is fully rejected
    const double w = (omega * omega - W0sq) / (B * omega);
    return std::sqrt(1.0 / (1.0 + w * w * w * w));
}

TimeSeries diff_square(const TimeSeries& ts) {
    ts.validate();
    if (ts.size() < 2)
        fail(ErrorCode::SignalTooShort, "diff_square: need at least 2 samples");
    std::vector<double> y(ts.size() - 1);
    for (std::size_t n = 0; n + 1 < ts.size(); ++n) {
        const double d = ts.samples[n + 1] - ts.samples[n];
        y[n] = d * d;
    }
    return TimeSeries(std::move(y), ts.fs);
}

TimeSeries resample_linear(const TimeSeries& ts, double fs_out) {
    ts.validate();
    if (!(fs_out > 0.0) || !std::isfinite(fs_out))
        fail(ErrorCode::BadConfig, "resample_linear: fs_out must be finite and > 0");

    const std::size_t n_in = ts.size();
    if (n_in == 1) return TimeSeries(ts.samples, fs_out);

    const std::size_t n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_in - 1) * fs_out / ts.fs)) + 1;
    std::vector<double> y(n_out);
    const double step = ts.fs / fs_out; // input samples per output sample
    for (std::size_t i = 0; i < n_out; ++i) {
        double u = static_cast<double>(i) * step;
        if (u <= 0.0) { y[i] = ts.samples.front(); continue; }
        if (u >= static_cast<double>(n_in - 1)) { y[i] = ts.samples.back(); continue; }
        const std::size_t k = static_cast<std::size_t>(u);
        const double frac = u - static_cast<double>(k);
        y[i] = ts.samples[k] + frac * (ts.samples[k + 1] - ts.samples[k]);
    }
    return TimeSeries(std::move(y), fs_out);
}

} // namespace pdet
