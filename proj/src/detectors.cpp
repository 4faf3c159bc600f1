#include "pdet/detectors.hpp"

#include <algorithm>
#include <cmath>

#include "pdet/spectral.hpp"

namespace pdet {

DetectionResult detect_fourier(const TimeSeries& x, const FrequencyBand& band,
                               std::size_t nfft) {
    const PowerSpectrum spec = dft_power(x, nfft);
    const auto [lo_bin, hi_bin] = band_bins(spec, band);

    double total = 0.0, best = -1.0;
    std::size_t best_k = lo_bin;
    for (std::size_t k = lo_bin; k <= hi_bin; ++k) {
        total += spec.power[k];
        if (spec.power[k] > best) { // strict '>' keeps the lowest-frequency tie
            best = spec.power[k];
            best_k = k;
        }
    }
    if (!(total > 0.0))
        fail(ErrorCode::ZeroBandPower, "detect_fourier: zero power inside band");

    DetectionResult res;
    res.freq_hz = spec.bin_hz(best_k);
    res.confidence = best / total;
    res.method = "fourier";
    return res;
}

namespace {

struct AcfAnalysis {
    std::vector<double> r;
    std::size_t lag_min = 0, lag_max = 0;
    std::size_t best_lag = 0;
    double confidence = 0.0;
};

AcfAnalysis acf_analyze(const TimeSeries& x, const FrequencyBand& band) {
    AcfAnalysis out;
    const double fs = x.fs;
    // periods for the band edges: hi -> shortest lag, lo -> longest lag
    std::size_t lag_min = static_cast<std::size_t>(std::ceil(fs / band.hi - 1e-9));
    if (lag_min < 1) lag_min = 1;
    std::size_t lag_max = static_cast<std::size_t>(std::floor(fs / band.lo + 1e-9));
    const std::size_t half = x.size() / 2;
    if (lag_max > half) lag_max = half;
    if (lag_min > lag_max)
        fail(ErrorCode::EmptyBand, "detect_acf: empty lag range for band within len/2");

    out.r = autocorr_normalized(x, lag_max); // throws ZeroVariance for constants
    out.lag_min = lag_min;
    out.lag_max = lag_max;

    std::size_t best = lag_min;
    for (std::size_t tau = lag_min; tau <= lag_max; ++tau)
        if (out.r[tau] > out.r[best]) best = tau; // strict '>': ties keep the smaller lag
    out.best_lag = best;
    const double clamped = std::clamp(out.r[best], 0.0, 1.0);
    out.confidence = clamped * clamped;
    return out;
}

} // namespace

DetectionResult detect_acf(const TimeSeries& x, const FrequencyBand& band) {
    const AcfAnalysis a = acf_analyze(x, band);
    DetectionResult res;
    res.freq_hz = x.fs / static_cast<double>(a.best_lag);
    // fs/lag can overshoot band.hi slightly when the ceil'd shortest lag does
    // not divide fs exactly; the result still refers to an in-range period
    if (res.freq_hz > band.hi) res.freq_hz = band.hi;
    res.confidence = a.confidence;
    res.method = "acf";
    return res;
}

DetectionResult detect_hybrid(const TimeSeries& x, const FrequencyBand& band,
                              std::size_t nfft) {
    const AcfAnalysis a = acf_analyze(x, band);

    if (a.confidence < 0.1) {
        DetectionResult res = detect_fourier(x, band, nfft);
        res.method = "hybrid";
        return res;
    }

    // local maxima of r over the lag range, strongest three first
    std::vector<std::size_t> peaks;
    for (std::size_t tau = a.lag_min; tau <= a.lag_max; ++tau) {
        const double left = tau > 0 ? a.r[tau - 1] : a.r[tau];
        const double right = tau + 1 < a.r.size() ? a.r[tau + 1] : a.r[tau];
        if (a.r[tau] >= left && a.r[tau] >= right) peaks.push_back(tau);
    }
    if (peaks.empty()) peaks.push_back(a.best_lag);
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t p, std::size_t q) {
        if (a.r[p] != a.r[q]) return a.r[p] > a.r[q];
        return p < q; // equal correlation: prefer the smaller lag
    });
    if (peaks.size() > 3) peaks.resize(3);

    const PowerSpectrum spec = dft_power(x, nfft);
    const auto [lo_bin, hi_bin] = band_bins(spec, band);
    double band_max = 0.0, band_total = 0.0;
    for (std::size_t k = lo_bin; k <= hi_bin; ++k) {
        band_max = std::max(band_max, spec.power[k]);
        band_total += spec.power[k];
    }
    if (!(band_total > 0.0))
        fail(ErrorCode::ZeroBandPower, "detect_hybrid: zero power inside band");

    for (std::size_t tau : peaks) {
        double f = x.fs / static_cast<double>(tau);
        if (f > band.hi) f = band.hi;
        const double kf = f * static_cast<double>(nfft) / x.fs;
        const std::size_t kc = static_cast<std::size_t>(std::llround(kf));
        double support = 0.0;
        for (std::size_t k = (kc > 0 ? kc - 1 : 0); k <= kc + 1; ++k)
            if (k >= lo_bin && k <= hi_bin) support = std::max(support, spec.power[k]);
        if (support >= 0.1 * band_max) {
            DetectionResult res;
            res.freq_hz = f;
            res.confidence = support / band_total;
            res.method = "hybrid";
            return res;
        }
    }
    // no candidate carries spectral support: trust the frequency domain
    DetectionResult res = detect_fourier(x, band, nfft);
    res.method = "hybrid";
    return res;
}

DetectionResult detect_neural(const SignalFilter& model, const TimeSeries& x,
                              const FrequencyBand& band, std::size_t nfft) {
    const TimeSeries z = model(x);
    DetectionResult res = detect_fourier(z, band, nfft);
    res.method = "neural";
    return res;
}

} // namespace pdet
