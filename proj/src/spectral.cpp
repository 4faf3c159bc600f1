#include "pdet/spectral.hpp"

#include <cmath>

#include "pdet/fft.hpp"

namespace pdet {

PowerSpectrum dft_power(const TimeSeries& ts, std::size_t nfft) {
    ts.validate();
    if (!is_power_of_two(nfft))
        fail(ErrorCode::BadNfft, "dft_power: nfft " + std::to_string(nfft) +
                                     " is not a power of two");
    if (nfft < ts.size())
        fail(ErrorCode::BadNfft, "dft_power: nfft " + std::to_string(nfft) +
                                     " < signal length " + std::to_string(ts.size()));

    std::vector<std::complex<double>> buf(nfft, std::complex<double>(0.0, 0.0));
    for (std::size_t n = 0; n < ts.size(); ++n) buf[n] = ts.samples[n];
    fft_radix2(buf, false);

    PowerSpectrum spec;
    spec.nfft = nfft;
    spec.fs = ts.fs;
    spec.power.resize(nfft / 2 + 1);
    for (std::size_t k = 0; k <= nfft / 2; ++k) spec.power[k] = std::norm(buf[k]);
    return spec;
}

std::pair<std::size_t, std::size_t> band_bins(const PowerSpectrum& spec,
                                              const FrequencyBand& band) {
    // No Nyquist check here: a band that clears the one-sided bin range
    // (e.g. entirely above fs/2) simply has no bins and raises EmptyBand.
    const double hz_per_bin = spec.fs / static_cast<double>(spec.nfft);
    // smallest k with k·Δf >= lo, largest k with k·Δf <= hi
    const double lo_real = std::ceil(band.lo / hz_per_bin - 1e-12);
    const double hi_real = std::floor(band.hi / hz_per_bin + 1e-12);
    const std::size_t last = spec.bins() - 1;
    if (hi_real < 0.0 || lo_real > hi_real)
        fail(ErrorCode::EmptyBand, "band_bins: no DFT bin inside band");
    std::size_t lo_bin = static_cast<std::size_t>(lo_real < 0.0 ? 0.0 : lo_real);
    std::size_t hi_bin = static_cast<std::size_t>(hi_real);
    if (lo_bin > last)
        fail(ErrorCode::EmptyBand, "band_bins: band lies above the spectrum's bins");
    if (hi_bin > last) hi_bin = last;
    if (lo_bin > hi_bin)
        fail(ErrorCode::EmptyBand, "band_bins: no DFT bin inside band");
    return {lo_bin, hi_bin};
}

NormalizedSpectrum normalize_band(const PowerSpectrum& spec, const FrequencyBand& band) {
    const auto [lo_bin, hi_bin] = band_bins(spec, band);
    double total = 0.0;
    for (std::size_t k = lo_bin; k <= hi_bin; ++k) total += spec.power[k];
    if (!(total > 0.0))
        fail(ErrorCode::ZeroBandPower, "normalize_band: zero power inside band");

    NormalizedSpectrum out;
    out.bin_lo = lo_bin;
    out.bin_hi = hi_bin;
    out.nfft = spec.nfft;
    out.fs = spec.fs;
    out.probs.resize(hi_bin - lo_bin + 1);
    for (std::size_t k = lo_bin; k <= hi_bin; ++k)
        out.probs[k - lo_bin] = spec.power[k] / total;
    return out;
}

double spectral_entropy(const NormalizedSpectrum& p) {
    double h = 0.0;
    for (double v : p.probs)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double spectral_kl(const NormalizedSpectrum& p, const NormalizedSpectrum& q, double eps) {
    if (p.bin_lo != q.bin_lo || p.bin_hi != q.bin_hi || p.nfft != q.nfft)
        fail(ErrorCode::BinMismatch, "spectral_kl: spectra cover different bin ranges");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const double pi = p.probs[i];
        if (pi <= 0.0) continue;
        const double qi = q.probs[i] > eps ? q.probs[i] : eps;
        kl += pi * std::log(pi / qi);
    }
    return kl;
}

double out_of_band_power(const PowerSpectrum& spec, const FrequencyBand& band) {
    double total = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < spec.bins(); ++k) {
        total += spec.power[k];
        if (!band.contains(spec.bin_hz(k))) outside += spec.power[k];
    }
    if (!(total > 0.0))
        fail(ErrorCode::ZeroTotalPower, "out_of_band_power: all-zero spectrum");
    return outside / total;
}

std::vector<double> autocorr_normalized(const TimeSeries& ts, std::size_t max_lag) {
    ts.validate();
    const std::size_t n = ts.size();
    if (max_lag < 1 || max_lag >= n)
        fail(ErrorCode::BadConfig, "autocorr_normalized: need 1 <= max_lag < len");

    double mu = 0.0;
    for (double v : ts.samples) mu += v;
    mu /= static_cast<double>(n);

    double denom = 0.0;
    for (double v : ts.samples) denom += (v - mu) * (v - mu);
    if (!(denom > 0.0))
        fail(ErrorCode::ZeroVariance, "autocorr_normalized: constant input");

    std::vector<double> r(max_lag + 1);
    for (std::size_t tau = 0; tau <= max_lag; ++tau) {
        double acc = 0.0;
        for (std::size_t i = 0; i + tau < n; ++i)
            acc += (ts.samples[i] - mu) * (ts.samples[i + tau] - mu);
        r[tau] = acc / denom;
    }
    r[0] = 1.0;
    return r;
}

std::vector<double> circular_acf_via_spectrum(const TimeSeries& ts) {
    ts.validate();
    const std::size_t n = ts.size();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = ts.samples[i];
    auto X = dft(buf, false);
    for (auto& v : X) v = std::norm(v); // |X_k|²
    auto acf = dft(X, true);            // unnormalized inverse
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = acf[i].real() / static_cast<double>(n);
    return out;
}

} // namespace pdet
