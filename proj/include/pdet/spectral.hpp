#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pdet/time_series.hpp"

namespace pdet {

// One-sided power spectrum: power[k] = |Σ_n x_n e^{−j2πkn/nfft}|² for
// k = 0..nfft/2; bin k sits at frequency k·fs/nfft.
struct PowerSpectrum {
    std::vector<double> power; // nfft/2 + 1 bins
    std::size_t nfft = 0;
    double fs = 0.0;

    std::size_t bins() const { return power.size(); }
    double bin_hz(std::size_t k) const {
        return static_cast<double>(k) * fs / static_cast<double>(nfft);
    }
};

// Probability-normalized restriction of a power spectrum to an inclusive bin
// range [bin_lo, bin_hi]; probs sum to 1.
struct NormalizedSpectrum {
    std::vector<double> probs;
    std::size_t bin_lo = 0;
    std::size_t bin_hi = 0;
    std::size_t nfft = 0;
    double fs = 0.0;

    std::size_t bins() const { return probs.size(); }
    double bin_hz(std::size_t i) const {
        return static_cast<double>(bin_lo + i) * fs / static_cast<double>(nfft);
    }
};

// Zero-padded FFT power spectrum. nfft must be a power of two and >= len(ts).
PowerSpectrum dft_power(const TimeSeries& ts, std::size_t nfft);

// Inclusive bin range covering [lo, hi] Hz: smallest/largest k with
// lo <= k·fs/nfft <= hi. Throws EmptyBand when no bin falls inside.
std::pair<std::size_t, std::size_t> band_bins(const PowerSpectrum& spec,
                                              const FrequencyBand& band);

// probs[k] = power[k] / Σ_band power. Throws ZeroBandPower.
NormalizedSpectrum normalize_band(const PowerSpectrum& spec, const FrequencyBand& band);

// H = −Σ p ln p with 0·ln 0 := 0. Bounded by [0, ln K].
double spectral_entropy(const NormalizedSpectrum& p);

// Σ p ln(p / max(q, eps)); terms with p = 0 contribute nothing. The clamp on
// the denominator keeps the collapse blow-up finite but detectable.
double spectral_kl(const NormalizedSpectrum& p, const NormalizedSpectrum& q,
                   double eps = 1e-8);

// Fraction of total one-sided power in bins whose frequency lies outside
// [lo, hi]. Throws ZeroTotalPower.
double out_of_band_power(const PowerSpectrum& spec, const FrequencyBand& band);

// r[τ] = Σ_{n=1..N−τ} (x_n − μ)(x_{n+τ} − μ) / Σ_n (x_n − μ)², τ = 0..max_lag.
std::vector<double> autocorr_normalized(const TimeSeries& ts, std::size_t max_lag);

// Circular autocorrelation via Wiener-Khintchine: Re(IDFT(|DFT(x)|²))/1, which
// equals Σ_n x_n x_{(n+τ) mod N}. Works for any length (direct DFT off the
// power-of-two grid).
std::vector<double> circular_acf_via_spectrum(const TimeSeries& ts);

} // namespace pdet
