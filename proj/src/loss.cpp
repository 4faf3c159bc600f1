#include "pdet/loss.hpp"

#include <cmath>
#include <complex>

#include "pdet/fft.hpp"
#include "pdet/spectral.hpp"

namespace pdet {

namespace {

constexpr double kEps = 1e-8; // band-power floor inside the loss only

struct LossContext {
    std::vector<std::complex<double>> Y; // full DFT of zero-padded y
    std::vector<double> Sy;              // one-sided output power
    std::vector<double> p, q;            // floored band-normalized spectra
    std::size_t bin_lo = 0, bin_hi = 0;
    double Tq = 0.0;   // floored band power of y
    double D = 0.0;    // total one-sided power of y + eps
    LossBreakdown lb;
};

LossContext evaluate(const TimeSeries& y, const TimeSeries& x,
                     const FrequencyBand& band, std::size_t nfft,
                     const LossWeights& w) {
    if (y.size() != x.size())
        fail(ErrorCode::LengthMismatch, "periodicity_loss: len(y) != len(x)");
    if (y.fs != x.fs)
        fail(ErrorCode::BadConfig, "periodicity_loss: y and x sample rates differ");

    LossContext ctx;

    // output spectrum straight from the FFT so the context keeps the phases
    if (!is_power_of_two(nfft))
        fail(ErrorCode::BadNfft, "periodicity_loss: nfft not a power of two");
    if (nfft < y.size())
        fail(ErrorCode::BadNfft, "periodicity_loss: nfft < window length");
    ctx.Y.assign(nfft, std::complex<double>(0.0, 0.0));
    for (std::size_t n = 0; n < y.size(); ++n) ctx.Y[n] = y.samples[n];
    fft_radix2(ctx.Y, false);
    ctx.Sy.resize(nfft / 2 + 1);
    for (std::size_t k = 0; k <= nfft / 2; ++k) ctx.Sy[k] = std::norm(ctx.Y[k]);

    PowerSpectrum sy_spec;
    sy_spec.power = ctx.Sy;
    sy_spec.nfft = nfft;
    sy_spec.fs = y.fs;
    const auto [lo_bin, hi_bin] = band_bins(sy_spec, band);
    ctx.bin_lo = lo_bin;
    ctx.bin_hi = hi_bin;
    const std::size_t K = hi_bin - lo_bin + 1;

    const PowerSpectrum sx_spec = dft_power(x, nfft);

    // exact zeros mean a silent/collapsed side; the floor only shapes finite values
    double raw_qy = 0.0, raw_px = 0.0;
    for (std::size_t k = lo_bin; k <= hi_bin; ++k) {
        raw_qy += ctx.Sy[k];
        raw_px += sx_spec.power[k];
    }
    if (!(raw_qy > 0.0))
        fail(ErrorCode::DegenerateOutput,
             "periodicity_loss: output has zero power inside the band");
    if (!(raw_px > 0.0))
        fail(ErrorCode::DegenerateOutput,
             "periodicity_loss: input window has zero power inside the band");

    ctx.Tq = raw_qy + static_cast<double>(K) * kEps;
    const double Tp = raw_px + static_cast<double>(K) * kEps;
    ctx.p.resize(K);
    ctx.q.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
        ctx.p[i] = (sx_spec.power[lo_bin + i] + kEps) / Tp;
        ctx.q[i] = (ctx.Sy[lo_bin + i] + kEps) / ctx.Tq;
    }

    double se = 0.0, ds = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        se -= ctx.q[i] * std::log(ctx.q[i]);
        ds += ctx.p[i] * std::log(ctx.p[i] / ctx.q[i]);
    }

    double total_power = 0.0, out_power = 0.0;
    for (std::size_t k = 0; k <= nfft / 2; ++k) {
        total_power += ctx.Sy[k];
        if (k < lo_bin || k > hi_bin) out_power += ctx.Sy[k];
    }
    ctx.D = total_power + kEps;
    const double bw = out_power / ctx.D;

    ctx.lb.se = se;
    ctx.lb.ds = ds;
    ctx.lb.bw = bw;
    ctx.lb.total = w.lambda_se * se + w.nu_ds * ds + w.w_bw * bw;
    return ctx;
}

} // namespace

LossBreakdown periodicity_loss(const TimeSeries& y, const TimeSeries& x,
                               const FrequencyBand& band, std::size_t nfft,
                               const LossWeights& w) {
    return evaluate(y, x, band, nfft, w).lb;
}

std::vector<double> periodicity_loss_grad(const TimeSeries& y, const TimeSeries& x,
                                          const FrequencyBand& band, std::size_t nfft,
                                          const LossWeights& w,
                                          LossBreakdown* breakdown) {
    LossContext ctx = evaluate(y, x, band, nfft, w);
    if (breakdown) *breakdown = ctx.lb;

    const std::size_t half = nfft / 2;
    const std::size_t K = ctx.bin_hi - ctx.bin_lo + 1;

    // d(se+ds)/dq_k, then through q_k = (Sy_k + eps)/Tq:
    // dL/dSy_j = (a_j − Σ_k a_k q_k)/Tq for j in band
    std::vector<double> a(K);
    double a_dot_q = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double dse = -(std::log(ctx.q[i]) + 1.0);
        const double dds = -ctx.p[i] / ctx.q[i];
        a[i] = w.lambda_se * dse + w.nu_ds * dds;
        a_dot_q += a[i] * ctx.q[i];
    }

    // per-bin sensitivity of the total loss to the one-sided power values
    std::vector<double> g(half + 1, 0.0);
    for (std::size_t k = 0; k <= half; ++k) {
        const bool in_band = k >= ctx.bin_lo && k <= ctx.bin_hi;
        if (in_band) g[k] += (a[k - ctx.bin_lo] - a_dot_q) / ctx.Tq;
        g[k] += w.w_bw * ((in_band ? 0.0 : 1.0) - ctx.lb.bw) / ctx.D;
    }

    // dL/dy_n = Σ_k g_k·2·Re(conj(Y_k)·e^{−j2πkn/N}) = 2·Re(IDFT_un(g_k·Y_k)_n),
    // with the upper half of the spectrum zeroed (those bins are never read)
    std::vector<std::complex<double>> G(nfft, std::complex<double>(0.0, 0.0));
    for (std::size_t k = 0; k <= half; ++k) G[k] = g[k] * ctx.Y[k];
    fft_radix2(G, true); // unnormalized inverse

    std::vector<double> grad(y.size());
    for (std::size_t n = 0; n < y.size(); ++n) grad[n] = 2.0 * G[n].real();
    return grad;
}

} // namespace pdet
