#pragma once

#include <cstddef>
#include <vector>

#include "pdet/time_series.hpp"

namespace pdet {

// Coefficients of the combined objective: total = lambda·se + nu·ds + w_bw·bw.
// Equal weights by default; the ablation arms zero one of them.
struct LossWeights {
    double lambda_se = 1.0;
    double nu_ds = 1.0;
    double w_bw = 1.0;
};

struct LossBreakdown {
    double se = 0.0;    // spectral entropy of the output's band spectrum
    double ds = 0.0;    // KL(input band spectrum || output band spectrum)
    double bw = 0.0;    // out-of-band fraction of the output's one-sided power
    double total = 0.0; // weighted sum
};

// Combined periodicity objective evaluated on an output window y against its
// input window x. Band powers are floored by +1e-8 before normalization so
// the terms (and their gradients) stay finite near collapse; an exactly-zero
// band power on either side throws DegenerateOutput.
LossBreakdown periodicity_loss(const TimeSeries& y, const TimeSeries& x,
                               const FrequencyBand& band, std::size_t nfft,
                               const LossWeights& w = {});

// Analytic d(total)/dy_n, chained through the power-spectrum adjoint
// dS_k/dy_n = 2·Re(conj(Y_k)·e^{−j2πkn/nfft}) and evaluated with one inverse
// FFT. If breakdown is non-null the loss terms are written there (same pass).
std::vector<double> periodicity_loss_grad(const TimeSeries& y, const TimeSeries& x,
                                          const FrequencyBand& band, std::size_t nfft,
                                          const LossWeights& w = {},
                                          LossBreakdown* breakdown = nullptr);

} // namespace pdet
