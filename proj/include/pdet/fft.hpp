#pragma once

#include <complex>
#include <vector>

namespace pdet {

// In-place iterative radix-2 FFT. Unnormalized: forward computes
// X_k = Σ_n x_n e^{−j2πkn/N}; inverse computes Σ_k X_k e^{+j2πkn/N} (i.e. the
// caller divides by N where a true inverse is wanted). N must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse);

// DFT of arbitrary length: radix-2 when N is a power of two, direct O(N²)
// summation otherwise (only small N takes this path). Same normalization.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& a, bool inverse);

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

} // namespace pdet
