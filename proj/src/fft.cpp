#include "pdet/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace pdet {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559005768;
}

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || !is_power_of_two(n))
        throw std::invalid_argument("fft_radix2: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (is_power_of_two(n)) {
        auto out = a;
        fft_radix2(out, inverse);
        return out;
    }
    // direct summation for oddball small sizes
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = sign * kTwoPi * static_cast<double>(k) *
                               static_cast<double>(m) / static_cast<double>(n);
            acc += a[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

} // namespace pdet
