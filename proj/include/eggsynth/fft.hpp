#ifndef EGGSYNTH_FFT_HPP
#define EGGSYNTH_FFT_HPP

#include <complex>
#include <vector>

namespace eggsynth::fft {

using cplx = std::complex<double>;

// In-place DFT of arbitrary length. Forward uses e^{-2pi i nk/N} with no
// scaling; inverse uses e^{+2pi i nk/N} and divides by N, so
// sum |x_n|^2 == (1/N) sum |X_k|^2 (Parseval under the 1/N convention).
// Power-of-two lengths run iterative radix-2; everything else goes through
// Bluestein's chirp-z reduction to a power-of-two convolution.
void transform(std::vector<cplx>& data, bool inverse);

// Forward DFT of a real sequence; returns the full complex spectrum.
std::vector<cplx> forward_real(const std::vector<double>& x);

}  // namespace eggsynth::fft

#endif
