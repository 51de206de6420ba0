#include "eggsynth/fft.hpp"

#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace eggsynth::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey, unscaled.
void radix2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cplx u = a[i + j];
        const cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Precomputed chirp and convolution kernel for one Bluestein length.
struct BluesteinPlan {
  std::size_t n = 0;
  std::size_t m = 0;                // power-of-two convolution length >= 2n-1
  std::vector<cplx> chirp;          // e^{-i pi k^2 / n}, k = 0..n-1
  std::vector<cplx> kernel_fft;     // FFT of the wrapped conjugate chirp
};

const BluesteinPlan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, BluesteinPlan> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  BluesteinPlan plan;
  plan.n = n;
  plan.m = next_pow2(2 * n - 1);
  plan.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small; exp(-i pi k^2/n) is
    // periodic in k^2 with period 2n.
    const std::uint64_t q = (static_cast<std::uint64_t>(k) * k) % (2 * n);
    const double ang = -M_PI * static_cast<double>(q) / static_cast<double>(n);
    plan.chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::vector<cplx> kernel(plan.m, cplx(0.0, 0.0));
  kernel[0] = std::conj(plan.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel[k] = std::conj(plan.chirp[k]);
    kernel[plan.m - k] = std::conj(plan.chirp[k]);
  }
  radix2(kernel, false);
  plan.kernel_fft = std::move(kernel);
  return cache.emplace(n, std::move(plan)).first->second;
}

// Forward DFT of arbitrary length via chirp-z:
//   X_k = chirp_k * sum_n (x_n chirp_n) conj(chirp_{k-n})
void bluestein_forward(std::vector<cplx>& a) {
  const std::size_t n = a.size();
  const BluesteinPlan& plan = plan_for(n);

  std::vector<cplx> work(plan.m, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) work[k] = a[k] * plan.chirp[k];
  radix2(work, false);
  for (std::size_t k = 0; k < plan.m; ++k) work[k] *= plan.kernel_fft[k];
  radix2(work, true);
  const double inv_m = 1.0 / static_cast<double>(plan.m);
  for (std::size_t k = 0; k < n; ++k) a[k] = work[k] * inv_m * plan.chirp[k];
}

}  // namespace

void transform(std::vector<cplx>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;

  if (is_pow2(n)) {
    radix2(data, inverse);
    if (inverse) {
      const double inv_n = 1.0 / static_cast<double>(n);
      for (cplx& v : data) v *= inv_n;
    }
    return;
  }

  if (!inverse) {
    bluestein_forward(data);
    return;
  }
  // Inverse via conjugation of the forward transform.
  for (cplx& v : data) v = std::conj(v);
  bluestein_forward(data);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (cplx& v : data) v = std::conj(v) * inv_n;
}

std::vector<cplx> forward_real(const std::vector<double>& x) {
  std::vector<cplx> data(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) data[i] = cplx(x[i], 0.0);
  transform(data, false);
  return data;
}

}  // namespace eggsynth::fft
