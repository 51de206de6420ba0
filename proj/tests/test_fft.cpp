#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <vector>

#include "eggsynth/fft.hpp"
#include "eggsynth/rng.hpp"
#include "oracles.hpp"

using eggsynth::Rng;
using eggsynth::fft::cplx;

namespace {

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> x(n);
  for (cplx& v : x) v = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return x;
}

double max_rel_error(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double scale = 1e-30;
  for (const cplx& v : want) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
  return worst;
}

}  // namespace

TEST_CASE("forward transform matches the brute-force DFT") {
  for (std::size_t n : {2, 3, 4, 5, 7, 8, 12, 15, 16, 30, 150, 256, 300}) {
    std::vector<cplx> x = random_signal(n, 100 + n);
    const std::vector<cplx> want = oracles::dft(x);
    eggsynth::fft::transform(x, false);
    INFO("n = " << n);
    CHECK(max_rel_error(x, want) < 1e-11);
  }
}

TEST_CASE("inverse undoes forward at any length") {
  for (std::size_t n : {2, 3, 8, 15, 150, 2400}) {
    const std::vector<cplx> original = random_signal(n, 7 * n);
    std::vector<cplx> x = original;
    eggsynth::fft::transform(x, false);
    eggsynth::fft::transform(x, true);
    INFO("n = " << n);
    CHECK(max_rel_error(x, original) < 1e-12);
  }
}

TEST_CASE("Parseval holds under the 1/N convention") {
  for (std::size_t n : {16, 150, 301}) {
    std::vector<cplx> x = random_signal(n, n);
    double time_energy = 0.0;
    for (const cplx& v : x) time_energy += std::norm(v);
    eggsynth::fft::transform(x, false);
    double freq_energy = 0.0;
    for (const cplx& v : x) freq_energy += std::norm(v);
    freq_energy /= static_cast<double>(n);
    CHECK(time_energy == doctest::Approx(freq_energy).epsilon(1e-12));
  }
}

TEST_CASE("forward_real agrees with a complex transform") {
  Rng rng(9);
  std::vector<double> x(150);
  for (double& v : x) v = rng.normal();
  std::vector<cplx> xc(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xc[i] = cplx(x[i], 0.0);
  const std::vector<cplx> got = eggsynth::fft::forward_real(x);
  const std::vector<cplx> want = oracles::dft(xc);
  CHECK(max_rel_error(got, want) < 1e-11);
}
