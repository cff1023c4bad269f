#include <doctest.h>

#include <cmath>
#include <vector>

#include "lgt/errors.hpp"
#include "lgt/rng.hpp"
#include "lgt/stats.hpp"

using namespace lgt;

namespace {

std::vector<double> iid_normal(int n, std::uint64_t seed, double mu = 0.0,
                               double sigma = 1.0) {
  RandomStream rng = RandomStream::keyed(seed, 0x5A7);
  std::vector<double> v(n);
  for (double& x : v) x = mu + sigma * rng.normal();
  return v;
}

// Stationary AR(1) chain x_t = rho x_{t-1} + noise, unit marginal variance.
std::vector<double> ar1(int n, double rho, std::uint64_t seed) {
  RandomStream rng = RandomStream::keyed(seed, 0xA21);
  std::vector<double> v(n);
  double x = rng.normal();
  double s = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    v[i] = x;
    x = rho * x + s * rng.normal();
  }
  return v;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("bin_means: averaging and remainder handling") {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
  auto b = bin_means(v, 2);
  CHECK(b == std::vector<double>{1.5, 3.5, 5.5});
  CHECK(bin_means(v, 1) == v);
  CHECK(bin_means(v, 7).size() == 1);
  CHECK_THROWS_AS(bin_means(v, 0), usage_error);
}

TEST_CASE("jackknife of a constant series is exact with zero error") {
  std::vector<double> v(500, 3.25);
  Jackknife jk = jackknife_mean_error(v, 10);
  CHECK(jk.mean == doctest::Approx(3.25).epsilon(1e-15));
  CHECK(jk.error == doctest::Approx(0.0));
  CHECK(jk.bins == 50);
}

TEST_CASE("jackknife error on iid data follows the 1/sqrt(n) law") {
  const int n = 40000;
  auto v = iid_normal(n, 31, 1.7, 2.0);
  Jackknife jk = jackknife_mean_error(v, 1);
  double expected = 2.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(jk.mean - 1.7) < 4.0 * expected);
  CHECK(jk.error == doctest::Approx(expected).epsilon(0.20));
  // Binning iid data leaves the error estimate unchanged (up to noise).
  Jackknife coarse = jackknife_mean_error(v, 20);
  CHECK(coarse.error == doctest::Approx(expected).epsilon(0.20));
}

TEST_CASE("binning recovers the autocorrelation-inflated error") {
  const double rho = 0.9;
  const int n = 200000;
  auto v = ar1(n, rho, 32);
  // tau = (1+rho)/(2(1-rho)) = 9.5; bins much longer than tau estimate the
  // true error sqrt(2 tau / n), naive bins underestimate it.
  double tau = (1.0 + rho) / (2.0 * (1.0 - rho));
  double truth = std::sqrt(2.0 * tau / n);
  Jackknife naive = jackknife_mean_error(v, 1);
  Jackknife binned = jackknife_mean_error(v, 200);
  CHECK(naive.error < 0.5 * truth);
  CHECK(binned.error == doctest::Approx(truth).epsilon(0.25));
}

TEST_CASE("jackknife is affine-equivariant") {
  auto v = iid_normal(5000, 33);
  Jackknife base = jackknife_mean_error(v, 10);
  for (double& x : v) x = 4.0 * x - 7.0;
  Jackknife moved = jackknife_mean_error(v, 10);
  CHECK(moved.mean == doctest::Approx(4.0 * base.mean - 7.0).epsilon(1e-12));
  CHECK(moved.error == doctest::Approx(4.0 * base.error).epsilon(1e-12));
}

TEST_CASE("jackknife_derived: identity map reproduces the plain jackknife") {
  auto v = iid_normal(4000, 34, 0.3);
  Jackknife plain = jackknife_mean_error(v, 8);
  Jackknife derived = jackknife_derived(
      {std::span<const double>(v)}, 8,
      [](std::span<const double> m) { return m[0]; });
  CHECK(derived.mean == doctest::Approx(plain.mean).epsilon(1e-12));
  CHECK(derived.error == doctest::Approx(plain.error).epsilon(1e-12));
}

TEST_CASE("jackknife_derived: variance of correlated ratio is reduced") {
  // x and y = x + small noise: the ratio y/x fluctuates far less than the
  // naive error propagation without the cross term would suggest.
  auto x = iid_normal(20000, 35, 10.0, 1.0);
  std::vector<double> y = x;
  {
    RandomStream rng = RandomStream::keyed(36, 0x11);
    for (double& t : y) t += 0.01 * rng.normal();
  }
  Jackknife ratio = jackknife_derived(
      {std::span<const double>(y), std::span<const double>(x)}, 10,
      [](std::span<const double> m) { return m[0] / m[1]; });
  CHECK(ratio.mean == doctest::Approx(1.0).epsilon(1e-3));
  Jackknife xerr = jackknife_mean_error(x, 10);
  double uncorrelated = std::sqrt(2.0) * xerr.error / 10.0;
  CHECK(ratio.error < 0.1 * uncorrelated);
}

TEST_CASE("integrated autocorrelation time") {
  // iid: tau = 1/2.
  auto v = iid_normal(100000, 37);
  TauInt iid = integrated_autocorrelation_time(v);
  CHECK(iid.converged);
  CHECK(iid.tau == doctest::Approx(0.5).epsilon(0.10));

  // AR(1), rho = 0.8: tau = (1+rho)/(2(1-rho)) = 4.5.
  auto w = ar1(400000, 0.8, 38);
  TauInt corr = integrated_autocorrelation_time(w);
  CHECK(corr.converged);
  CHECK(corr.tau == doctest::Approx(4.5).epsilon(0.15));
  CHECK(corr.error > 0.0);
  CHECK(corr.error < 0.15 * corr.tau);

  // Constant input is flagged, not thrown.
  std::vector<double> flat(1000, 2.0);
  TauInt degenerate = integrated_autocorrelation_time(flat);
  CHECK_FALSE(degenerate.converged);
}

TEST_CASE("thermalization cut") {
  // Stationary data: no cut needed.
  auto v = iid_normal(4000, 39);
  ThermalizationCut stat = thermalization_cut(v);
  CHECK_FALSE(stat.capped);
  CHECK(stat.cut < 400);

  // A long initial ramp must be discarded.
  std::vector<double> ramp = iid_normal(4000, 40, 0.0, 0.05);
  for (int i = 0; i < 800; ++i) ramp[i] += 5.0 * (1.0 - i / 800.0);
  ThermalizationCut cut = thermalization_cut(ramp);
  CHECK(cut.cut >= 400);
  CHECK(cut.cut <= 2000);

  // Constants are already thermalized.
  std::vector<double> flat(100, 1.0);
  CHECK(thermalization_cut(flat).cut == 0);
}

TEST_CASE("default bin size tracks the autocorrelation time") {
  auto v = iid_normal(50000, 41);
  int iid_bin = default_bin_size(v);
  CHECK(iid_bin >= 1);
  CHECK(iid_bin <= 2);
  auto w = ar1(400000, 0.8, 42);
  int corr_bin = default_bin_size(w);  // 2 tau = 9
  CHECK(corr_bin >= 7);
  CHECK(corr_bin <= 12);
}

}  // TEST_SUITE
