#include "lgt/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lgt/errors.hpp"

namespace lgt {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> bin_means(std::span<const double> values, int bin_size) {
  if (bin_size < 1) throw usage_error("bin_means: bin_size must be >= 1");
  std::size_t nb = values.size() / static_cast<std::size_t>(bin_size);
  std::vector<double> out;
  out.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    double s = 0.0;
    for (int i = 0; i < bin_size; ++i) s += values[b * bin_size + i];
    out.push_back(s / bin_size);
  }
  return out;
}

Jackknife jackknife_mean_error(std::span<const double> values, int bin_size) {
  std::vector<double> bins = bin_means(values, bin_size);
  const int nb = static_cast<int>(bins.size());
  if (nb < 2) throw usage_error("jackknife: need at least 2 bins");
  double total = 0.0;
  for (double b : bins) total += b;
  double mean = total / nb;
  double ss = 0.0;
  for (double b : bins) {
    double loo = (total - b) / (nb - 1);
    ss += (loo - mean) * (loo - mean);
  }
  Jackknife jk;
  jk.mean = mean;
  jk.error = std::sqrt(ss * (nb - 1) / nb);
  jk.bins = nb;
  return jk;
}

Jackknife jackknife_derived(
    const std::vector<std::span<const double>>& series, int bin_size,
    const std::function<double(std::span<const double> means)>& fn) {
  if (series.empty()) throw usage_error("jackknife_derived: no series");
  const std::size_t m = series.size();
  std::vector<std::vector<double>> bins(m);
  for (std::size_t i = 0; i < m; ++i) {
    bins[i] = bin_means(series[i], bin_size);
    if (bins[i].size() != bins[0].size())
      throw usage_error("jackknife_derived: series lengths differ");
  }
  const int nb = static_cast<int>(bins[0].size());
  if (nb < 2) throw usage_error("jackknife_derived: need at least 2 bins");
  std::vector<double> totals(m, 0.0), means(m);
  for (std::size_t i = 0; i < m; ++i)
    for (double b : bins[i]) totals[i] += b;
  for (std::size_t i = 0; i < m; ++i) means[i] = totals[i] / nb;
  double full = fn(means);
  std::vector<double> loo(m);
  double ss = 0.0, jsum = 0.0;
  std::vector<double> jvals(nb);
  for (int b = 0; b < nb; ++b) {
    for (std::size_t i = 0; i < m; ++i)
      loo[i] = (totals[i] - bins[i][b]) / (nb - 1);
    jvals[b] = fn(loo);
    jsum += jvals[b];
  }
  double jmean = jsum / nb;
  for (int b = 0; b < nb; ++b) ss += (jvals[b] - jmean) * (jvals[b] - jmean);
  Jackknife jk;
  jk.mean = full;
  jk.error = std::sqrt(ss * (nb - 1) / nb);
  jk.bins = nb;
  return jk;
}

TauInt integrated_autocorrelation_time(std::span<const double> values) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  if (n < 100)
    throw usage_error("tau_int: need at least 100 samples");
  double mean = mean_of(values);
  double var = 0.0;
  for (double x : values) var += (x - mean) * (x - mean);
  var /= n;
  TauInt out;
  if (var <= 0.0 || !std::isfinite(var)) {
    out.converged = false;
    out.tau = 0.5;
    return out;
  }
  double tau = 0.5;
  int w = 0;
  const int wmax = static_cast<int>(n / 4);
  for (w = 1; w <= wmax; ++w) {
    double c = 0.0;
    for (std::int64_t t = 0; t + w < n; ++t)
      c += (values[t] - mean) * (values[t + w] - mean);
    c /= static_cast<double>(n - w);
    tau += c / var;
    if (w >= 5.0 * tau) break;  // self-consistent window
  }
  out.tau = std::max(tau, 0.0);
  out.window = w;
  out.converged = w <= wmax;
  // Madras-Sokal variance estimate.
  out.error = out.tau * std::sqrt(2.0 * (2.0 * w + 1.0) / n);
  return out;
}

ThermalizationCut thermalization_cut(std::span<const double> values) {
  const std::int64_t n = static_cast<std::int64_t>(values.size());
  if (n < 100) throw usage_error("thermalization_cut: need at least 100 samples");
  ThermalizationCut result;
  const std::int64_t step = std::max<std::int64_t>(1, n / 50);
  for (std::int64_t cut = 0; cut <= n / 2; cut += step) {
    std::span<const double> rest = values.subspan(cut);
    std::size_t half = rest.size() / 2;
    auto first = rest.subspan(0, half);
    auto second = rest.subspan(half, half);
    int bin = std::max<std::size_t>(1, half / 25);
    Jackknife a = jackknife_mean_error(first, bin);
    Jackknife b = jackknife_mean_error(second, bin);
    double sigma = std::sqrt(a.error * a.error + b.error * b.error);
    if (sigma == 0.0 || std::abs(a.mean - b.mean) <= 2.0 * sigma) {
      result.cut = cut;
      return result;
    }
  }
  result.cut = n / 2;
  result.capped = true;
  return result;
}

int default_bin_size(std::span<const double> values) {
  if (values.size() < 100) return 1;
  TauInt t = integrated_autocorrelation_time(values);
  if (!t.converged) return 1;
  return std::max(1, static_cast<int>(std::ceil(2.0 * t.tau)));
}

}  // namespace lgt
