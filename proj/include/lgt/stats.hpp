#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lgt {

struct Jackknife {
  double mean = 0.0;
  double error = 0.0;
  int bins = 0;
};

/// Means of consecutive bins of `bin_size`; the trailing remainder is
/// discarded.
std::vector<double> bin_means(std::span<const double> values, int bin_size);

/// Leave-one-bin-out jackknife mean and standard error.
Jackknife jackknife_mean_error(std::span<const double> values, int bin_size);

/// Jackknife of a derived quantity f(mean_1, ..., mean_m) over several
/// aligned series: bins all series identically, evaluates f on leave-one-out
/// bin means. This is how fit parameters and connected correlations get
/// their errors.
Jackknife jackknife_derived(
    const std::vector<std::span<const double>>& series, int bin_size,
    const std::function<double(std::span<const double> means)>& fn);

struct TauInt {
  double tau = 0.5;
  double error = 0.0;
  int window = 0;
  bool converged = true;
};

/// Integrated autocorrelation time tau = 1/2 + sum_t rho(t), summed up to
/// the smallest self-consistent window W >= 5 tau(W). Degenerate (constant)
/// input is flagged rather than thrown.
TauInt integrated_autocorrelation_time(std::span<const double> values);

struct ThermalizationCut {
  std::int64_t cut = 0;
  bool capped = false;
};

/// Smallest cut after which the first and second halves of the remainder
/// agree within 2 sigma; capped at half the series.
ThermalizationCut thermalization_cut(std::span<const double> values);

/// Default bin size max(1, ceil(2 tau_int)) for a series.
int default_bin_size(std::span<const double> values);

}  // namespace lgt
