#pragma once

#include <map>
#include <string>
#include <vector>

#include "lgt/action.hpp"
#include "lgt/stats.hpp"

namespace lgt {

/// Tagged time series of one observable along the chain.
struct MeasurementSeries {
  std::string name;
  std::int64_t cadence = 0;
  std::vector<double> values;
  std::vector<std::uint64_t> sweeps;

  void append(std::uint64_t sweep, double value);
};

/// Fit parameters with jackknife standard errors.
struct FitResult {
  bool ok = true;
  std::map<std::string, double> params;
  std::map<std::string, double> errors;
  std::string window;
  double quality = 0.0;  // chi^2/dof where weights are available
  std::string diagnostic;
};

/// Mean normalized plaquette (1/#P) sum_p Re Tr(U_p)/N; cold start gives 1.
double plaquette_average(const Configuration& cfg);

/// Re Tr of the ordered link product along a closed path.
double wilson_loop(const Configuration& cfg, const LoopSpec& spec);
Complex wilson_loop_complex(const Configuration& cfg, const LoopSpec& spec);

/// Translation- and plane-averaged Re Tr W(R,T) on one configuration for all
/// 1 <= R <= r_max, 1 <= T <= t_max; one correlated sample per entry.
/// Imaginary parts are kept alongside for the reality check.
struct LoopSample {
  int r_max = 0, t_max = 0;
  std::vector<double> re, im;  // index (R-1)*t_max + (T-1)
  double& at(int R, int T) { return re[(R - 1) * t_max + (T - 1)]; }
  double at(int R, int T) const { return re[(R - 1) * t_max + (T - 1)]; }
};
LoopSample measure_loops(const Configuration& cfg, int r_max, int t_max);

/// Per-configuration loop samples accumulated along a chain.
struct LoopEnsemble {
  int r_max = 0, t_max = 0;
  std::vector<std::uint64_t> sweeps;
  std::vector<LoopSample> samples;

  void add(std::uint64_t sweep, LoopSample s);
  std::vector<double> entry_series(int R, int T) const;
};

/// <Re Tr W(R,T)> with jackknife errors over binned configurations.
struct LoopTable {
  int r_max = 0, t_max = 0;
  std::vector<double> mean, err;
  double value(int R, int T) const { return mean[(R - 1) * t_max + (T - 1)]; }
  double error(int R, int T) const { return err[(R - 1) * t_max + (T - 1)]; }
};
LoopTable loop_expectation_table(const LoopEnsemble& ens, int bin_size);

/// Creutz ratio chi(R,T) = -log[ W(R,T) W(R-1,T-1) / (W(R,T-1) W(R-1,T)) ].
/// The table overload propagates entry errors as if independent; the
/// ensemble overload jackknifes the full nonlinear combination.
struct ValueWithError {
  double value = 0.0;
  double error = 0.0;
};
ValueWithError creutz_ratio(const LoopTable& table, int R, int T);
ValueWithError creutz_ratio(const LoopEnsemble& ens, int R, int T, int bin_size);

/// V(R) from a linear fit of -log W(R,T) over a plateau T-window.
FitResult static_potential(const LoopTable& table, int R);

/// Least-squares fit log W(R,T) = a - c (R+T) - d RT.
FitResult perimeter_area_fit(const LoopTable& table);
FitResult perimeter_area_fit(const LoopEnsemble& ens, int bin_size);

/// Per-configuration ingredients of the connected plaquette correlation:
/// mean plaquette trace and, per separation, the translation-averaged
/// product of same-plane plaquette traces displaced along each axis.
struct CorrelationSample {
  double mean_plaquette = 0.0;            // avg Re Tr U_p
  std::vector<double> products;           // one per separation
};
CorrelationSample measure_plaquette_correlation(
    const Configuration& cfg, const std::vector<int>& separations);

struct CorrelationEnsemble {
  std::vector<int> separations;
  std::vector<std::uint64_t> sweeps;
  std::vector<CorrelationSample> samples;

  void add(std::uint64_t sweep, CorrelationSample s);
};

struct CorrelationPoint {
  int x = 0;
  double f = 0.0;
  double err = 0.0;
};

/// Connected correlation f(x) = <W_p W_p'> - <W_p><W_p'>, jackknifed over
/// binned configurations.
std::vector<CorrelationPoint> plaquette_correlation(
    const CorrelationEnsemble& ens, int bin_size);

/// Exponential-decay fit log f(x) = -|x|/xi + const. The smallest provided
/// |x| is dropped (contact term); remaining points must be positive and,
/// when errors are given, exceed twice their noise.
FitResult mass_gap_fit(const std::vector<CorrelationPoint>& points);

}  // namespace lgt
