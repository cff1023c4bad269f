#include "lgt/observables.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "lgt/errors.hpp"

namespace lgt {

void MeasurementSeries::append(std::uint64_t sweep, double value) {
  if (!sweeps.empty() && sweep <= sweeps.back())
    throw usage_error("measurement series: sweep indices must increase");
  sweeps.push_back(sweep);
  values.push_back(value);
}

double plaquette_average(const Configuration& cfg) {
  const int n = matrix_order(cfg.group());
  const auto& plaqs = cfg.lattice().plaquettes();
  if (plaqs.empty()) return 1.0;
  double s = 0.0;
  for (const PlaquetteIndex& p : plaqs)
    s += re_trace(plaquette_product(cfg, p));
  return s / (static_cast<double>(plaqs.size()) * n);
}

Complex wilson_loop_complex(const Configuration& cfg, const LoopSpec& spec) {
  const Lattice& lat = cfg.lattice();
  if (!lat.loop_is_closed(spec))
    throw usage_error("wilson_loop: path is not closed");
  Site s = spec.start;
  Mat u = group_identity(cfg.group());
  for (int step : spec.steps) {
    int mu = std::abs(step) - 1;
    if (step > 0) {
      std::int64_t ord = lat.link_ordinal(LinkIndex{s, mu});
      if (ord < 0) throw usage_error("wilson_loop: path leaves the lattice");
      u = mat_mul(u, cfg.link(ord));
      lat.shift(s, mu, +1);
    } else {
      if (!lat.shift(s, mu, -1))
        throw usage_error("wilson_loop: path leaves the lattice");
      std::int64_t ord = lat.link_ordinal(LinkIndex{s, mu});
      if (ord < 0) throw usage_error("wilson_loop: path leaves the lattice");
      u = mat_mul_adj(u, cfg.link(ord));
    }
  }
  return mat_trace(u);
}

double wilson_loop(const Configuration& cfg, const LoopSpec& spec) {
  return wilson_loop_complex(cfg, spec).real();
}

namespace {

// lines[len-1][site]: ordered product of `len` links along `axis` starting
// at `site`; invalid (flagged) where an open boundary truncates it.
struct AxisLines {
  int max_len = 0;
  std::vector<Mat> prod;     // (len-1)*n_sites + site
  std::vector<char> valid;
};

AxisLines build_axis_lines(const Configuration& cfg, int axis, int max_len) {
  const Lattice& lat = cfg.lattice();
  const std::int64_t ns = lat.n_sites();
  AxisLines lines;
  lines.max_len = max_len;
  lines.prod.assign(static_cast<std::size_t>(max_len) * ns,
                    group_identity(cfg.group()));
  lines.valid.assign(lines.prod.size(), 0);
  for (std::int64_t si = 0; si < ns; ++si) {
    Site s = lat.site_at(si);
    std::int64_t ord = lat.link_ordinal(LinkIndex{s, axis});
    if (ord < 0) continue;
    lines.prod[si] = cfg.link(ord);
    lines.valid[si] = 1;
  }
  for (int len = 2; len <= max_len; ++len) {
    for (std::int64_t si = 0; si < ns; ++si) {
      if (!lines.valid[si]) continue;
      Site next = lat.site_at(si);
      if (!lat.shift(next, axis, +1)) continue;
      std::int64_t ni = lat.site_index(next);
      const std::size_t prev = static_cast<std::size_t>(len - 2) * ns;
      if (!lines.valid[prev + ni]) continue;
      const std::size_t cur = static_cast<std::size_t>(len - 1) * ns;
      lines.prod[cur + si] = mat_mul(lines.prod[si], lines.prod[prev + ni]);
      lines.valid[cur + si] = 1;
    }
  }
  return lines;
}

}  // namespace

LoopSample measure_loops(const Configuration& cfg, int r_max, int t_max) {
  const Lattice& lat = cfg.lattice();
  if (r_max < 1 || t_max < 1)
    throw usage_error("measure_loops: r_max, t_max must be >= 1");
  for (int mu = 0; mu < lat.ndims(); ++mu)
    if (std::max(r_max, t_max) > lat.extent(mu) - 1)
      throw usage_error("measure_loops: loop size exceeds extent - 1");
  const int max_len = std::max(r_max, t_max);
  std::vector<AxisLines> lines;
  lines.reserve(lat.ndims());
  for (int mu = 0; mu < lat.ndims(); ++mu)
    lines.push_back(build_axis_lines(cfg, mu, max_len));

  LoopSample out;
  out.r_max = r_max;
  out.t_max = t_max;
  out.re.assign(static_cast<std::size_t>(r_max) * t_max, 0.0);
  out.im.assign(out.re.size(), 0.0);
  std::vector<std::int64_t> counts(out.re.size(), 0);
  const std::int64_t ns = lat.n_sites();
  for (int mu = 0; mu < lat.ndims(); ++mu)
    for (int nu = mu + 1; nu < lat.ndims(); ++nu)
      for (std::int64_t si = 0; si < ns; ++si) {
        Site s = lat.site_at(si);
        for (int R = 1; R <= r_max; ++R) {
          Site s_r = s;
          bool ok_r = true;
          for (int i = 0; i < R && ok_r; ++i) ok_r = lat.shift(s_r, mu, +1);
          if (!ok_r) break;
          std::size_t row_r = static_cast<std::size_t>(R - 1) * ns;
          if (!lines[mu].valid[row_r + si]) break;
          for (int T = 1; T <= t_max; ++T) {
            Site s_t = s;
            bool ok_t = true;
            for (int i = 0; i < T && ok_t; ++i) ok_t = lat.shift(s_t, nu, +1);
            if (!ok_t) break;
            std::size_t row_t = static_cast<std::size_t>(T - 1) * ns;
            std::int64_t i_r = lat.site_index(s_r);
            std::int64_t i_t = lat.site_index(s_t);
            if (!lines[nu].valid[row_t + i_r] || !lines[mu].valid[row_r + i_t])
              break;
            // W = L_mu(s,R) L_nu(s+R mu,T) L_mu(s+T nu,R)^+ L_nu(s,T)^+.
            Mat w = mat_mul(lines[mu].prod[row_r + si],
                            lines[nu].prod[row_t + i_r]);
            w = mat_mul_adj(w, lines[mu].prod[row_r + i_t]);
            w = mat_mul_adj(w, lines[nu].prod[row_t + si]);
            Complex tr = mat_trace(w);
            std::size_t idx = static_cast<std::size_t>(R - 1) * t_max + (T - 1);
            out.re[idx] += tr.real();
            out.im[idx] += tr.imag();
            ++counts[idx];
          }
        }
      }
  for (std::size_t i = 0; i < out.re.size(); ++i) {
    if (counts[i] == 0)
      throw usage_error("measure_loops: no placement for some loop size");
    out.re[i] /= counts[i];
    out.im[i] /= counts[i];
  }
  return out;
}

void LoopEnsemble::add(std::uint64_t sweep, LoopSample s) {
  if (samples.empty()) {
    r_max = s.r_max;
    t_max = s.t_max;
  } else if (s.r_max != r_max || s.t_max != t_max) {
    throw usage_error("loop ensemble: sample shape mismatch");
  }
  sweeps.push_back(sweep);
  samples.push_back(std::move(s));
}

std::vector<double> LoopEnsemble::entry_series(int R, int T) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const LoopSample& s : samples) out.push_back(s.at(R, T));
  return out;
}

LoopTable loop_expectation_table(const LoopEnsemble& ens, int bin_size) {
  LoopTable table;
  table.r_max = ens.r_max;
  table.t_max = ens.t_max;
  table.mean.assign(static_cast<std::size_t>(ens.r_max) * ens.t_max, 0.0);
  table.err.assign(table.mean.size(), 0.0);
  for (int R = 1; R <= ens.r_max; ++R)
    for (int T = 1; T <= ens.t_max; ++T) {
      std::vector<double> series = ens.entry_series(R, T);
      Jackknife jk = jackknife_mean_error(series, bin_size);
      table.mean[(R - 1) * ens.t_max + (T - 1)] = jk.mean;
      table.err[(R - 1) * ens.t_max + (T - 1)] = jk.error;
    }
  return table;
}

namespace {

double creutz_of(double w_rt, double w_r1t1, double w_rt1, double w_r1t) {
  if (w_rt <= 0 || w_r1t1 <= 0 || w_rt1 <= 0 || w_r1t <= 0)
    throw numerical_error(
        "creutz_ratio: nonpositive loop expectation (noise-dominated data)");
  return -std::log((w_rt * w_r1t1) / (w_rt1 * w_r1t));
}

}  // namespace

ValueWithError creutz_ratio(const LoopTable& table, int R, int T) {
  if (R < 2 || T < 2 || R > table.r_max || T > table.t_max)
    throw usage_error("creutz_ratio: need 2 <= R, T within the table");
  ValueWithError out;
  out.value = creutz_of(table.value(R, T), table.value(R - 1, T - 1),
                        table.value(R, T - 1), table.value(R - 1, T));
  double v = 0.0;
  for (auto [r, t] : {std::pair{R, T}, {R - 1, T - 1}, {R, T - 1}, {R - 1, T}}) {
    double rel = table.error(r, t) / table.value(r, t);
    v += rel * rel;
  }
  out.error = std::sqrt(v);
  return out;
}

ValueWithError creutz_ratio(const LoopEnsemble& ens, int R, int T,
                            int bin_size) {
  if (R < 2 || T < 2 || R > ens.r_max || T > ens.t_max)
    throw usage_error("creutz_ratio: need 2 <= R, T within the table");
  std::vector<std::vector<double>> series;
  for (auto [r, t] : {std::pair{R, T}, {R - 1, T - 1}, {R, T - 1}, {R - 1, T}})
    series.push_back(ens.entry_series(r, t));
  std::vector<std::span<const double>> spans(series.begin(), series.end());
  Jackknife jk = jackknife_derived(spans, bin_size, [](std::span<const double> m) {
    return creutz_of(m[0], m[1], m[2], m[3]);
  });
  return ValueWithError{jk.mean, jk.error};
}

namespace {

struct LinearFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_err;
  double chi2 = 0.0;
  int dof = 0;
  bool full_rank = true;
};

// Weighted linear least squares y ~ X beta. If `weighted` is false the
// covariance is scaled by the residual variance instead of the supplied
// sigmas.
LinearFit linear_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& sigma, bool weighted) {
  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(x.cols());
  Eigen::MatrixXd xw = x;
  Eigen::VectorXd yw = y;
  if (weighted)
    for (int i = 0; i < n; ++i) {
      xw.row(i) /= sigma(i);
      yw(i) /= sigma(i);
    }
  Eigen::MatrixXd xtx = xw.transpose() * xw;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
  LinearFit fit;
  fit.dof = n - p;
  if (lu.rank() < p) {
    fit.full_rank = false;
    fit.beta = Eigen::VectorXd::Zero(p);
    fit.beta_err = Eigen::VectorXd::Zero(p);
    return fit;
  }
  Eigen::MatrixXd cov = lu.inverse();
  fit.beta = cov * (xw.transpose() * yw);
  Eigen::VectorXd resid = yw - xw * fit.beta;
  fit.chi2 = resid.squaredNorm();
  double scale = 1.0;
  if (!weighted && fit.dof > 0) scale = fit.chi2 / fit.dof;
  fit.beta_err = (scale * cov.diagonal().array()).sqrt();
  return fit;
}

}  // namespace

FitResult static_potential(const LoopTable& table, int R) {
  FitResult result;
  if (R < 1 || R > table.r_max)
    throw usage_error("static_potential: R outside table");
  // Points with positive expectation; T = 1 excluded (excited-state
  // contamination).
  std::vector<int> ts;
  for (int T = 2; T <= table.t_max; ++T)
    if (table.value(R, T) > 0) ts.push_back(T);
  if (static_cast<int>(ts.size()) < 3) {
    result.ok = false;
    result.diagnostic = "static_potential: fewer than 3 usable T points";
    return result;
  }
  bool weighted = true;
  for (int T : ts)
    if (!(table.error(R, T) > 0)) weighted = false;

  auto fit_window = [&](std::size_t lo) {
    std::size_t n = ts.size() - lo;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      int T = ts[lo + i];
      double w = table.value(R, T);
      x(i, 0) = T;
      x(i, 1) = 1.0;
      y(i) = -std::log(w);
      s(i) = weighted ? table.error(R, T) / w : 1.0;
    }
    return linear_fit(x, y, s, weighted);
  };

  // Plateau scan: enlarge T0 until the fit becomes acceptable.
  std::size_t best_lo = 0;
  LinearFit best = fit_window(0);
  for (std::size_t lo = 0; ts.size() - lo >= 3; ++lo) {
    LinearFit f = fit_window(lo);
    double q = f.dof > 0 ? f.chi2 / f.dof : 0.0;
    double bq = best.dof > 0 ? best.chi2 / best.dof : 0.0;
    if (lo == 0 || q < bq) {
      best = f;
      best_lo = lo;
    }
    if (q <= 2.0) {
      best = f;
      best_lo = lo;
      break;
    }
  }
  double q = best.dof > 0 ? best.chi2 / best.dof : 0.0;
  if (weighted && q > 4.0) {
    result.ok = false;
    result.diagnostic = "static_potential: no stable plateau window";
  }
  result.params["V"] = best.beta(0);
  result.errors["V"] = best.beta_err(0);
  result.params["const"] = best.beta(1);
  result.errors["const"] = best.beta_err(1);
  result.window = "T in [" + std::to_string(ts[best_lo]) + "," +
                  std::to_string(ts.back()) + "]";
  result.quality = q;
  return result;
}

namespace {

FitResult perimeter_area_from_points(const std::vector<std::array<double, 4>>& pts,
                                     bool weighted) {
  // pts rows: (R, T, W, sigma_W).
  FitResult result;
  if (pts.size() < 6)
    throw usage_error("perimeter_area_fit: need at least 6 usable entries");
  Eigen::MatrixXd x(pts.size(), 3);
  Eigen::VectorXd y(pts.size()), s(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double r = pts[i][0], t = pts[i][1], w = pts[i][2];
    x(i, 0) = 1.0;
    x(i, 1) = -(r + t);
    x(i, 2) = -r * t;
    y(i) = std::log(w);
    s(i) = weighted ? pts[i][3] / w : 1.0;
  }
  LinearFit fit = linear_fit(x, y, s, weighted);
  if (!fit.full_rank)
    throw usage_error(
        "perimeter_area_fit: rank-deficient design (too few distinct R+T, RT)");
  result.params["a"] = fit.beta(0);
  result.params["c"] = fit.beta(1);
  result.params["d"] = fit.beta(2);
  result.errors["a"] = fit.beta_err(0);
  result.errors["c"] = fit.beta_err(1);
  result.errors["d"] = fit.beta_err(2);
  result.quality = fit.dof > 0 ? fit.chi2 / fit.dof : 0.0;
  return result;
}

}  // namespace

FitResult perimeter_area_fit(const LoopTable& table) {
  std::vector<std::array<double, 4>> pts;
  bool weighted = true;
  for (int R = 1; R <= table.r_max; ++R)
    for (int T = 1; T <= table.t_max; ++T) {
      double w = table.value(R, T);
      if (w <= 0) continue;
      if (!(table.error(R, T) > 0)) weighted = false;
      pts.push_back({double(R), double(T), w, table.error(R, T)});
    }
  FitResult result = perimeter_area_from_points(pts, weighted);
  result.window = "all positive entries";
  return result;
}

FitResult perimeter_area_fit(const LoopEnsemble& ens, int bin_size) {
  std::vector<std::vector<double>> series;
  std::vector<std::pair<int, int>> rt;
  for (int R = 1; R <= ens.r_max; ++R)
    for (int T = 1; T <= ens.t_max; ++T) {
      series.push_back(ens.entry_series(R, T));
      rt.emplace_back(R, T);
    }
  std::vector<std::span<const double>> spans(series.begin(), series.end());
  auto param = [&](const char* name) {
    return jackknife_derived(spans, bin_size, [&](std::span<const double> m) {
      std::vector<std::array<double, 4>> pts;
      for (std::size_t i = 0; i < rt.size(); ++i)
        if (m[i] > 0)
          pts.push_back({double(rt[i].first), double(rt[i].second), m[i], 0.0});
      FitResult f = perimeter_area_from_points(pts, false);
      return f.params.at(name);
    });
  };
  FitResult result;
  for (const char* name : {"a", "c", "d"}) {
    Jackknife jk = param(name);
    result.params[name] = jk.mean;
    result.errors[name] = jk.error;
  }
  result.window = "jackknife refit over binned configurations";
  return result;
}

CorrelationSample measure_plaquette_correlation(
    const Configuration& cfg, const std::vector<int>& separations) {
  const Lattice& lat = cfg.lattice();
  for (int x : separations) {
    if (x < 0) throw usage_error("plaquette_correlation: separations must be >= 0");
    for (int mu = 0; mu < lat.ndims(); ++mu)
      if (lat.boundary() == Boundary::Periodic && 2 * x > lat.extent(mu))
        throw usage_error("plaquette_correlation: separation exceeds L/2");
  }
  std::vector<double> field(lat.n_plaquettes());
  for (std::int64_t i = 0; i < lat.n_plaquettes(); ++i)
    field[i] = re_trace(plaquette_product(cfg, lat.plaquettes()[i]));

  CorrelationSample out;
  double wsum = 0.0;
  for (double w : field) wsum += w;
  out.mean_plaquette = wsum / static_cast<double>(field.size());
  out.products.reserve(separations.size());
  for (int x : separations) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < lat.n_plaquettes(); ++i) {
      const PlaquetteIndex& p = lat.plaquettes()[i];
      for (int d = 0; d < lat.ndims(); ++d) {
        Site s = p.site;
        bool ok = true;
        for (int step = 0; step < x && ok; ++step) ok = lat.shift(s, d, +1);
        if (!ok) continue;
        std::int64_t j = lat.plaquette_ordinal(PlaquetteIndex{s, p.mu, p.nu});
        if (j < 0) continue;
        sum += field[i] * field[j];
        ++count;
      }
    }
    if (count == 0)
      throw usage_error("plaquette_correlation: no pairs at some separation");
    out.products.push_back(sum / static_cast<double>(count));
  }
  return out;
}

void CorrelationEnsemble::add(std::uint64_t sweep, CorrelationSample s) {
  if (!samples.empty() && s.products.size() != separations.size())
    throw usage_error("correlation ensemble: sample shape mismatch");
  sweeps.push_back(sweep);
  samples.push_back(std::move(s));
}

std::vector<CorrelationPoint> plaquette_correlation(
    const CorrelationEnsemble& ens, int bin_size) {
  std::vector<CorrelationPoint> out;
  std::vector<double> wbar;
  wbar.reserve(ens.samples.size());
  for (const CorrelationSample& s : ens.samples) wbar.push_back(s.mean_plaquette);
  for (std::size_t i = 0; i < ens.separations.size(); ++i) {
    std::vector<double> prod;
    prod.reserve(ens.samples.size());
    for (const CorrelationSample& s : ens.samples) prod.push_back(s.products[i]);
    Jackknife jk = jackknife_derived(
        {std::span<const double>(prod), std::span<const double>(wbar)}, bin_size,
        [](std::span<const double> m) { return m[0] - m[1] * m[1]; });
    out.push_back(CorrelationPoint{ens.separations[i], jk.mean, jk.error});
  }
  return out;
}

FitResult mass_gap_fit(const std::vector<CorrelationPoint>& points) {
  FitResult result;
  std::vector<CorrelationPoint> pts = points;
  std::sort(pts.begin(), pts.end(),
            [](const CorrelationPoint& a, const CorrelationPoint& b) {
              return a.x < b.x;
            });
  if (!pts.empty()) pts.erase(pts.begin());  // contact term at smallest |x|
  std::vector<CorrelationPoint> usable;
  for (const CorrelationPoint& p : pts)
    if (p.f > 0 && (p.err == 0.0 || p.f > 2.0 * p.err)) usable.push_back(p);
  if (usable.size() < 3) {
    result.ok = false;
    result.diagnostic = "mass_gap_fit: fewer than 3 usable points";
    return result;
  }
  bool weighted = true;
  for (const CorrelationPoint& p : usable)
    if (!(p.err > 0)) weighted = false;
  Eigen::MatrixXd x(usable.size(), 2);
  Eigen::VectorXd y(usable.size()), s(usable.size());
  for (std::size_t i = 0; i < usable.size(); ++i) {
    x(i, 0) = -static_cast<double>(usable[i].x);
    x(i, 1) = 1.0;
    y(i) = std::log(usable[i].f);
    s(i) = weighted ? usable[i].err / usable[i].f : 1.0;
  }
  LinearFit fit = linear_fit(x, y, s, weighted);
  double inv_xi = fit.beta(0);
  if (!(inv_xi > 0)) {
    result.ok = false;
    result.diagnostic = "mass_gap_fit: correlation does not decay";
    return result;
  }
  result.params["xi"] = 1.0 / inv_xi;
  result.errors["xi"] = fit.beta_err(0) / (inv_xi * inv_xi);
  result.params["const"] = fit.beta(1);
  result.errors["const"] = fit.beta_err(1);
  result.window = "x in [" + std::to_string(usable.front().x) + "," +
                  std::to_string(usable.back().x) + "]";
  result.quality = fit.dof > 0 ? fit.chi2 / fit.dof : 0.0;
  return result;
}

}  // namespace lgt
