// End-to-end validation harness. Each command-line argument selects one
// numbered criterion; the binary prints one PASS/FAIL line per criterion and
// exits nonzero if any failed. Criteria 4 and 9 share a single long SU(2)
// chain, so running them in one invocation amortizes the sampling cost.
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lgt/experiment.hpp"
#include "lgt/observables.hpp"
#include "lgt/oracle.hpp"
#include "lgt/sampler.hpp"
#include "lgt/stats.hpp"

using namespace lgt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& out, bool ok, const std::string& what) {
  if (!ok) {
    out.pass = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += what;
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Jackknife chain_mean(Configuration& cfg, const SamplerParams& params,
                     std::int64_t therm, std::int64_t sweeps,
                     const std::function<double(const Configuration&)>& f) {
  run_chain(cfg, params, therm, 0, {});
  std::vector<double> series;
  series.reserve(static_cast<std::size_t>(sweeps));
  run_chain(
      cfg, params, sweeps, 1,
      [&](const Configuration& c, std::uint64_t) { series.push_back(f(c)); },
      static_cast<std::uint64_t>(therm));
  return jackknife_mean_error(series, default_bin_size(series));
}

// ---- criterion 1: exact enumeration vs MCMC on the tiny sign model ----
Outcome criterion1() {
  Outcome out;
  auto lat = std::make_shared<Lattice>(2, std::vector<int>{2, 2}, Boundary::Open);
  for (double beta : {0.3, 0.7, 1.5}) {
    double exact = exact_tiny_lattice(*lat, beta, [](const Configuration& c) {
      return plaquette_average(c);
    });
    Configuration cfg = cold_start(lat, Group::Z2);
    SamplerParams params;
    params.beta = beta;
    params.seed = 101;
    Jackknife jk = chain_mean(cfg, params, 1000, 1000000,
                              [](const Configuration& c) {
                                return plaquette_average(c);
                              });
    note(out, jk.error <= 0.002,
         "beta=" + fmt(beta) + " sigma=" + fmt(jk.error) + " > 0.002");
    note(out, std::abs(jk.mean - exact) < 3.0 * jk.error,
         "beta=" + fmt(beta) + " mean=" + fmt(jk.mean) + " exact=" +
             fmt(exact) + " sigma=" + fmt(jk.error));
  }
  if (out.pass) out.detail = "MCMC matches enumeration at 3 betas, sigma <= 0.002";
  return out;
}

// ---- criterion 2: single-plaquette heat bath vs quadrature ----
Outcome criterion2() {
  Outcome out;
  auto lat = std::make_shared<Lattice>(2, std::vector<int>{2, 2}, Boundary::Open);
  for (Group g : {Group::U1, Group::SU2}) {
    for (double beta : {0.5, 1.0, 2.0}) {
      double exact = single_plaquette_expectation(g, beta);
      Configuration cfg = cold_start(lat, g);
      SamplerParams params;
      params.beta = beta;
      params.seed = 201 + static_cast<int>(g);
      Jackknife jk = chain_mean(cfg, params, 1000, 300000,
                                [](const Configuration& c) {
                                  return plaquette_average(c);
                                });
      std::string tag = std::string(group_name(g)) + " beta=" + fmt(beta);
      note(out, jk.error <= 0.002, tag + " sigma=" + fmt(jk.error) + " > 0.002");
      note(out, std::abs(jk.mean - exact) < 3.0 * jk.error,
           tag + " mean=" + fmt(jk.mean) + " exact=" + fmt(exact) +
               " sigma=" + fmt(jk.error));
    }
  }
  if (out.pass) out.detail = "heat-bath means match quadrature, sigma <= 0.002";
  return out;
}

// ---- criterion 3: exact 2D area law for U(1) ----
Outcome criterion3() {
  Outcome out;
  const double beta = 2.0;
  auto lat = std::make_shared<Lattice>(2, std::vector<int>{16, 16}, Boundary::Open);
  Configuration cfg = cold_start(lat, Group::U1);
  SamplerParams params;
  params.beta = beta;
  params.seed = 301;
  run_chain(cfg, params, 500, 0, {});
  LoopEnsemble ens;
  ens.r_max = ens.t_max = 3;
  run_chain(
      cfg, params, 20000, 1,
      [&](const Configuration& c, std::uint64_t sweep) {
        ens.add(sweep, measure_loops(c, 3, 3));
      },
      500);
  int bin = default_bin_size(ens.entry_series(1, 1));
  LoopTable table = loop_expectation_table(ens, bin);
  const double w1 = single_plaquette_expectation(Group::U1, beta);
  for (int R = 1; R <= 3; ++R)
    for (int T = 1; T <= 3; ++T) {
      double exact = std::pow(w1, R * T);
      note(out, std::abs(table.value(R, T) - exact) < 3.0 * table.error(R, T),
           "W(" + std::to_string(R) + "," + std::to_string(T) + ")=" +
               fmt(table.value(R, T)) + " exact=" + fmt(exact) + " sigma=" +
               fmt(table.error(R, T)));
    }
  FitResult fit = perimeter_area_fit(ens, bin);
  note(out, fit.ok, "perimeter-area fit failed: " + fit.diagnostic);
  if (fit.ok) {
    double d0 = -std::log(w1);
    note(out, std::abs(fit.params.at("c")) < 3.0 * fit.errors.at("c"),
         "c=" + fmt(fit.params.at("c")) + " sigma=" + fmt(fit.errors.at("c")));
    note(out, std::abs(fit.params.at("d") - d0) < 3.0 * fit.errors.at("d"),
         "d=" + fmt(fit.params.at("d")) + " expected=" + fmt(d0) + " sigma=" +
             fmt(fit.errors.at("d")));
  }
  if (out.pass)
    out.detail = "all RT <= 9 loops match w1^(RT); c ~ 0, d ~ " +
                 fmt(-std::log(w1));
  return out;
}

// ---- shared chain for criteria 4 and 9 ----
struct StrongCouplingData {
  LoopEnsemble loops;
  CorrelationEnsemble corr;
  int bin = 1;
};

const StrongCouplingData& strong_coupling_chain() {
  static std::optional<StrongCouplingData> data;
  if (data) return *data;
  data.emplace();
  auto lat = std::make_shared<Lattice>(4, std::vector<int>{6, 6, 6, 6}, Boundary::Periodic);
  Configuration cfg = cold_start(lat, Group::SU2);
  SamplerParams params;
  params.beta = 0.5;
  params.seed = 401;
  data->loops.r_max = data->loops.t_max = 3;
  data->corr.separations = {0, 1, 2, 3};
  run_chain(cfg, params, 300, 0, {});
  run_chain(
      cfg, params, 30000, 1,
      [&](const Configuration& c, std::uint64_t sweep) {
        data->loops.add(sweep, measure_loops(c, 3, 3));
        data->corr.add(sweep,
                       measure_plaquette_correlation(c, data->corr.separations));
      },
      300);
  data->bin = default_bin_size(data->loops.entry_series(1, 1));
  return *data;
}

Outcome criterion4() {
  Outcome out;
  const StrongCouplingData& data = strong_coupling_chain();
  const double target = -std::log(single_plaquette_expectation(Group::SU2, 0.5));
  ValueWithError chi = creutz_ratio(data.loops, 2, 2, data.bin);
  note(out, std::abs(chi.value - target) < 0.10 * target,
       "chi(2,2)=" + fmt(chi.value) + " target=" + fmt(target) + " err=" +
           fmt(chi.error));
  FitResult fit = perimeter_area_fit(data.loops, data.bin);
  note(out, fit.ok, "perimeter-area fit failed: " + fit.diagnostic);
  if (fit.ok)
    note(out, std::abs(fit.params.at("d") - target) < 0.10 * target,
         "d=" + fmt(fit.params.at("d")) + " target=" + fmt(target));
  if (out.pass)
    out.detail = "chi(2,2) and fitted area coefficient within 10% of " +
                 fmt(target);
  return out;
}

Outcome criterion9() {
  Outcome out;
  const StrongCouplingData& data = strong_coupling_chain();
  auto points = plaquette_correlation(data.corr, data.bin);
  // points[0] is the x = 0 contact term used only by the decay fit.
  for (std::size_t i = 1; i < points.size(); ++i) {
    const CorrelationPoint& p = points[i];
    note(out, p.f > 2.0 * p.err,
         "f(" + std::to_string(p.x) + ")=" + fmt(p.f) + " err=" + fmt(p.err) +
             " not positive at 2 sigma");
    if (i + 1 < points.size()) {
      const CorrelationPoint& q = points[i + 1];
      double sigma = std::sqrt(p.err * p.err + q.err * q.err);
      note(out, p.f - q.f > 2.0 * sigma,
           "f(" + std::to_string(p.x) + ")-f(" + std::to_string(q.x) + ")=" +
               fmt(p.f - q.f) + " sigma=" + fmt(sigma) +
               " not decreasing at 2 sigma");
    }
  }
  FitResult fit = mass_gap_fit(points);
  note(out, fit.ok, "decay fit failed: " + fit.diagnostic);
  if (fit.ok) {
    double xi = fit.params.at("xi");
    note(out, std::isfinite(xi) && xi > 0.0, "xi=" + fmt(xi));
    if (out.pass)
      out.detail = "f(x) positive and decreasing for x = 1..3; xi=" + fmt(xi);
  }
  return out;
}

// ---- criterion 5: discretized action vs curvature integral ----
Outcome criterion5() {
  Outcome out;
  SmoothConnection conn = su2_trig_connection(3, 0.5);
  std::vector<double> box(3, 1.0);
  std::vector<double> gaps;
  for (double eps : {0.1, 0.05, 0.025})
    gaps.push_back(std::abs(bch_action_check(conn, eps, box).ratio - 1.0));
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    double order = std::log2(gaps[i] / gaps[i + 1]);
    note(out, order >= 0.9, "convergence order " + fmt(order) + " < 0.9");
  }

  const double f = 0.7, eps = 0.025;
  BchCheck b = bch_action_check(abelian_linear_connection(2, f), eps, {1.0, 1.0});
  double g = eps * eps * f;
  double closed = (1.0 - std::cos(g)) / (g * g / 2.0);
  note(out, std::abs(b.ratio - closed) < 1e-8,
       "constant-curvature ratio=" + fmt(b.ratio) + " closed=" + fmt(closed));
  if (out.pass)
    out.detail = "ratio -> 1 with order >= 0.9; abelian case matches closed form";
  return out;
}

// ---- criterion 6: beta = 0 reduces every sampler to the Haar ensemble ----
Outcome criterion6() {
  Outcome out;
  auto lat = std::make_shared<Lattice>(4, std::vector<int>{4, 4, 4, 4}, Boundary::Periodic);
  auto abs_trace_sq = [&](const Configuration& c) {
    double s = 0.0;
    for (std::int64_t i = 0; i < lat->n_plaquettes(); ++i)
      s += std::norm(mat_trace(plaquette_product(c, lat->plaquettes()[i])));
    return s / static_cast<double>(lat->n_plaquettes());
  };
  for (Group g : {Group::Z2, Group::U1, Group::SU2, Group::SU3}) {
    for (Algorithm alg : {Algorithm::Metropolis, Algorithm::Heatbath}) {
      Configuration cfg = cold_start(lat, g);
      SamplerParams params;
      params.beta = 0.0;
      params.algorithm = alg;
      params.proposal_spread = 1.5;
      params.seed = 601 + 10 * static_cast<int>(g) + static_cast<int>(alg);
      std::string tag = std::string(group_name(g)) + "/" + algorithm_name(alg);
      Jackknife jk = chain_mean(cfg, params, 50, 200,
                                [](const Configuration& c) {
                                  return plaquette_average(c);
                                });
      note(out, std::abs(jk.mean) < 3.0 * jk.error + 1e-9,
           tag + " plaquette=" + fmt(jk.mean) + " sigma=" + fmt(jk.error));
      if (g == Group::SU2) {
        Configuration cfg2 = cold_start(lat, g);
        params.seed += 1000;
        Jackknife tr2 = chain_mean(cfg2, params, 50, 200, abs_trace_sq);
        note(out, std::abs(tr2.mean - 1.0) < 3.0 * tr2.error,
             tag + " |Tr|^2=" + fmt(tr2.mean) + " sigma=" + fmt(tr2.error));
      }
    }
  }
  if (out.pass) out.detail = "plaquette ~ 0 and SU(2) |Tr|^2 ~ 1 for all samplers";
  return out;
}

// ---- criterion 7: gauge invariance and local/global action consistency ----
Outcome criterion7() {
  Outcome out;
  for (Group g : {Group::Z2, Group::U1, Group::SU2, Group::SU3}) {
    auto lat = std::make_shared<Lattice>(3, std::vector<int>{3, 3, 3}, Boundary::Periodic);
    RandomStream rng = RandomStream::keyed(701, static_cast<int>(g));
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
      Configuration cfg = hot_start(lat, g, 7000 + 100 * static_cast<int>(g) + trial);
      double action = wilson_action(cfg);
      LoopSample loops = measure_loops(cfg, 2, 2);
      std::vector<Mat> gauge;
      for (std::int64_t i = 0; i < lat->n_sites(); ++i)
        gauge.push_back(haar_sample(rng, g));
      apply_gauge_transform(cfg, gauge);
      if (std::abs(wilson_action(cfg) - action) >
          1e-10 * std::max(1.0, std::abs(action)))
        ++bad;
      LoopSample moved = measure_loops(cfg, 2, 2);
      for (std::size_t i = 0; i < loops.re.size(); ++i)
        if (std::abs(moved.re[i] - loops.re[i]) > 1e-10) ++bad;
    }
    note(out, bad == 0,
         std::string(group_name(g)) + ": " + std::to_string(bad) +
             " invariance violations");
  }

  // Exhaustive local-vs-global check on the sign model.
  {
    auto lat = std::make_shared<Lattice>(2, std::vector<int>{3, 3}, Boundary::Periodic);
    int bad = 0;
    for (int start = 0; start < 20; ++start) {
      Configuration cfg = hot_start(lat, Group::Z2, 750 + start);
      double before = wilson_action(cfg);
      for (std::int64_t ord = 0; ord < lat->n_links(); ++ord) {
        Mat flipped = -cfg.link(ord);
        double local = local_action_delta(cfg, lat->links()[ord], flipped);
        Configuration changed = cfg;
        changed.set_link(ord, flipped);
        double global = wilson_action(changed) - before;
        if (std::abs(local - global) > 1e-10 * std::max(1.0, std::abs(global)))
          ++bad;
      }
    }
    note(out, bad == 0,
         "sign model: " + std::to_string(bad) + " local/global mismatches");
  }

  // Random trials on the continuous groups.
  for (Group g : {Group::SU2, Group::SU3}) {
    auto lat = std::make_shared<Lattice>(4, std::vector<int>{3, 3, 3, 3}, Boundary::Periodic);
    Configuration cfg = hot_start(lat, g, 760 + static_cast<int>(g));
    RandomStream rng = RandomStream::keyed(770, static_cast<int>(g));
    double before = wilson_action(cfg);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::int64_t ord =
          static_cast<std::int64_t>(rng.next_u64() % lat->n_links());
      Mat repl = haar_sample(rng, g);
      double local = local_action_delta(cfg, lat->links()[ord], repl);
      Configuration changed = cfg;
      changed.set_link(ord, repl);
      double global = wilson_action(changed) - before;
      if (std::abs(local - global) >
          1e-10 * std::max({1.0, std::abs(local), std::abs(global)}))
        ++bad;
    }
    note(out, bad == 0,
         std::string(group_name(g)) + ": " + std::to_string(bad) +
             " local/global mismatches");
  }
  if (out.pass) out.detail = "gauge and local/global invariances hold to 1e-10";
  return out;
}

// ---- criterion 8: determinism ----
Outcome criterion8() {
  Outcome out;
  fs::path tmp = fs::temp_directory_path() /
                 ("lgt_accept8_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto config_for = [&](const std::string& dir) {
    std::istringstream in(
        "[model]\ngroup = su2\nndims = 2\nextents = 4 4\n"
        "[sampler]\nbeta = 1.0\nseed = 801\n"
        "[schedule]\nthermalization = 20\nmeasurement = 200\ncadence = 1\n"
        "[observables]\nr_max = 1\nt_max = 1\n"
        "[output]\ndir = " + (tmp / dir).string() + "\n");
    return ExperimentConfig::parse(in);
  };

  // Identical config and seed: byte-identical outputs.
  ExperimentConfig cfg = config_for("a");
  run_experiment(cfg);
  std::string nd = slurp(tmp / "a" / "measurements.ndjson");
  std::string ck = slurp(tmp / "a" / "checkpoint.ckpt");
  run_experiment(cfg);
  note(out, slurp(tmp / "a" / "measurements.ndjson") == nd,
       "repeat run changed measurements");
  note(out, slurp(tmp / "a" / "checkpoint.ckpt") == ck,
       "repeat run changed checkpoint");

  // Worker-count invariance of the chain itself.
  auto series_with = [&](int workers) {
    auto lat = std::make_shared<Lattice>(4, std::vector<int>{4, 4, 4, 4}, Boundary::Periodic);
    Configuration c = cold_start(lat, Group::SU2);
    SamplerParams params;
    params.beta = 1.0;
    params.seed = 802;
    params.workers = workers;
    std::vector<double> v;
    run_chain(c, params, 40, 1, [&](const Configuration& cc, std::uint64_t) {
      v.push_back(plaquette_average(cc));
    });
    return v;
  };
  auto base = series_with(1);
  note(out, base == series_with(2), "2-worker chain diverged");
  note(out, base == series_with(8), "8-worker chain diverged");

  // Resume equivalence.
  ExperimentConfig split = config_for("b");
  RunOutcome part = run_experiment(split, {}, 77);
  run_experiment(split, part.dir / "checkpoint.ckpt");
  auto body = [](const std::string& s) { return s.substr(s.find('\n') + 1); };
  note(out, body(slurp(tmp / "b" / "measurements.ndjson")) == body(nd),
       "resumed run differs from uninterrupted run");
  note(out, slurp(tmp / "b" / "checkpoint.ckpt") == ck,
       "resumed checkpoint differs");

  std::error_code ec;
  fs::remove_all(tmp, ec);
  if (out.pass) out.detail = "byte-identical reruns, worker invariance, resume";
  return out;
}

// ---- criterion 10: statistics calibration on synthetic series ----
Outcome criterion10() {
  Outcome out;
  RandomStream rng = RandomStream::keyed(1001);
  const double rho = 0.8;
  std::vector<double> ar(400000);
  double x = rng.normal();
  for (double& v : ar) {
    v = x;
    x = rho * x + std::sqrt(1.0 - rho * rho) * rng.normal();
  }
  TauInt tau = integrated_autocorrelation_time(ar);
  note(out, std::abs(tau.tau - 4.5) < 0.15 * 4.5,
       "tau=" + fmt(tau.tau) + " expected 4.5 +- 15%");

  const int n = 40000;
  std::vector<double> iid(n);
  for (double& v : iid) v = rng.normal();
  Jackknife jk = jackknife_mean_error(iid, 1);
  double expected = 1.0 / std::sqrt(static_cast<double>(n));
  note(out, std::abs(jk.error - expected) < 0.20 * expected,
       "jackknife error=" + fmt(jk.error) + " expected=" + fmt(expected));
  if (out.pass)
    out.detail = "tau=" + fmt(tau.tau) + ", jackknife error=" + fmt(jk.error);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  bool all_pass = true;
  for (int crit : wanted) {
    Outcome out;
    switch (crit) {
      case 1: out = criterion1(); break;
      case 2: out = criterion2(); break;
      case 3: out = criterion3(); break;
      case 4: out = criterion4(); break;
      case 5: out = criterion5(); break;
      case 6: out = criterion6(); break;
      case 7: out = criterion7(); break;
      case 8: out = criterion8(); break;
      case 9: out = criterion9(); break;
      case 10: out = criterion10(); break;
      default:
        out.pass = false;
        out.detail = "unknown criterion";
    }
    std::printf("criterion %d: %s (%s)\n", crit, out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) all_pass = false;
  }
  return all_pass ? 0 : 1;
}
