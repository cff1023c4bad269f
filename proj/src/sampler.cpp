#include "lgt/sampler.hpp"

#include <atomic>
#include <optional>
#include <cmath>
#include <thread>

#include "lgt/errors.hpp"

namespace lgt {

namespace {

constexpr std::uint64_t kTagMetropolis = 0x6D65;
constexpr std::uint64_t kTagHeatbath = 0x6862;
constexpr std::uint64_t kTagSu3 = 0x7333;
constexpr int kRejectionCap = 1000000;

struct Quat {
  double a0, a1, a2, a3;
};

// SU(2) as a0 I + i (a . sigma).
inline Quat to_quat(const Mat& m) {
  return Quat{0.5 * (m(0, 0).real() + m(1, 1).real()),
              0.5 * (m(0, 1).imag() + m(1, 0).imag()),
              0.5 * (m(0, 1).real() - m(1, 0).real()),
              0.5 * (m(0, 0).imag() - m(1, 1).imag())};
}

inline Mat from_quat(const Quat& q) {
  Mat m(2, 2);
  m(0, 0) = Complex(q.a0, q.a3);
  m(1, 1) = Complex(q.a0, -q.a3);
  m(0, 1) = Complex(q.a2, q.a1);
  m(1, 0) = Complex(-q.a2, q.a1);
  return m;
}

double von_mises_sample(RandomStream& rng, double kappa) {
  if (kappa < 1e-12) return (rng.uniform() - 0.5) * 2.0 * M_PI;
  // Best-Fisher wrapped-Cauchy rejection.
  double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  double r = (1.0 + rho * rho) / (2.0 * rho);
  for (int it = 0; it < kRejectionCap; ++it) {
    double u1 = rng.uniform();
    double u2 = rng.uniform();
    double z = std::cos(M_PI * u1);
    double f = (1.0 + r * z) / (r + z);
    double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 ||
        std::log(c / u2) + 1.0 - c >= 0.0) {
      double theta = std::acos(std::max(-1.0, std::min(1.0, f)));
      return rng.uniform() < 0.5 ? -theta : theta;
    }
  }
  throw numerical_error("von Mises rejection sampler did not terminate");
}

// a0 on [-1,1] with density ~ sqrt(1-a0^2) exp(2 w a0), w = beta*k (Creutz).
double su2_a0_sample(RandomStream& rng, double w) {
  double emin = std::exp(-4.0 * w);
  for (int it = 0; it < kRejectionCap; ++it) {
    double x = emin + (1.0 - emin) * rng.uniform();
    double a0 = 1.0 + std::log(x) / (2.0 * w);
    double u = rng.uniform();
    if (u * u <= 1.0 - a0 * a0) return a0;
  }
  throw numerical_error("SU(2) heat-bath rejection sampler did not terminate");
}

Quat su2_tilted_haar(RandomStream& rng, double w) {
  // Sample X in SU(2) with density ~ exp(w Tr X) dHaar; Tr X = 2 a0.
  double a0 = su2_a0_sample(rng, w);
  double s = std::sqrt(std::max(0.0, 1.0 - a0 * a0));
  double ct = 2.0 * rng.uniform() - 1.0;
  double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  double phi = 2.0 * M_PI * rng.uniform();
  return Quat{a0, s * st * std::cos(phi), s * st * std::sin(phi), s * ct};
}

// K restricted to the quaternion span is k V with V in SU(2), k >= 0.
double su2_project(const Mat& k_mat, Mat& v_out) {
  Quat q = to_quat(k_mat);
  double k = std::sqrt(q.a0 * q.a0 + q.a1 * q.a1 + q.a2 * q.a2 + q.a3 * q.a3);
  if (k > 0) v_out = from_quat(Quat{q.a0 / k, q.a1 / k, q.a2 / k, q.a3 / k});
  return k;
}

inline RandomStream link_stream(const SamplerParams& params, std::uint64_t tag,
                                std::uint64_t sweep_index, std::int64_t ord) {
  return RandomStream::keyed(params.seed, tag, sweep_index,
                             static_cast<std::uint64_t>(ord));
}

/// Run fn(ord) over one checkerboard class, optionally split across workers.
/// Links within a class touch disjoint plaquette neighborhoods (for even
/// extents), so the partition does not affect results.
template <typename Fn>
void run_class(const std::vector<std::int64_t>& cls, int workers, Fn&& fn) {
  if (workers <= 1 || cls.size() < 64) {
    for (std::int64_t ord : cls) fn(ord);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (cls.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(cls.size(), lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(cls[i]);
    });
  }
  for (auto& t : pool) t.join();
}

int effective_workers(const Configuration& cfg, int workers) {
  // Parallel class updates require the no-shared-plaquette guarantee, which
  // holds only for even extents under periodic boundary.
  if (workers > 1 && cfg.lattice().boundary() == Boundary::Periodic &&
      !cfg.lattice().even_extents())
    return 1;
  return workers;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Metropolis:
      return "metropolis";
    case Algorithm::Heatbath:
      return "heatbath";
    case Algorithm::OverrelaxMix:
      return "overrelax_mix";
  }
  return "?";
}

Algorithm algorithm_from_name(std::string_view name) {
  if (name == "metropolis") return Algorithm::Metropolis;
  if (name == "heatbath") return Algorithm::Heatbath;
  if (name == "overrelax_mix") return Algorithm::OverrelaxMix;
  throw usage_error("unknown algorithm: " + std::string(name));
}

StapleTable::StapleTable(const Lattice& lat) {
  offsets.reserve(lat.n_links() + 1);
  offsets.push_back(0);
  for (const LinkIndex& l : lat.links()) {
    for (const auto& path : lat.staples(l)) {
      Entry e{};
      for (int i = 0; i < 3; ++i) {
        e.ord[i] = static_cast<std::int32_t>(lat.link_ordinal(path[i].link));
        e.rev[i] = path[i].reversed;
      }
      entries.push_back(e);
    }
    offsets.push_back(static_cast<std::int32_t>(entries.size()));
  }
}

Mat StapleTable::sum(const Configuration& cfg, std::int64_t ord) const {
  const int n = matrix_order(cfg.group());
  Mat total = Mat::Zero(n, n);
  for (std::int32_t i = offsets[ord]; i < offsets[ord + 1]; ++i) {
    const Entry& e = entries[i];
    const Mat& u0 = cfg.link(e.ord[0]);
    const Mat& u1 = cfg.link(e.ord[1]);
    const Mat& u2 = cfg.link(e.ord[2]);
    Mat v = e.rev[0] ? Mat(u0.adjoint()) : u0;
    v = e.rev[1] ? mat_mul_adj(v, u1) : mat_mul(v, u1);
    v = e.rev[2] ? mat_mul_adj(v, u2) : mat_mul(v, u2);
    total += v;
  }
  return total;
}

Mat heatbath_link(const Mat& staple_sum, Group g, double beta,
                  RandomStream& rng) {
  if (!staple_sum.allFinite())
    throw numerical_error("heatbath_link: non-finite staple sum");
  switch (g) {
    case Group::Z2: {
      double s = staple_sum.rows() ? staple_sum(0, 0).real() : 0.0;
      double p_plus = 1.0 / (1.0 + std::exp(-2.0 * beta * s));
      Mat m(1, 1);
      m(0, 0) = rng.uniform() < p_plus ? Complex(1, 0) : Complex(-1, 0);
      return m;
    }
    case Group::U1: {
      Complex k = staple_sum(0, 0);
      double mag = std::abs(k);
      double theta = von_mises_sample(rng, beta * mag);
      if (mag > 0) theta -= std::arg(k);
      Mat m(1, 1);
      m(0, 0) = Complex(std::cos(theta), std::sin(theta));
      return m;
    }
    case Group::SU2: {
      Mat v(2, 2);
      double k = su2_project(staple_sum, v);
      double w = beta * k;
      if (w < 1e-12) return haar_sample(rng, Group::SU2);
      // U = X V^dagger with X Haar tilted by exp(w Tr X).
      Mat x = from_quat(su2_tilted_haar(rng, w));
      return mat_mul_adj(x, v);
    }
    case Group::SU3:
      throw usage_error("heatbath_link: SU(3) uses su3_subgroup_sweep");
  }
  throw usage_error("heatbath_link: bad group");
}

double metropolis_sweep(Configuration& cfg, const SamplerParams& params,
                        std::uint64_t sweep_index, const StapleTable* table) {
  std::optional<StapleTable> local_table;
  if (!table) {
    local_table.emplace(cfg.lattice());
    table = &*local_table;
  }
  const StapleTable& st = *table;
  const Group g = cfg.group();
  const double beta = params.beta;
  const double spread = params.proposal_spread;
  if (!(spread > 0)) throw usage_error("metropolis_sweep: spread must be > 0");
  const int workers = effective_workers(cfg, params.workers);
  std::atomic<std::int64_t> accepted{0};
  for (const auto& cls : cfg.lattice().checkerboard_classes()) {
    run_class(cls, workers, [&](std::int64_t ord) {
      RandomStream rng = link_stream(params, kTagMetropolis, sweep_index, ord);
      Mat r = random_near_identity(rng, g, spread);
      const Mat& u_old = cfg.link(ord);
      Mat u_new = mat_mul(r, u_old);
      Mat k = st.sum(cfg, ord);
      double delta = -re_trace(mat_mul(Mat(u_new - u_old), k));
      if (delta <= 0.0 || rng.uniform() < std::exp(-beta * delta)) {
        cfg.set_link(ord, u_new);
        accepted.fetch_add(1, std::memory_order_relaxed);
      }
    });
  }
  return static_cast<double>(accepted.load()) /
         static_cast<double>(cfg.lattice().n_links());
}

void heatbath_sweep(Configuration& cfg, const SamplerParams& params,
                    std::uint64_t sweep_index, const StapleTable* table) {
  if (cfg.group() == Group::SU3) {
    su3_subgroup_sweep(cfg, params, sweep_index, table);
    return;
  }
  std::optional<StapleTable> local_table;
  if (!table) {
    local_table.emplace(cfg.lattice());
    table = &*local_table;
  }
  const StapleTable& st = *table;
  const Group g = cfg.group();
  const int workers = effective_workers(cfg, params.workers);
  for (const auto& cls : cfg.lattice().checkerboard_classes()) {
    run_class(cls, workers, [&](std::int64_t ord) {
      RandomStream rng = link_stream(params, kTagHeatbath, sweep_index, ord);
      cfg.set_link(ord, heatbath_link(st.sum(cfg, ord), g, params.beta, rng));
    });
  }
}

void su3_subgroup_sweep(Configuration& cfg, const SamplerParams& params,
                        std::uint64_t sweep_index, const StapleTable* table) {
  if (cfg.group() != Group::SU3)
    throw usage_error("su3_subgroup_sweep: configuration is not SU(3)");
  std::optional<StapleTable> local_table;
  if (!table) {
    local_table.emplace(cfg.lattice());
    table = &*local_table;
  }
  const StapleTable& st = *table;
  static const int kPairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  const int workers = effective_workers(cfg, params.workers);
  for (const auto& cls : cfg.lattice().checkerboard_classes()) {
    run_class(cls, workers, [&](std::int64_t ord) {
      RandomStream rng = link_stream(params, kTagSu3, sweep_index, ord);
      Mat k = st.sum(cfg, ord);
      Mat u = cfg.link(ord);
      Mat m = mat_mul(u, k);
      for (const auto& pq : kPairs) {
        const int p = pq[0], q = pq[1];
        Mat block(2, 2);
        block(0, 0) = m(p, p);
        block(0, 1) = m(p, q);
        block(1, 0) = m(q, p);
        block(1, 1) = m(q, q);
        Mat v(2, 2);
        double kk = su2_project(block, v);
        double w = params.beta * kk;
        Mat x = w < 1e-12 ? haar_sample(rng, Group::SU2)
                          : from_quat(su2_tilted_haar(rng, w));
        Mat r2 = mat_mul_adj(x, v);
        // Left-multiply by the embedded subgroup element; update rows p, q
        // of U and M in place.
        for (int col = 0; col < 3; ++col) {
          Complex up = u(p, col), uq = u(q, col);
          u(p, col) = r2(0, 0) * up + r2(0, 1) * uq;
          u(q, col) = r2(1, 0) * up + r2(1, 1) * uq;
          Complex mp = m(p, col), mq = m(q, col);
          m(p, col) = r2(0, 0) * mp + r2(0, 1) * mq;
          m(q, col) = r2(1, 0) * mp + r2(1, 1) * mq;
        }
      }
      cfg.set_link(ord, u);
    });
  }
}

void overrelax_sweep(Configuration& cfg, std::uint64_t sweep_index,
                     int workers, const StapleTable* table) {
  (void)sweep_index;  // the reflection is deterministic
  const Group g = cfg.group();
  if (g != Group::U1 && g != Group::SU2)
    throw usage_error("overrelax_sweep: supported for U(1) and SU(2) only");
  std::optional<StapleTable> local_table;
  if (!table) {
    local_table.emplace(cfg.lattice());
    table = &*local_table;
  }
  const StapleTable& st = *table;
  workers = effective_workers(cfg, workers);
  for (const auto& cls : cfg.lattice().checkerboard_classes()) {
    run_class(cls, workers, [&](std::int64_t ord) {
      Mat k = st.sum(cfg, ord);
      if (g == Group::U1) {
        Complex s = k(0, 0);
        double mag = std::abs(s);
        if (mag < 1e-300) return;
        Complex v = std::conj(s) / mag;
        Mat u(1, 1);
        u(0, 0) = v * v * std::conj(cfg.link(ord)(0, 0));
        cfg.set_link(ord, u);
      } else {
        Mat w(2, 2);
        double kk = su2_project(k, w);
        if (kk < 1e-300) return;
        // U -> W^dag U^dag W^dag keeps Re Tr(U K) fixed.
        Mat t = mat_mul(Mat(w.adjoint()), Mat(cfg.link(ord).adjoint()));
        cfg.set_link(ord, mat_mul_adj(t, w));
      }
    });
  }
}

ChainStats run_chain(Configuration& cfg, const SamplerParams& params,
                     std::int64_t n_sweeps, std::int64_t cadence,
                     const MeasureHook& hook, std::uint64_t first_sweep,
                     int reunit_interval) {
  if (n_sweeps < 0) throw usage_error("run_chain: n_sweeps must be >= 0");
  StapleTable table(cfg.lattice());
  ChainStats stats;
  double acc_total = 0.0;
  std::int64_t acc_count = 0;
  for (std::int64_t i = 0; i < n_sweeps; ++i) {
    std::uint64_t sweep = first_sweep + static_cast<std::uint64_t>(i);
    switch (params.algorithm) {
      case Algorithm::Metropolis:
        acc_total += metropolis_sweep(cfg, params, sweep, &table);
        ++acc_count;
        break;
      case Algorithm::Heatbath:
        heatbath_sweep(cfg, params, sweep, &table);
        break;
      case Algorithm::OverrelaxMix:
        heatbath_sweep(cfg, params, sweep, &table);
        for (int r = 0; r < params.or_ratio; ++r)
          overrelax_sweep(cfg, sweep, params.workers, &table);
        break;
    }
    ++stats.sweeps;
    if (reunit_interval > 0 && (sweep + 1) % reunit_interval == 0)
      reunitarize_all(cfg);
    if (cadence > 0 && (sweep + 1) % cadence == 0 && hook) hook(cfg, sweep + 1);
  }
  if (acc_count > 0) stats.mean_acceptance = acc_total / acc_count;
  return stats;
}

}  // namespace lgt
