#include "lgt/oracle.hpp"

#include <cmath>
#include <cstdint>

#include "lgt/errors.hpp"

namespace lgt {

namespace {

Mat zero_mat(int n) { return Mat::Zero(n, n); }

Mat pauli(int k) {
  Mat s(2, 2);
  switch (k) {
    case 1:
      s << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
      break;
    case 2:
      s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
      break;
    default:
      s << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
      break;
  }
  return s;
}

}  // namespace

SmoothConnection zero_connection(Group g, int ndims) {
  SmoothConnection c;
  c.group = g;
  c.ndims = ndims;
  const int n = matrix_order(g);
  c.component = [n](int, const std::array<double, 4>&) { return zero_mat(n); };
  c.partial = [n](int, int, const std::array<double, 4>&) { return zero_mat(n); };
  return c;
}

SmoothConnection abelian_linear_connection(int ndims, double f) {
  SmoothConnection c;
  c.group = Group::U1;
  c.ndims = ndims;
  c.component = [f](int j, const std::array<double, 4>& x) {
    Mat m = zero_mat(1);
    if (j == 1) m(0, 0) = Complex(0, f * x[0]);
    return m;
  };
  c.partial = [f](int j, int k, const std::array<double, 4>&) {
    Mat m = zero_mat(1);
    if (j == 0 && k == 1) m(0, 0) = Complex(0, f);
    return m;
  };
  return c;
}

SmoothConnection abelian_trig_connection(int ndims, double amp) {
  SmoothConnection c;
  c.group = Group::U1;
  c.ndims = ndims;
  c.component = [amp, ndims](int j, const std::array<double, 4>& x) {
    Mat m = zero_mat(1);
    m(0, 0) = Complex(0, amp * std::sin(x[(j + 1) % ndims]));
    return m;
  };
  c.partial = [amp, ndims](int j, int k, const std::array<double, 4>& x) {
    Mat m = zero_mat(1);
    if (j == (k + 1) % ndims) m(0, 0) = Complex(0, amp * std::cos(x[j]));
    return m;
  };
  return c;
}

SmoothConnection su2_trig_connection(int ndims, double amp) {
  SmoothConnection c;
  c.group = Group::SU2;
  c.ndims = ndims;
  c.component = [amp, ndims](int j, const std::array<double, 4>& x) {
    Mat m = Complex(0, 0.5 * amp) *
            (std::sin(x[(j + 1) % ndims]) * pauli(1) +
             std::cos(x[(j + 2) % ndims]) * pauli(2));
    return Mat(m);
  };
  c.partial = [amp, ndims](int j, int k, const std::array<double, 4>& x) {
    Mat m = zero_mat(2);
    if (j == (k + 1) % ndims)
      m += Complex(0, 0.5 * amp) * std::cos(x[j]) * pauli(1);
    if (j == (k + 2) % ndims)
      m -= Complex(0, 0.5 * amp) * std::sin(x[j]) * pauli(2);
    return m;
  };
  return c;
}

SmoothConnection with_abelian_gradient(const SmoothConnection& conn, double c) {
  if (matrix_order(conn.group) != 1)
    throw usage_error("with_abelian_gradient: abelian connections only");
  SmoothConnection out = conn;
  auto base_a = conn.component;
  auto base_d = conn.partial;
  // phi(x) = c x_0 x_1: d_0 phi = c x_1, d_1 phi = c x_0.
  out.component = [base_a, c](int j, const std::array<double, 4>& x) {
    Mat m = base_a(j, x);
    if (j == 0) m(0, 0) += Complex(0, c * x[1]);
    if (j == 1) m(0, 0) += Complex(0, c * x[0]);
    return m;
  };
  out.partial = [base_d, c](int j, int k, const std::array<double, 4>& x) {
    Mat m = base_d(j, k, x);
    if ((j == 0 && k == 1) || (j == 1 && k == 0)) m(0, 0) += Complex(0, c);
    return m;
  };
  return out;
}

Mat curvature(const SmoothConnection& conn, int j, int k,
              const std::array<double, 4>& x) {
  if (j < 0 || k < 0 || j >= conn.ndims || k >= conn.ndims)
    throw usage_error("curvature: axis out of range");
  Mat aj = conn.component(j, x);
  Mat ak = conn.component(k, x);
  Mat f = conn.partial(j, k, x) - conn.partial(k, j, x);
  f += mat_mul(aj, ak) - mat_mul(ak, aj);
  return f;
}

BchCheck bch_action_check(const SmoothConnection& conn, double epsilon,
                          const std::vector<double>& box) {
  const int n = conn.ndims;
  if (static_cast<int>(box.size()) != n)
    throw usage_error("bch_action_check: box dimension mismatch");
  if (!(epsilon > 0)) throw usage_error("bch_action_check: epsilon must be > 0");
  std::vector<int> cells(n);
  for (int j = 0; j < n; ++j) {
    double ratio = box[j] / epsilon;
    cells[j] = static_cast<int>(std::llround(ratio));
    if (cells[j] < 1 || std::abs(cells[j] - ratio) > 1e-9 * std::max(1.0, ratio))
      throw usage_error("bch_action_check: epsilon must divide the box extents");
  }

  // Discrete side: open grid with cells[j]+1 sites per axis, one link per
  // lattice edge carrying exp(eps A_j(x)).
  std::vector<int> extents(n);
  for (int j = 0; j < n; ++j) extents[j] = cells[j] + 1;
  auto lattice = std::make_shared<Lattice>(n, extents, Boundary::Open);
  Configuration cfg = cold_start(lattice, conn.group);
  for (std::int64_t ord = 0; ord < lattice->n_links(); ++ord) {
    const LinkIndex& l = lattice->links()[ord];
    std::array<double, 4> x{{0, 0, 0, 0}};
    for (int j = 0; j < n; ++j) x[j] = l.site.c[j] * epsilon;
    Mat a = epsilon * conn.component(l.mu, x);
    cfg.set_link(ord, exp_map(conn.group, a));
  }
  BchCheck out;
  out.lattice_sum = wilson_action(cfg);

  // Continuum side: S_YM = -int sum_{j != k} Tr(F_jk^2) by midpoint rule on
  // the same grid, scaled by eps^(4-n)/4.
  std::int64_t n_cells = 1;
  for (int j = 0; j < n; ++j) n_cells *= cells[j];
  double s_ym = 0.0;
  const double cell_vol = std::pow(epsilon, n);
  for (std::int64_t ci = 0; ci < n_cells; ++ci) {
    std::int64_t rem = ci;
    std::array<double, 4> x{{0, 0, 0, 0}};
    for (int j = n - 1; j >= 0; --j) {
      x[j] = (static_cast<double>(rem % cells[j]) + 0.5) * epsilon;
      rem /= cells[j];
    }
    double tr2 = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Mat f = curvature(conn, j, k, x);
        tr2 += 2.0 * re_trace(mat_mul(f, f));  // ordered pairs count twice
      }
    s_ym -= cell_vol * tr2;
  }
  out.continuum_integral = 0.25 * std::pow(epsilon, 4 - n) * s_ym;
  if (out.continuum_integral == 0.0 && out.lattice_sum == 0.0)
    out.ratio = 1.0;
  else
    out.ratio = out.lattice_sum / out.continuum_integral;
  return out;
}

double exact_tiny_lattice(const Lattice& lattice, double beta,
                          const std::function<double(const Configuration&)>& observable) {
  const std::int64_t nl = lattice.n_links();
  if (nl > 24) throw usage_error("exact_tiny_lattice: more than 24 links");
  auto lat = std::make_shared<Lattice>(lattice);
  Configuration cfg = cold_start(lat, Group::Z2);
  Mat plus = group_identity(Group::Z2);
  Mat minus = -plus;
  // Gray-code walk over all sign assignments: one link flip per state, with
  // the action updated locally.
  double action = 0.0;
  double z = std::exp(-beta * action) ;
  double acc = z * observable(cfg);
  const std::uint64_t n_states = std::uint64_t(1) << nl;
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < n_states; ++i) {
    std::uint64_t next = i ^ (i >> 1);
    int bit = 0;
    std::uint64_t diff = gray ^ next;
    while (!((diff >> bit) & 1)) ++bit;
    gray = next;
    bool now_minus = (gray >> bit) & 1;
    const Mat& nv = now_minus ? minus : plus;
    action += local_action_delta(cfg, lattice.links()[bit], nv);
    cfg.set_link(bit, nv);
    double w = std::exp(-beta * action);
    z += w;
    acc += w * observable(cfg);
  }
  return acc / z;
}

namespace {

// Adaptive Simpson quadrature to ~1e-12 absolute.
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, 1e-13, 40);
}

}  // namespace

double single_plaquette_expectation(Group g, double beta) {
  const double pi = 3.14159265358979323846;
  switch (g) {
    case Group::Z2:
      return std::tanh(beta);
    case Group::U1: {
      // Boltzmann weight shifted by its maximum to stay finite at large beta.
      auto den = [beta](double t) { return std::exp(beta * (std::cos(t) - 1.0)); };
      auto num = [beta, den](double t) { return std::cos(t) * den(t); };
      return integrate(num, 0.0, pi) / integrate(den, 0.0, pi);
    }
    case Group::SU2: {
      // Class angle t with Haar weight sin^2 t; Re Tr U / 2 = cos t.
      auto den = [beta](double t) {
        double s = std::sin(t);
        return s * s * std::exp(2.0 * beta * (std::cos(t) - 1.0));
      };
      auto num = [beta, den](double t) { return std::cos(t) * den(t); };
      return integrate(num, 0.0, pi) / integrate(den, 0.0, pi);
    }
    default:
      throw usage_error("single_plaquette_expectation: SU(3) not supported");
  }
}

double two_dim_exact_loop(Group g, double beta, int R, int T) {
  if (R < 1 || T < 1) throw usage_error("two_dim_exact_loop: R, T must be >= 1");
  return std::pow(single_plaquette_expectation(g, beta),
                  static_cast<double>(R) * T);
}

double strong_coupling_leading(Group g, double beta, int R, int T) {
  return two_dim_exact_loop(g, beta, R, T);
}

}  // namespace lgt
