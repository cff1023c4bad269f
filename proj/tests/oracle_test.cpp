#include <doctest.h>

#include <cmath>
#include <memory>

#include "lgt/errors.hpp"
#include "lgt/observables.hpp"
#include "lgt/oracle.hpp"

using namespace lgt;

namespace {

constexpr std::array<double, 4> kOrigin{0.0, 0.0, 0.0, 0.0};

// Modified Bessel ratio via the standard library, as an independent check of
// the quadrature.
double bessel_ratio(double nu_num, double nu_den, double x) {
  return std::cyl_bessel_i(nu_num, x) / std::cyl_bessel_i(nu_den, x);
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("sign-model enumeration: closed form, limits, size guard") {
  auto plaq = [](const Configuration& c) { return plaquette_average(c); };
  Lattice open22(2, {2, 2}, Boundary::Open);
  for (double beta : {0.0, 0.3, 1.0, 2.5}) {
    CHECK(exact_tiny_lattice(open22, beta, plaq) ==
          doctest::Approx(std::tanh(beta)).epsilon(1e-12));
  }
  // Large beta saturates, beta = 0 vanishes.
  CHECK(exact_tiny_lattice(open22, 20.0, plaq) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(exact_tiny_lattice(open22, 0.0, plaq)) < 1e-14);

  // On the periodic 2x2 torus the single-plaquette formula no longer holds;
  // the enumeration still normalizes correctly.
  Lattice torus(2, {2, 2}, Boundary::Periodic);
  double unit = exact_tiny_lattice(torus, 0.7, [](const Configuration&) {
    return 1.0;
  });
  CHECK(unit == doctest::Approx(1.0).epsilon(1e-13));

  // More than 24 links is refused rather than attempted.
  Lattice big(3, {3, 3, 3}, Boundary::Periodic);
  CHECK_THROWS_AS(exact_tiny_lattice(big, 1.0, plaq), usage_error);
}

TEST_CASE("single-plaquette quadrature: Bessel-function closed forms") {
  for (double beta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    CHECK(single_plaquette_expectation(Group::Z2, beta) ==
          doctest::Approx(std::tanh(beta)).epsilon(1e-14));
    CHECK(single_plaquette_expectation(Group::U1, beta) ==
          doctest::Approx(bessel_ratio(1, 0, beta)).epsilon(1e-10));
    CHECK(single_plaquette_expectation(Group::SU2, beta) ==
          doctest::Approx(bessel_ratio(2, 1, 2.0 * beta)).epsilon(1e-10));
  }
  CHECK(single_plaquette_expectation(Group::U1, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(single_plaquette_expectation(Group::SU3, 1.0), usage_error);
}

TEST_CASE("single-plaquette quadrature agrees with brute-force Riemann sums") {
  const double beta = 1.3;
  const int n = 1000000;
  // U(1): direct average of cos(theta) under exp(beta(cos(theta)-1)).
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    double th = M_PI * (i + 0.5) / n;
    double w = std::exp(beta * (std::cos(th) - 1.0));
    num += std::cos(th) * w;
    den += w;
  }
  CHECK(single_plaquette_expectation(Group::U1, beta) ==
        doctest::Approx(num / den).epsilon(1e-8));

  // SU(2): class-angle density sin^2(theta) exp(2 beta (cos(theta)-1)).
  num = den = 0.0;
  for (int i = 0; i < n; ++i) {
    double th = M_PI * (i + 0.5) / n;
    double w = std::sin(th) * std::sin(th) * std::exp(2.0 * beta * (std::cos(th) - 1.0));
    num += std::cos(th) * w;
    den += w;
  }
  CHECK(single_plaquette_expectation(Group::SU2, beta) ==
        doctest::Approx(num / den).epsilon(1e-8));
}

TEST_CASE("two-dimensional loop identity and strong-coupling leading term") {
  for (Group g : {Group::Z2, Group::U1, Group::SU2}) {
    double w1 = single_plaquette_expectation(g, 0.8);
    CHECK(two_dim_exact_loop(g, 0.8, 2, 3) ==
          doctest::Approx(std::pow(w1, 6)).epsilon(1e-12));
    CHECK(strong_coupling_leading(g, 0.8, 3, 3) ==
          doctest::Approx(std::pow(w1, 9)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(two_dim_exact_loop(Group::U1, 1.0, 0, 2), usage_error);
}

TEST_CASE("curvature: antisymmetry, abelian case, derivative consistency") {
  std::array<double, 4> x{0.3, -0.7, 0.2, 0.0};

  SmoothConnection triv = zero_connection(Group::SU2, 3);
  CHECK(curvature(triv, 0, 1, x).norm() == doctest::Approx(0.0));

  SmoothConnection ab = abelian_trig_connection(2, 0.6);
  Mat f01 = curvature(ab, 0, 1, x);
  Mat f10 = curvature(ab, 1, 0, x);
  CHECK((f01 + f10).norm() < 1e-14);
  // Abelian: commutator vanishes, F = dA only.
  Mat da = ab.partial(0, 1, x) - ab.partial(1, 0, x);
  CHECK((f01 - da).norm() < 1e-14);

  // Non-abelian: closed-form partials match central finite differences.
  SmoothConnection su2 = su2_trig_connection(3, 0.4);
  const double h = 1e-5;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      auto xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      Mat fd = (su2.component(k, xp) - su2.component(k, xm)) / (2.0 * h);
      CHECK((su2.partial(j, k, x) - fd).norm() < 1e-9);
    }
  // The commutator term is present: F differs from dA.
  Mat full = curvature(su2, 0, 1, x);
  Mat linear = su2.partial(0, 1, x) - su2.partial(1, 0, x);
  CHECK((full - linear).norm() > 1e-4);

  // Curvature values live in the algebra.
  CHECK(is_algebra_element(Group::SU2, full, 1e-12));
  CHECK(is_algebra_element(Group::U1, f01, 1e-12));
}

TEST_CASE("discretized action check: trivial and constant-curvature cases") {
  SmoothConnection triv = zero_connection(Group::SU2, 2);
  BchCheck z = bch_action_check(triv, 0.1, {1.0, 1.0});
  CHECK(z.lattice_sum == doctest::Approx(0.0));
  CHECK(z.continuum_integral == doctest::Approx(0.0));
  CHECK(z.ratio == doctest::Approx(1.0));

  // Constant curvature i f: each plaquette holds exactly 1 - cos(eps^2 f),
  // and the continuum side is (#cells) eps^2 f^2 / 2.
  const double f = 0.7, eps = 0.05;
  SmoothConnection lin = abelian_linear_connection(2, f);
  BchCheck b = bch_action_check(lin, eps, {1.0, 1.0});
  auto cells = static_cast<std::int64_t>(std::llround(1.0 / eps));
  double per_plaq = 1.0 - std::cos(eps * eps * f);
  CHECK(b.lattice_sum ==
        doctest::Approx(cells * cells * per_plaq).epsilon(1e-10));
  CHECK(b.continuum_integral ==
        doctest::Approx(cells * cells * 0.5 * std::pow(eps * eps * f, 2))
            .epsilon(1e-10));
  CHECK(b.ratio == doctest::Approx(1.0 - std::pow(eps * eps * f, 2) / 12.0)
                       .epsilon(1e-8));

  // Incommensurate grid spacing is refused.
  CHECK_THROWS_AS(bch_action_check(lin, 0.3, {1.0, 1.0}), usage_error);
}

TEST_CASE("discretized action converges to the curvature integral") {
  for (const SmoothConnection& conn :
       {abelian_trig_connection(2, 0.5), su2_trig_connection(3, 0.5)}) {
    std::vector<double> box(conn.ndims, 1.0);
    double prev_gap = 0.0;
    for (int level = 0; level < 3; ++level) {
      double eps = 0.1 / (1 << level);
      BchCheck b = bch_action_check(conn, eps, box);
      CHECK(b.continuum_integral > 0.0);
      double gap = std::abs(b.ratio - 1.0);
      if (level > 0) CHECK(gap < 0.6 * prev_gap);
      prev_gap = gap;
    }
  }
}

TEST_CASE("abelian gauge shift leaves the discretized action unchanged") {
  SmoothConnection base = abelian_trig_connection(2, 0.5);
  SmoothConnection shifted = with_abelian_gradient(base, 0.8);
  std::array<double, 4> x{0.4, 0.9, 0.0, 0.0};
  CHECK((curvature(base, 0, 1, x) - curvature(shifted, 0, 1, x)).norm() < 1e-13);
  BchCheck a = bch_action_check(base, 0.05, {1.0, 1.0});
  BchCheck b = bch_action_check(shifted, 0.05, {1.0, 1.0});
  CHECK(b.lattice_sum == doctest::Approx(a.lattice_sum).epsilon(1e-10));
  CHECK(b.continuum_integral == doctest::Approx(a.continuum_integral).epsilon(1e-12));
}

}  // TEST_SUITE
