#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lgt/action.hpp"

namespace lgt {

/// Smooth Lie-algebra-valued connection on R^n with closed-form components
/// and closed-form partial derivatives, used as ground truth for the
/// continuum-limit check. `component(j, x)` is A_j(x); `partial(j, k, x)` is
/// the partial derivative of A_k with respect to x_j.
struct SmoothConnection {
  Group group = Group::U1;
  int ndims = 2;
  std::function<Mat(int j, const std::array<double, 4>& x)> component;
  std::function<Mat(int j, int k, const std::array<double, 4>& x)> partial;
};

/// Catalog of built-in connections.
SmoothConnection zero_connection(Group g, int ndims);
/// U(1), A_1(x) = i f x_0, all other components zero: constant curvature
/// F_01 = i f.
SmoothConnection abelian_linear_connection(int ndims, double f);
/// U(1), A_j(x) = i amp sin(x_{(j+1) mod n}).
SmoothConnection abelian_trig_connection(int ndims, double amp);
/// SU(2), A_j(x) = i amp (sin(x_{(j+1) mod n}) s1 + cos(x_{(j+2) mod n}) s2)/2
/// with s1, s2 the first two Pauli matrices; genuinely non-commuting.
SmoothConnection su2_trig_connection(int ndims, double amp);
/// Gauge shift of an abelian connection: A_j -> A_j + i d(phi)/dx_j with
/// phi(x) = c x_0 x_1. Leaves the curvature unchanged; because phi is
/// multilinear the induced link phases match an exact lattice gauge
/// transformation, so the discrete action is unchanged too.
SmoothConnection with_abelian_gradient(const SmoothConnection& conn, double c);

/// F_jk(x) = d_j A_k - d_k A_j + [A_j, A_k]; skew in (j, k).
Mat curvature(const SmoothConnection& conn, int j, int k,
              const std::array<double, 4>& x);

struct BchCheck {
  double lattice_sum = 0.0;        // sum_p Re Tr(I - U_p) on the eps-grid
  double continuum_integral = 0.0; // (eps^(4-n)/4) * S_YM by midpoint rule
  double ratio = 1.0;
};

/// Discretize the connection on an eps-grid over `box` (edge lengths per
/// axis) with links exp(eps A_j(x)), and compare the resulting plaquette
/// action with the Yang-Mills integral -int sum_{j,k} Tr(F_jk^2), scaled by
/// eps^(4-n)/4. The two agree to first order in eps.
BchCheck bch_action_check(const SmoothConnection& conn, double epsilon,
                          const std::vector<double>& box);

/// Exact expectation of an arbitrary observable under the sign-link (Z2)
/// Gibbs measure by full enumeration of all 2^#links states.
double exact_tiny_lattice(const Lattice& lattice, double beta,
                          const std::function<double(const Configuration&)>& observable);

/// w1(beta) = <(1/N) Re Tr U> for one plaquette with free links: Z2 closed
/// form tanh(beta); U(1) and SU(2) by adaptive class-angle quadrature.
double single_plaquette_expectation(Group g, double beta);

/// Open-boundary 2D identity <(1/N) W(R,T)> = w1(beta)^(R T).
double two_dim_exact_loop(Group g, double beta, int R, int T);

/// Leading strong-coupling (small beta) prediction w1(beta)^(R T) in any
/// dimension; relative error O(beta^2).
double strong_coupling_leading(Group g, double beta, int R, int T);

}  // namespace lgt
