#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "lgt/rng.hpp"

namespace lgt {

using Complex = std::complex<double>;

/// Link matrices are at most 3x3; fixed-capacity dynamic storage keeps them
/// on the stack while letting one code path serve all groups.
using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                          Eigen::ColMajor, 3, 3>;

enum class Group : std::uint8_t { Z2 = 0, U1 = 1, SU2 = 2, SU3 = 3 };

constexpr int matrix_order(Group g) {
  return g == Group::SU3 ? 3 : (g == Group::SU2 ? 2 : 1);
}

const char* group_name(Group g);
Group group_from_name(std::string_view name);

Mat group_identity(Group g);

// Small-matrix kernels hand-rolled for n <= 3; these sit in every sweep's
// inner loop, so they bypass Eigen's general product path.
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_mul_adj(const Mat& a, const Mat& b);  // a * b^dagger
Mat dagger(const Mat& a);
Complex mat_trace(const Mat& a);
double re_trace(const Mat& a);

/// Checked product of two elements of the same group.
Mat multiply(Group g, const Mat& a, const Mat& b);

/// Inverse of a unitary matrix, i.e. the conjugate transpose.
Mat inverse(const Mat& a);

bool is_unitary(const Mat& a, double tol = 1e-12);
bool in_group(Group g, const Mat& a, double tol = 1e-12);
bool is_algebra_element(Group g, const Mat& m, double tol = 1e-12);

/// Haar-distributed group element. U(1): uniform phase; Z2: fair coin;
/// SU(N): complex Ginibre matrix -> QR -> diagonal-phase correction (makes
/// the law exactly Haar on U(N)) -> determinant phase divided out into SU(N).
Mat haar_sample(RandomStream& rng, Group g);

/// Standard Gaussian algebra element (iid normal coefficients in an
/// orthogonal basis of the Lie algebra). Zero matrix for Z2.
Mat random_algebra(RandomStream& rng, Group g);

/// Matrix exponential of a skew-Hermitian matrix. Closed form for orders
/// 1 and 2 (phase / Pauli axis-angle), Hermitian eigendecomposition for 3.
Mat exp_map(Group g, const Mat& m);

/// Metropolis proposal kernel: exp_map(spread * X) with X Gaussian in the
/// algebra; symmetric under inversion. Z2: sign flip with prob min(spread, 1).
Mat random_near_identity(RandomStream& rng, Group g, double spread);

/// Polar projection onto the nearest unitary, then determinant-phase
/// correction into SU(N) (or sign snap for Z2, modulus for U(1)).
/// Inputs further than Frobenius distance 0.1 from unitary raise
/// numerical_error: that always signals a bug upstream, not routine drift.
Mat reunitarize(Group g, const Mat& a);

}  // namespace lgt
