#include "lgt/group.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "lgt/errors.hpp"

namespace lgt {

const char* group_name(Group g) {
  switch (g) {
    case Group::Z2:
      return "z2";
    case Group::U1:
      return "u1";
    case Group::SU2:
      return "su2";
    case Group::SU3:
      return "su3";
  }
  return "?";
}

Group group_from_name(std::string_view name) {
  if (name == "z2" || name == "Z2") return Group::Z2;
  if (name == "u1" || name == "U1") return Group::U1;
  if (name == "su2" || name == "SU2") return Group::SU2;
  if (name == "su3" || name == "SU3") return Group::SU3;
  throw usage_error("unknown group: " + std::string(name) +
                    " (expected z2, u1, su2 or su3)");
}

Mat group_identity(Group g) {
  int n = matrix_order(g);
  return Mat::Identity(n, n);
}

Mat mat_mul(const Mat& a, const Mat& b) {
  const int n = static_cast<int>(a.rows());
  Mat r(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Complex s = a(i, 0) * b(0, j);
      for (int k = 1; k < n; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

Mat mat_mul_adj(const Mat& a, const Mat& b) {
  const int n = static_cast<int>(a.rows());
  Mat r(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Complex s = a(i, 0) * std::conj(b(j, 0));
      for (int k = 1; k < n; ++k) s += a(i, k) * std::conj(b(j, k));
      r(i, j) = s;
    }
  return r;
}

Mat dagger(const Mat& a) { return a.adjoint(); }

Complex mat_trace(const Mat& a) {
  Complex t = a(0, 0);
  for (int i = 1; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double re_trace(const Mat& a) { return mat_trace(a).real(); }

Mat multiply(Group g, const Mat& a, const Mat& b) {
  const int n = matrix_order(g);
  if (a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n)
    throw usage_error("multiply: operand size does not match group order");
  return mat_mul(a, b);
}

Mat inverse(const Mat& a) { return a.adjoint(); }

bool is_unitary(const Mat& a, double tol) {
  const int n = static_cast<int>(a.rows());
  Mat d = mat_mul_adj(a, a) - Mat::Identity(n, n);
  return d.norm() <= tol;
}

static Complex det_small(const Mat& a) {
  switch (a.rows()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    default:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
}

bool in_group(Group g, const Mat& a, double tol) {
  if (a.rows() != matrix_order(g) || a.cols() != a.rows()) return false;
  if (!is_unitary(a, tol)) return false;
  switch (g) {
    case Group::Z2: {
      Complex v = a(0, 0);
      return std::abs(v.imag()) == 0.0 &&
             (v.real() == 1.0 || v.real() == -1.0);
    }
    case Group::U1:
      return std::abs(std::abs(a(0, 0)) - 1.0) <= tol;
    case Group::SU2:
    case Group::SU3:
      return std::abs(det_small(a) - Complex(1.0, 0.0)) <= tol;
  }
  return false;
}

bool is_algebra_element(Group g, const Mat& m, double tol) {
  if (m.rows() != matrix_order(g) || m.cols() != m.rows()) return false;
  Mat s = m + m.adjoint();
  if (s.norm() > tol) return false;
  if (g == Group::SU2 || g == Group::SU3)
    return std::abs(mat_trace(m)) <= tol;
  return true;
}

static Mat su_project_det(Group g, Mat u) {
  // Divide out the determinant phase: U -> U * exp(-i arg(det U)/N).
  const int n = matrix_order(g);
  Complex d = det_small(u);
  double phase = std::arg(d) / n;
  u *= Complex(std::cos(phase), -std::sin(phase));
  return u;
}

Mat haar_sample(RandomStream& rng, Group g) {
  switch (g) {
    case Group::Z2: {
      Mat m(1, 1);
      m(0, 0) = (rng.next_u64() & 1u) ? Complex(1, 0) : Complex(-1, 0);
      return m;
    }
    case Group::U1: {
      Mat m(1, 1);
      double t = (rng.uniform() - 0.5) * 2.0 * M_PI;
      m(0, 0) = Complex(std::cos(t), std::sin(t));
      return m;
    }
    case Group::SU2:
    case Group::SU3: {
      const int n = matrix_order(g);
      Mat z(n, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          z(i, j) = Complex(rng.normal(), rng.normal()) * M_SQRT1_2;
      Eigen::HouseholderQR<Mat> qr(z);
      Mat q = qr.householderQ() * Mat::Identity(n, n);
      Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
      // Fix the phase ambiguity of QR so the law on U(N) is exactly Haar.
      for (int j = 0; j < n; ++j) {
        Complex d = r(j, j);
        double ad = std::abs(d);
        Complex ph = ad > 0 ? d / ad : Complex(1, 0);
        for (int i = 0; i < n; ++i) q(i, j) *= ph;
      }
      return su_project_det(g, q);
    }
  }
  throw usage_error("haar_sample: bad group");
}

Mat random_algebra(RandomStream& rng, Group g) {
  switch (g) {
    case Group::Z2:
      return Mat::Zero(1, 1);
    case Group::U1: {
      Mat m(1, 1);
      m(0, 0) = Complex(0, rng.normal());
      return m;
    }
    case Group::SU2: {
      // i (x . sigma) / 2 with x iid standard normal.
      double x1 = rng.normal(), x2 = rng.normal(), x3 = rng.normal();
      Mat m(2, 2);
      m(0, 0) = Complex(0, 0.5 * x3);
      m(1, 1) = Complex(0, -0.5 * x3);
      m(0, 1) = Complex(0.5 * x2, 0.5 * x1);
      m(1, 0) = Complex(-0.5 * x2, 0.5 * x1);
      return m;
    }
    case Group::SU3: {
      // i H with H a traceless GUE-like Hermitian combination.
      double d1 = rng.normal(), d2 = rng.normal();
      // Traceless diagonal from two normals (Gell-Mann 3 and 8 directions).
      double h11 = 0.5 * d1 + d2 / (2.0 * std::sqrt(3.0));
      double h22 = -0.5 * d1 + d2 / (2.0 * std::sqrt(3.0));
      double h33 = -d2 / std::sqrt(3.0);
      Mat m = Mat::Zero(3, 3);
      m(0, 0) = Complex(0, h11);
      m(1, 1) = Complex(0, h22);
      m(2, 2) = Complex(0, h33);
      const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
      for (auto& pq : pairs) {
        double re = 0.5 * rng.normal();
        double im = 0.5 * rng.normal();
        Complex h(re, im);  // H_pq
        m(pq[0], pq[1]) = Complex(0, 1) * h;
        m(pq[1], pq[0]) = Complex(0, 1) * std::conj(h);
      }
      return m;
    }
  }
  throw usage_error("random_algebra: bad group");
}

Mat exp_map(Group g, const Mat& m) {
  const int n = matrix_order(g);
  if (m.rows() != n || m.cols() != n)
    throw usage_error("exp_map: size does not match group order");
  switch (g) {
    case Group::Z2:
      return group_identity(g);
    case Group::U1: {
      Mat r(1, 1);
      double t = m(0, 0).imag();
      r(0, 0) = Complex(std::cos(t), std::sin(t));
      return r;
    }
    case Group::SU2: {
      // m = i (a . sigma); exp(m) = cos|a| I + i sin|a| (a_hat . sigma).
      double a3 = m(0, 0).imag();
      double a1 = 0.5 * (m(0, 1).imag() + m(1, 0).imag());
      double a2 = 0.5 * (m(0, 1).real() - m(1, 0).real());
      double t = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
      double c = std::cos(t);
      double s = t > 1e-30 ? std::sin(t) / t : 1.0;
      Mat r(2, 2);
      r(0, 0) = Complex(c, s * a3);
      r(1, 1) = Complex(c, -s * a3);
      r(0, 1) = Complex(s * a2, s * a1);
      r(1, 0) = Complex(-s * a2, s * a1);
      return r;
    }
    case Group::SU3: {
      // m = iH, H Hermitian: exp(m) = V diag(e^{i lambda}) V^dagger.
      Eigen::Matrix3cd h;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) h(i, j) = m(i, j) / Complex(0, 1);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);
      Eigen::Vector3d lam = es.eigenvalues();
      Eigen::Matrix3cd v = es.eigenvectors();
      Eigen::Matrix3cd e = Eigen::Matrix3cd::Zero();
      for (int i = 0; i < 3; ++i)
        e(i, i) = Complex(std::cos(lam(i)), std::sin(lam(i)));
      Eigen::Matrix3cd r = v * e * v.adjoint();
      Mat out(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = r(i, j);
      return out;
    }
  }
  throw usage_error("exp_map: bad group");
}

Mat random_near_identity(RandomStream& rng, Group g, double spread) {
  if (!(spread > 0)) throw usage_error("random_near_identity: spread must be > 0");
  if (g == Group::Z2) {
    // Flip probability capped at 1/2: a sure flip would make the proposal
    // deterministic and non-ergodic (flipping every link preserves all
    // plaquettes), while 1/2 is the uniform two-point kernel.
    Mat m(1, 1);
    double p = 0.5 * (spread < 1.0 ? spread : 1.0);
    m(0, 0) = (rng.uniform() < p) ? Complex(-1, 0) : Complex(1, 0);
    return m;
  }
  Mat x = random_algebra(rng, g);
  return exp_map(g, Mat(spread * x));
}

Mat reunitarize(Group g, const Mat& a) {
  const int n = matrix_order(g);
  if (a.rows() != n || a.cols() != n)
    throw usage_error("reunitarize: size does not match group order");
  Mat u(n, n);
  if (n == 1) {
    double r = std::abs(a(0, 0));
    if (std::abs(r - 1.0) > 0.1)
      throw numerical_error("reunitarize: element drifted too far from the group");
    u(0, 0) = a(0, 0) / r;
    if (g == Group::Z2) u(0, 0) = u(0, 0).real() >= 0 ? Complex(1, 0) : Complex(-1, 0);
    return u;
  }
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u = svd.matrixU() * svd.matrixV().adjoint();
  if ((a - u).norm() > 0.1)
    throw numerical_error("reunitarize: element drifted too far from the group");
  return su_project_det(g, u);
}

}  // namespace lgt
