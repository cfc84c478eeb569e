#include "oscar/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oscar/error.hpp"

namespace oscar {

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  }
  return out;
}

Mat3 transpose(const Mat3& a) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out[i][j] = a[j][i];
  }
  return out;
}

namespace {

double determinant(const Mat3& r) {
  return r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
         r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
         r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
}

void require_rotation(const Mat3& r, const char* name) {
  if (!is_rotation(r)) {
    fail(ErrorCode::kInvalidArgument, std::string(name) + " is not a rotation matrix");
  }
}

// R1 R2^T without forming R2^T.
Mat3 relative(const Mat3& r1, const Mat3& r2) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r1[i][k] * r2[j][k];
      m[i][j] = s;
    }
  }
  return m;
}

}  // namespace

bool is_rotation(const Mat3& r, double tolerance) {
  for (const auto& row : r) {
    for (double x : row) {
      if (!std::isfinite(x)) return false;
    }
  }
  const Mat3 rtr = multiply(transpose(r), r);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (std::abs(rtr[i][j] - (i == j ? 1.0 : 0.0)) > tolerance) return false;
    }
  }
  return std::abs(determinant(r) - 1.0) <= tolerance;
}

double translation_error(const Vec3& t1, const Vec3& t2) {
  return std::hypot(t1[0] - t2[0], t1[1] - t2[1], t1[2] - t2[2]);
}

double rotation_error(const Mat3& r1, const Mat3& r2) {
  require_rotation(r1, "R1");
  require_rotation(r2, "R2");
  const Mat3 m = relative(r1, r2);
  // 2 sin(theta) = |vee(M - M^T)|, 2 cos(theta) = trace(M) - 1.
  const double sx = m[2][1] - m[1][2];
  const double sy = m[0][2] - m[2][0];
  const double sz = m[1][0] - m[0][1];
  const double two_sin = std::sqrt(sx * sx + sy * sy + sz * sz);
  const double two_cos = m[0][0] + m[1][1] + m[2][2] - 1.0;
  return std::atan2(two_sin, two_cos) * 180.0 / std::numbers::pi;
}

double rotation_error_spectral_sq(const Mat3& r1, const Mat3& r2) {
  const Mat3 m = relative(r1, r2);
  const Mat3 mtm = multiply(transpose(m), m);
  // Largest eigenvalue of the symmetric PSD matrix M^T M by power iteration.
  Vec3 v{1.0, 0.7, 0.3};
  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    Vec3 w{};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) w[i] += mtm[i][j] * v[j];
    }
    const double norm = std::hypot(w[0], w[1], w[2]);
    if (norm == 0.0) return 0.0;
    for (int i = 0; i < 3; ++i) v[i] = w[i] / norm;
    lambda = norm;
  }
  return lambda;
}

Mat3 axis_angle_rotation(const Vec3& axis, double degrees) {
  const double len = std::hypot(axis[0], axis[1], axis[2]);
  if (len == 0.0) fail(ErrorCode::kInvalidArgument, "rotation axis has zero length");
  const double x = axis[0] / len, y = axis[1] / len, z = axis[2] / len;
  const auto [s, c] = sin_cos_deg(degrees);
  const double t = 1.0 - c;
  return Mat3{{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
               {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
               {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
}

}  // namespace oscar
