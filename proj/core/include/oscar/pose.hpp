#pragma once

#include <array>

#include "oscar/geometry.hpp"

namespace oscar {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr double kRotationTolerance = 1e-6;

/// R^T R = I and det R = +1 within `tolerance`.
bool is_rotation(const Mat3& r, double tolerance = kRotationTolerance);

Mat3 multiply(const Mat3& a, const Mat3& b);
Mat3 transpose(const Mat3& a);

/// |t1 - t2|, same unit as the inputs (millimeters in pose benchmarks).
double translation_error(const Vec3& t1, const Vec3& t2);

/// Geodesic angle of R1 R2^T in degrees. Evaluated as
/// atan2(|skew part|, trace - 1), which equals
/// arccos(clamp((trace - 1) / 2)) on rotations and stays accurate near 0 and
/// 180 degrees. Errors: non-rotation input -> invalid-argument.
double rotation_error(const Mat3& r1, const Mat3& r2);

/// Squared spectral norm of R1 R2^T. Always 1 for valid rotations; kept as a
/// debug metric for comparison with tools that report this expression.
double rotation_error_spectral_sq(const Mat3& r1, const Mat3& r2);

/// Rotation by `degrees` about a unit axis (Rodrigues).
Mat3 axis_angle_rotation(const Vec3& axis, double degrees);

}  // namespace oscar
