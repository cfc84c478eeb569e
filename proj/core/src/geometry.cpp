#include "oscar/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oscar/error.hpp"

namespace oscar {

std::pair<double, double> sin_cos_deg(double degrees) {
  double reduced = std::fmod(degrees, 360.0);
  if (reduced < 0.0) reduced += 360.0;
  if (reduced == 0.0) return {0.0, 1.0};
  if (reduced == 90.0) return {1.0, 0.0};
  if (reduced == 180.0) return {0.0, -1.0};
  if (reduced == 270.0) return {-1.0, 0.0};
  const double rad = reduced * std::numbers::pi / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

std::vector<CameraPose> generate_viewpoints(int view_count,
                                            std::span<const double> elevations_deg,
                                            double radius, const Vec3& look_at) {
  if (view_count <= 0) {
    fail(ErrorCode::kInvalidArgument, "view count must be positive");
  }
  if (elevations_deg.empty()) {
    fail(ErrorCode::kInvalidArgument, "at least one elevation ring is required");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  const auto rings = static_cast<int>(elevations_deg.size());
  if (view_count % rings != 0) {
    fail(ErrorCode::kInvalidArgument,
         "view count " + std::to_string(view_count) + " is not divisible by " +
             std::to_string(rings) + " elevation rings");
  }
  for (double e : elevations_deg) {
    if (!(e >= -90.0 && e <= 90.0)) {
      fail(ErrorCode::kInvalidArgument, "elevation outside [-90, 90]");
    }
  }

  const int per_ring = view_count / rings;
  const double step = 360.0 / per_ring;
  std::vector<CameraPose> poses;
  poses.reserve(view_count);
  for (double elevation : elevations_deg) {
    for (int i = 0; i < per_ring; ++i) {
      poses.push_back({step * i, elevation, radius, look_at});
    }
  }
  return poses;
}

Vec3 pose_to_camera_position(const CameraPose& pose) {
  const auto [sin_az, cos_az] = sin_cos_deg(pose.azimuth_deg);
  const auto [sin_el, cos_el] = sin_cos_deg(pose.elevation_deg);
  return {pose.look_at[0] + pose.radius * cos_el * cos_az,
          pose.look_at[1] + pose.radius * cos_el * sin_az,
          pose.look_at[2] + pose.radius * sin_el};
}

}  // namespace oscar
