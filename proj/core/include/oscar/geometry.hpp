#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace oscar {

using Vec3 = std::array<double, 3>;

/// Camera placement on a sphere around the object. Right-handed, z-up,
/// azimuth measured from +x toward +y.
struct CameraPose {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double radius = 1.0;
  Vec3 look_at{0.0, 0.0, 0.0};

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

/// Default onboarding viewpoint scheme: two rings at -15 and +15 degrees.
inline constexpr int kDefaultViewCount = 8;
inline constexpr std::array<double, 2> kDefaultElevationsDeg = {-15.0, 15.0};
inline constexpr double kDefaultRadius = 2.5;
inline constexpr std::array<std::uint8_t, 3> kGrayBackground = {128, 128, 128};

/// Places `view_count` cameras in equal-size rings, one per elevation. Poses
/// are ring-major, azimuth-ascending, each ring starting at azimuth 0 with
/// spacing 360 * rings / view_count degrees.
std::vector<CameraPose> generate_viewpoints(int view_count,
                                            std::span<const double> elevations_deg,
                                            double radius,
                                            const Vec3& look_at = {0.0, 0.0, 0.0});

/// Spherical to Cartesian. Multiples of 90 degrees map onto the axes exactly.
Vec3 pose_to_camera_position(const CameraPose& pose);

/// sin/cos of an angle in degrees with exact results at multiples of 90.
std::pair<double, double> sin_cos_deg(double degrees);

/// Work order for an external renderer.
struct RenderJob {
  std::string model_id;
  std::optional<std::string> mesh_path;
  std::vector<int> view_ids;
  std::vector<CameraPose> poses;
  std::array<int, 2> image_size{512, 512};
  std::array<std::uint8_t, 3> background_rgb = kGrayBackground;
};

}  // namespace oscar
