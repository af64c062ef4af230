#pragma once

// Human-like pen-tip trajectories for the digits 0-9 and the augmentation grid.

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace airdigit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

// Single-stroke digit drawn in the unit box, y up. Control points listed in
// `corners` are pen pauses: the spline is split there and the pen comes to
// rest before turning.
struct DigitTemplate {
  int digit = 0;
  std::vector<Point2> control_points;
  double canonical_duration_s = 3.0;
  std::vector<std::size_t> corners;
};

struct AugmentationParams {
  double speed_scale = 1.0;
  double size_scale = 1.0;
  double wrist_angle_deg = 0.0;  // about the forearm axis
  double rotation_deg = 0.0;     // in-plane rotation of the figure

  bool operator==(const AugmentationParams&) const = default;
};

struct Range {
  double lo;
  double hi;
  double at(int level, int levels) const;
};

struct AugmentationRanges {
  Range speed{0.75, 1.25};
  Range wrist_angle_deg{-15.0, 15.0};
  Range size{0.8, 1.2};
  Range rotation_deg{-10.0, 10.0};
};

inline constexpr double kSynthesisRateHz = 200.0;
inline constexpr double kMinDurationS = 2.0;
inline constexpr double kMaxDurationS = 4.0;

// Points are in the writing-plane frame: x to the writer's right, y along the
// depth axis (constant), z up. The origin is the center of the figure box.
struct CartesianTrajectory {
  std::vector<Eigen::Vector3d> points;
  double rate_hz = kSynthesisRateHz;
  double duration_s = 0.0;
  // Set when canonical_duration_s / speed_scale fell outside [2, 4] s and had
  // to be clamped.
  bool duration_clamped = false;
};

void validate(const DigitTemplate& t);
void validate(const AugmentationParams& p);

// Templates shipped with the library (core/data/digit_templates.json).
const std::vector<DigitTemplate>& builtin_templates();
DigitTemplate digit_template(int digit);

// Parses the template file format: a JSON array of
// {digit, control_points: [[x, y], ...], canonical_duration_s, corners?}.
std::vector<DigitTemplate> parse_templates(std::string_view json_text);
std::vector<DigitTemplate> load_templates(const std::filesystem::path& path);

// Rotates planar points about the box center (0.5, 0.5), counter-clockwise.
std::vector<Point2> rotate_in_plane(const std::vector<Point2>& points, double degrees);

// Catmull-Rom spline through the control points traversed with a minimum-jerk
// arc-length profile per pen stroke. `jitter_m` adds a smooth seeded wobble
// that vanishes at both ends; zero gives the clean template.
CartesianTrajectory synthesize_trajectory(const DigitTemplate& tmpl, const AugmentationParams& params,
                                          double plane_scale_m, std::uint64_t seed,
                                          double jitter_m = 0.0);

// Full Cartesian product over speed, wrist angle, size and rotation (in that
// lexicographic order), each with `levels_per_param` evenly spaced values.
std::vector<AugmentationParams> augmentation_grid(int levels_per_param,
                                                  const AugmentationRanges& ranges = {});

// Peak tangential acceleration of a minimum-jerk traversal of `length_m` in
// `duration_s`: 10 / sqrt(3) * L / T^2.
double min_jerk_peak_acceleration(double length_m, double duration_s);

double path_length(const CartesianTrajectory& traj);

}  // namespace airdigit
