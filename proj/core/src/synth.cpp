#include "airdigit/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "airdigit/error.hpp"

namespace airdigit {

namespace detail {
extern const std::string_view kBuiltinTemplatesJson;
}

namespace {

using Eigen::Vector2d;

Vector2d to_vec(const Point2& p) { return {p.x, p.y}; }

// One pen stroke: a centripetal Catmull-Rom spline with an arc-length table.
class Stroke {
 public:
  explicit Stroke(std::vector<Vector2d> pts) : pts_(std::move(pts)) {
    const std::size_t n = pts_.size();
    padded_.reserve(n + 2);
    padded_.push_back(2.0 * pts_[0] - pts_[1]);
    padded_.insert(padded_.end(), pts_.begin(), pts_.end());
    padded_.push_back(2.0 * pts_[n - 1] - pts_[n - 2]);

    const std::size_t spans = n - 1;
    params_.reserve(spans * kSubsteps + 1);
    lengths_.reserve(spans * kSubsteps + 1);
    params_.push_back(0.0);
    lengths_.push_back(0.0);
    Vector2d prev = eval(0.0);
    for (std::size_t i = 1; i <= spans * kSubsteps; ++i) {
      const double u = static_cast<double>(i) / kSubsteps;
      const Vector2d p = eval(u);
      params_.push_back(u);
      lengths_.push_back(lengths_.back() + (p - prev).norm());
      prev = p;
    }
    build_effort();
  }

  double length() const { return lengths_.back(); }

  // Curvature-weighted arc length: the pen slows down in tight turns, so
  // traversing effort uniformly keeps the normal acceleration bounded.
  double effort() const { return effort_.back(); }

  Vector2d at_effort(double e) const {
    e = std::clamp(e, 0.0, effort());
    auto it = std::lower_bound(effort_.begin(), effort_.end(), e);
    if (it == effort_.begin()) return eval(0.0);
    const auto hi = static_cast<std::size_t>(it - effort_.begin());
    const std::size_t lo = hi - 1;
    const double span = effort_[hi] - effort_[lo];
    const double f = span > 0.0 ? (e - effort_[lo]) / span : 0.0;
    return at_length(lengths_[lo] + f * (lengths_[hi] - lengths_[lo]));
  }

  // Point at arc length s, measured from the stroke start.
  Vector2d at_length(double s) const {
    s = std::clamp(s, 0.0, length());
    auto it = std::lower_bound(lengths_.begin(), lengths_.end(), s);
    if (it == lengths_.begin()) return eval(0.0);
    const auto hi = static_cast<std::size_t>(it - lengths_.begin());
    const std::size_t lo = hi - 1;
    const double span = lengths_[hi] - lengths_[lo];
    const double f = span > 0.0 ? (s - lengths_[lo]) / span : 0.0;
    return eval(params_[lo] + f * (params_[hi] - params_[lo]));
  }

 private:
  static constexpr int kSubsteps = 256;
  static constexpr double kTurnLength = 0.6;     // unit-box lengths
  static constexpr double kDilateLength = 0.06;  // half-width of the running max
  static constexpr double kSmoothLength = 0.06;  // half-width of the box filter
  static constexpr int kSmoothPasses = 3;

  void build_effort() {
    const std::size_t m = lengths_.size();
    std::vector<double> weight(m, 1.0);
    if (m >= 3) {
      std::vector<Vector2d> p(m);
      for (std::size_t i = 0; i < m; ++i) p[i] = eval(params_[i]);
      for (std::size_t i = 1; i + 1 < m; ++i) {
        const Vector2d a = p[i] - p[i - 1];
        const Vector2d b = p[i + 1] - p[i];
        const double ds = 0.5 * (a.norm() + b.norm());
        if (ds <= 0.0) continue;
        const double turn = std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
        weight[i] = std::sqrt(1.0 + kTurnLength * std::abs(turn) / ds);
      }
      weight[0] = weight[1];
      weight[m - 1] = weight[m - 2];
    }
    // Widen every peak with a running maximum, then box-filter along arc
    // length; repeated passes approach a Gaussian and keep the speed profile
    // smooth across spline knots without diluting sharp turns.
    {
      std::vector<double> out(m);
      std::deque<std::size_t> window;  // indices with decreasing weight
      std::size_t next = 0;
      for (std::size_t i = 0; i < m; ++i) {
        for (; next < m && lengths_[next] - lengths_[i] <= kDilateLength; ++next) {
          while (!window.empty() && weight[window.back()] <= weight[next]) window.pop_back();
          window.push_back(next);
        }
        while (lengths_[i] - lengths_[window.front()] > kDilateLength) window.pop_front();
        out[i] = weight[window.front()];
      }
      weight = std::move(out);
    }
    for (int pass = 0; pass < kSmoothPasses; ++pass) {
      std::vector<double> prefix(m + 1, 0.0);
      for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + weight[i];
      std::vector<double> out(m);
      std::size_t lo = 0;
      std::size_t hi = 0;
      for (std::size_t i = 0; i < m; ++i) {
        while (lengths_[i] - lengths_[lo] > kSmoothLength) ++lo;
        while (hi + 1 < m && lengths_[hi + 1] - lengths_[i] <= kSmoothLength) ++hi;
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi + 1 - lo);
      }
      weight = std::move(out);
    }
    effort_.assign(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
      effort_[i] = effort_[i - 1] + 0.5 * (weight[i] + weight[i - 1]) * (lengths_[i] - lengths_[i - 1]);
    }
  }

  // u in [0, n-1]; integer part selects the span.
  Vector2d eval(double u) const {
    const std::size_t spans = pts_.size() - 1;
    auto seg = static_cast<std::size_t>(std::floor(u));
    if (seg >= spans) seg = spans - 1;
    const double f = u - static_cast<double>(seg);

    const Vector2d& p0 = padded_[seg];
    const Vector2d& p1 = padded_[seg + 1];
    const Vector2d& p2 = padded_[seg + 2];
    const Vector2d& p3 = padded_[seg + 3];
    const double t0 = 0.0;
    const double t1 = t0 + std::sqrt((p1 - p0).norm());
    const double t2 = t1 + std::sqrt((p2 - p1).norm());
    const double t3 = t2 + std::sqrt((p3 - p2).norm());
    const double t = t1 + f * (t2 - t1);

    const Vector2d a1 = (t1 - t) / (t1 - t0) * p0 + (t - t0) / (t1 - t0) * p1;
    const Vector2d a2 = (t2 - t) / (t2 - t1) * p1 + (t - t1) / (t2 - t1) * p2;
    const Vector2d a3 = (t3 - t) / (t3 - t2) * p2 + (t - t2) / (t3 - t2) * p3;
    const Vector2d b1 = (t2 - t) / (t2 - t0) * a1 + (t - t0) / (t2 - t0) * a2;
    const Vector2d b2 = (t3 - t) / (t3 - t1) * a2 + (t - t1) / (t3 - t1) * a3;
    return (t2 - t) / (t2 - t1) * b1 + (t - t1) / (t2 - t1) * b2;
  }

  std::vector<Vector2d> pts_;
  std::vector<Vector2d> padded_;
  std::vector<double> params_;
  std::vector<double> lengths_;
  std::vector<double> effort_;
};

double min_jerk_fraction(double tau) {
  const double t3 = tau * tau * tau;
  return t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

Point2 parse_point(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(ErrorCode::InvalidTemplate, "control point must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

double Range::at(int level, int levels) const {
  if (levels <= 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(level) / static_cast<double>(levels - 1);
}

void validate(const DigitTemplate& t) {
  if (t.digit < 0 || t.digit > 9) {
    throw Error(ErrorCode::UnknownDigit, "digit " + std::to_string(t.digit));
  }
  const std::size_t n = t.control_points.size();
  const std::string who = "template for digit " + std::to_string(t.digit);
  if (n < 4 || n > 64) throw Error(ErrorCode::InvalidTemplate, who + ": needs 4..64 control points");
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = t.control_points[i];
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw Error(ErrorCode::InvalidTemplate, who + ": point outside the unit box");
    }
    if (i > 0 && (to_vec(p) - to_vec(t.control_points[i - 1])).norm() < 1e-9) {
      throw Error(ErrorCode::InvalidTemplate, who + ": repeated consecutive point");
    }
  }
  if (!(t.canonical_duration_s >= kMinDurationS && t.canonical_duration_s <= kMaxDurationS)) {
    throw Error(ErrorCode::InvalidTemplate, who + ": canonical duration outside [2, 4] s");
  }
  std::size_t prev = 0;
  for (std::size_t c : t.corners) {
    if (c <= prev || c + 1 >= n) {
      throw Error(ErrorCode::InvalidTemplate, who + ": corners must be increasing interior indices");
    }
    prev = c;
  }
}

void validate(const AugmentationParams& p) {
  auto in_range = [](double v) { return v >= 0.25 && v <= 4.0; };
  if (!in_range(p.speed_scale) || !in_range(p.size_scale)) {
    throw Error(ErrorCode::InvalidParams, "speed and size scales must lie in [0.25, 4]");
  }
  if (!std::isfinite(p.wrist_angle_deg) || !std::isfinite(p.rotation_deg)) {
    throw Error(ErrorCode::InvalidParams, "angles must be finite");
  }
}

std::vector<DigitTemplate> parse_templates(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidTemplate, e.what());
  }
  const nlohmann::json& list = doc.is_object() ? doc.at("templates") : doc;
  if (!list.is_array()) throw Error(ErrorCode::InvalidTemplate, "expected an array of templates");

  std::vector<DigitTemplate> out;
  try {
    for (const auto& item : list) {
      DigitTemplate t;
      t.digit = item.at("digit").get<int>();
      t.canonical_duration_s = item.at("canonical_duration_s").get<double>();
      for (const auto& p : item.at("control_points")) t.control_points.push_back(parse_point(p));
      if (item.contains("corners")) t.corners = item["corners"].get<std::vector<std::size_t>>();
      validate(t);
      out.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidTemplate, e.what());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.digit < b.digit; });
  return out;
}

std::vector<DigitTemplate> load_templates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_templates(ss.str());
}

const std::vector<DigitTemplate>& builtin_templates() {
  static const std::vector<DigitTemplate> templates = [] {
    auto t = parse_templates(detail::kBuiltinTemplatesJson);
    if (t.size() != 10) throw Error(ErrorCode::InvalidTemplate, "built-in set must cover 0-9");
    for (int d = 0; d < 10; ++d) {
      if (t[static_cast<std::size_t>(d)].digit != d) {
        throw Error(ErrorCode::InvalidTemplate, "built-in set must cover 0-9 once each");
      }
    }
    return t;
  }();
  return templates;
}

DigitTemplate digit_template(int digit) {
  if (digit < 0 || digit > 9) throw Error(ErrorCode::UnknownDigit, "digit " + std::to_string(digit));
  return builtin_templates()[static_cast<std::size_t>(digit)];
}

std::vector<Point2> rotate_in_plane(const std::vector<Point2>& points, double degrees) {
  const double a = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    const double dx = p.x - 0.5;
    const double dy = p.y - 0.5;
    out.push_back({0.5 + c * dx - s * dy, 0.5 + s * dx + c * dy});
  }
  return out;
}

CartesianTrajectory synthesize_trajectory(const DigitTemplate& tmpl, const AugmentationParams& params,
                                          double plane_scale_m, std::uint64_t seed, double jitter_m) {
  validate(tmpl);
  validate(params);
  if (!(plane_scale_m > 0.05 && plane_scale_m <= 0.5)) {
    throw Error(ErrorCode::InvalidParams, "plane scale must lie in (0.05, 0.5] m");
  }

  CartesianTrajectory traj;
  traj.rate_hz = kSynthesisRateHz;
  double duration = tmpl.canonical_duration_s / params.speed_scale;
  if (duration < kMinDurationS || duration > kMaxDurationS) {
    traj.duration_clamped = true;
    duration = std::clamp(duration, kMinDurationS, kMaxDurationS);
  }
  const auto n = static_cast<std::size_t>(std::lround(duration * traj.rate_hz));
  traj.duration_s = static_cast<double>(n) / traj.rate_hz;

  // Split into strokes at the pen pauses.
  std::vector<Stroke> strokes;
  {
    std::vector<std::size_t> cuts = tmpl.corners;
    cuts.push_back(tmpl.control_points.size() - 1);
    std::size_t begin = 0;
    for (std::size_t end : cuts) {
      std::vector<Vector2d> pts;
      for (std::size_t i = begin; i <= end; ++i) pts.push_back(to_vec(tmpl.control_points[i]));
      strokes.emplace_back(std::move(pts));
      begin = end;
    }
  }

  // Stroke durations grow with the square root of their length, which keeps
  // the peak acceleration of short strokes bounded.
  std::vector<double> weights;
  double weight_sum = 0.0;
  for (const Stroke& s : strokes) {
    weights.push_back(std::sqrt(s.effort()));
    weight_sum += weights.back();
  }
  const double motion_time = static_cast<double>(n - 1) / traj.rate_hz;
  std::vector<double> stroke_end;
  double acc = 0.0;
  for (double w : weights) {
    acc += w / weight_sum * motion_time;
    stroke_end.push_back(acc);
  }
  stroke_end.back() = motion_time;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<std::array<double, 3>, 3> jitter_weight{};
  std::array<std::array<double, 3>, 3> jitter_phase{};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    double total = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      jitter_weight[axis][k] = unit(rng);
      jitter_phase[axis][k] = 2.0 * std::numbers::pi * unit(rng);
      total += jitter_weight[axis][k];
    }
    for (double& w : jitter_weight[axis]) w /= total;
  }

  const double rot = params.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(rot);
  const double s = std::sin(rot);
  const double scale = params.size_scale * plane_scale_m;

  traj.points.reserve(n);
  std::size_t stroke = 0;
  double stroke_start = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / traj.rate_hz;
    while (stroke + 1 < strokes.size() && t > stroke_end[stroke]) {
      stroke_start = stroke_end[stroke];
      ++stroke;
    }
    const double span = stroke_end[stroke] - stroke_start;
    const double tau = std::clamp((t - stroke_start) / span, 0.0, 1.0);
    const Stroke& st = strokes[stroke];
    const Vector2d p = st.at_effort(min_jerk_fraction(tau) * st.effort()) - Vector2d(0.5, 0.5);

    const double u = scale * (c * p.x() - s * p.y());
    const double v = scale * (s * p.x() + c * p.y());
    Eigen::Vector3d point(u, 0.0, v);

    if (jitter_m > 0.0) {
      const double g = t / motion_time;
      const double window = std::sin(std::numbers::pi * g);
      for (std::size_t axis = 0; axis < 3; ++axis) {
        double w = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
          w += jitter_weight[axis][k] *
               std::sin(2.0 * std::numbers::pi * static_cast<double>(k + 1) * g + jitter_phase[axis][k]);
        }
        point[static_cast<Eigen::Index>(axis)] += jitter_m * window * w;
      }
    }
    traj.points.push_back(point);
  }
  return traj;
}

std::vector<AugmentationParams> augmentation_grid(int levels_per_param,
                                                  const AugmentationRanges& ranges) {
  if (levels_per_param < 1 || levels_per_param > 5) {
    throw Error(ErrorCode::InvalidParams, "levels per parameter must lie in [1, 5]");
  }
  const int l = levels_per_param;
  std::vector<AugmentationParams> grid;
  grid.reserve(static_cast<std::size_t>(l * l * l * l));
  for (int a = 0; a < l; ++a) {
    for (int b = 0; b < l; ++b) {
      for (int c = 0; c < l; ++c) {
        for (int d = 0; d < l; ++d) {
          grid.push_back({.speed_scale = ranges.speed.at(a, l),
                          .size_scale = ranges.size.at(c, l),
                          .wrist_angle_deg = ranges.wrist_angle_deg.at(b, l),
                          .rotation_deg = ranges.rotation_deg.at(d, l)});
        }
      }
    }
  }
  return grid;
}

double min_jerk_peak_acceleration(double length_m, double duration_s) {
  return 10.0 / std::sqrt(3.0) * length_m / (duration_s * duration_s);
}

double path_length(const CartesianTrajectory& traj) {
  double len = 0.0;
  for (std::size_t i = 1; i < traj.points.size(); ++i) len += (traj.points[i] - traj.points[i - 1]).norm();
  return len;
}

}  // namespace airdigit
