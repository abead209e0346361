// Copyright 2026 The swimopt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Articulated swimmer body: midline chain, 400-point surface outline and
// rigid-body integration of surface forces.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "swimopt/errors.hpp"
#include "swimopt/vec2.hpp"

namespace swimopt::kin {

inline constexpr std::size_t kOutlinePoints = 400;

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

struct SwimmerState {
  Vec2 com_position;
  double heading = 0.0;
  Vec2 com_velocity;
  double angular_velocity = 0.0;
  std::vector<double> joint_angles;
  double time = 0.0;

  friend bool operator==(const SwimmerState&, const SwimmerState&) = default;
};

/// COM-centered body-frame boundary. Traversal starts at the head tip, runs
/// down the left (+normal) side to the tail and returns along the right side.
struct Outline {
  std::array<Vec2, kOutlinePoints> points{};
  friend bool operator==(const Outline&, const Outline&) = default;
};

/// Per-point world-frame forces, index-aligned with Outline::points.
struct SurfaceForces {
  std::array<Vec2, kOutlinePoints> forces{};
  friend bool operator==(const SurfaceForces&, const SurfaceForces&) = default;
};

using WidthProfile = std::function<double(double)>;

/// Half-ellipse profile w(s) = w_max * sqrt(max(0, 1 - (2s - 1)^2)).
inline WidthProfile half_ellipse(double w_max) {
  return [w_max](double s) {
    const double u = 2.0 * s - 1.0;
    return w_max * std::sqrt(std::max(0.0, 1.0 - u * u));
  };
}

class BodyGeometry {
 public:
  BodyGeometry() : BodyGeometry(20, half_ellipse(0.05), 1.0) {}

  BodyGeometry(std::size_t n_segments, WidthProfile width, double mass,
               std::size_t subdivisions = 4)
      : n_segments_(n_segments), width_(std::move(width)), mass_(mass), subdivisions_(subdivisions) {
    if (n_segments_ < 2) throw DomainError("BodyGeometry needs at least 2 segments");
    if (!(mass_ > 0.0)) throw DomainError("BodyGeometry mass must be > 0");
    if (subdivisions_ < 1) throw DomainError("BodyGeometry subdivisions must be >= 1");
    if (!(width_(0.0) >= 0.0) || !(width_(1.0) >= 0.0)) {
      throw DomainError("width profile must be non-negative at the ends");
    }
    for (int k = 1; k < 100; ++k) {
      if (!(width_(k / 100.0) > 0.0)) throw DomainError("width profile must be positive on (0,1)");
    }
    // straight-body inertia about the COM, uniform linear density
    const double seg_len = body_length() / static_cast<double>(n_segments_);
    const double seg_mass = mass_ / static_cast<double>(n_segments_);
    double inertia = 0.0;
    for (std::size_t k = 0; k < n_segments_; ++k) {
      const double d = (static_cast<double>(k) + 0.5) * seg_len - 0.5 * body_length();
      inertia += seg_mass * (d * d + seg_len * seg_len / 12.0);
    }
    inertia_ = inertia;
  }

  std::size_t n_segments() const { return n_segments_; }
  std::size_t n_joints() const { return n_segments_ - 1; }
  double body_length() const { return 1.0; }
  double segment_length() const { return body_length() / static_cast<double>(n_segments_); }
  double width(double s) const { return width_(s); }
  double mass() const { return mass_; }
  double moment_of_inertia() const { return inertia_; }
  std::size_t subdivisions() const { return subdivisions_; }

 private:
  std::size_t n_segments_;
  WidthProfile width_;
  double mass_;
  std::size_t subdivisions_;
  double inertia_ = 0.0;
};

/// Chain of equal segments; first segment leaves the origin along +x and each
/// joint rotates the next segment by its angle. Result is shifted so the
/// (uniform-density) midline COM sits at the origin.
inline std::vector<Vec2> build_midline(std::span<const double> joint_angles, const BodyGeometry& geometry) {
  if (joint_angles.size() != geometry.n_joints()) {
    throw DomainError("build_midline: expected " + std::to_string(geometry.n_joints()) + " joint angles");
  }
  const std::size_t n = geometry.n_segments();
  const double len = geometry.segment_length();
  std::vector<Vec2> pts(n + 1);
  double dir = 0.0;
  Vec2 com;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) dir += joint_angles[k - 1];
    pts[k + 1] = pts[k] + Vec2{std::cos(dir), std::sin(dir)} * len;
    com += (pts[k] + pts[k + 1]) * (0.5 / static_cast<double>(n));
  }
  for (auto& p : pts) p -= com;
  return pts;
}

namespace detail {

inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (std::max(a.x, b.x) < std::min(c.x, d.x) || std::max(c.x, d.x) < std::min(a.x, b.x) ||
      std::max(a.y, b.y) < std::min(c.y, d.y) || std::max(c.y, d.y) < std::min(a.y, b.y)) {
    return false;
  }
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0) || d1 == 0 || d2 == 0) && ((d3 > 0) != (d4 > 0) || d3 == 0 || d4 == 0);
}

inline bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // shares vertex 0
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

inline constexpr std::size_t kCapSamples = 12;

// Interior sample fractions within segment k. End segments use cosine
// spacing, s = (1 - cos phi) / 2, so the caps come out round.
inline std::vector<double> segment_fractions(std::size_t k, std::size_t n, std::size_t sub) {
  std::vector<double> f;
  const double nd = static_cast<double>(n);
  if (k == 0 || k + 1 == n) {
    const double phi_end = std::acos(1.0 - 2.0 / nd);
    for (std::size_t m = 1; m < kCapSamples; ++m) {
      const double phi = phi_end * static_cast<double>(m) / static_cast<double>(kCapSamples);
      const double head = nd * 0.5 * (1.0 - std::cos(phi));
      f.push_back(head);
    }
    if (k != 0) {
      std::reverse(f.begin(), f.end());
      for (double& x : f) x = 1.0 - x;
    }
    return f;
  }
  for (std::size_t m = 1; m < sub; ++m) f.push_back(static_cast<double>(m) / static_cast<double>(sub));
  return f;
}

// Closed boundary polygon traced around the midline (vertex 0 = head tip).
inline std::vector<Vec2> boundary_polygon(std::span<const Vec2> midline, const BodyGeometry& geometry) {
  const std::size_t n = midline.size() - 1;
  const std::size_t sub = geometry.subdivisions();
  std::vector<Vec2> dirs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 d = midline[k + 1] - midline[k];
    dirs[k] = d * (1.0 / norm(d));
  }
  struct Sample {
    Vec2 pos, normal;
    double s;
  };
  std::vector<Sample> samples;
  samples.reserve(n * sub + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    Vec2 nrm;
    if (k == 0) {
      nrm = perp(dirs[0]);
    } else if (k == n) {
      nrm = perp(dirs[n - 1]);
    } else {
      nrm = perp(dirs[k - 1]) + perp(dirs[k]);
      nrm = nrm * (1.0 / norm(nrm));
    }
    samples.push_back({midline[k], nrm, static_cast<double>(k) / static_cast<double>(n)});
    if (k == n) break;
    for (double f : segment_fractions(k, n, sub)) {
      samples.push_back({midline[k] + (midline[k + 1] - midline[k]) * f, perp(dirs[k]),
                         (static_cast<double>(k) + f) / static_cast<double>(n)});
    }
  }
  std::vector<Vec2> poly;
  poly.reserve(2 * samples.size() + 2);
  const double w_head = geometry.width(0.0);
  const double w_tail = geometry.width(1.0);
  poly.push_back(samples.front().pos);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double w = geometry.width(samples[i].s);
    if ((i == 0 && w_head == 0.0) || (i + 1 == samples.size() && w_tail == 0.0)) {
      if (i != 0) poly.push_back(samples[i].pos);
      continue;
    }
    poly.push_back(samples[i].pos + samples[i].normal * w);
  }
  for (std::size_t i = samples.size(); i-- > 0;) {
    const double w = geometry.width(samples[i].s);
    if ((i == 0 && w_head == 0.0) || (i + 1 == samples.size() && w_tail == 0.0)) continue;
    poly.push_back(samples[i].pos - samples[i].normal * w);
  }
  return poly;
}

// Cursor on a closed polygon: edge index (unbounded, taken modulo n) and point on it.
struct Cursor {
  std::size_t edge;
  Vec2 point;
  double arc;  // arc position from vertex 0, may exceed the perimeter
};

// Advance to the first point further along the polygon at Euclidean distance h.
inline Cursor chord_step(std::span<const Vec2> poly, std::span<const double> cum, const Cursor& c, double h) {
  const std::size_t n = poly.size();
  const double perimeter = cum[n];
  Vec2 a = c.point;
  for (std::size_t e = c.edge;; ++e) {
    const std::size_t i = e % n;
    const Vec2& b = poly[(i + 1) % n];
    if (norm(b - c.point) >= h) {
      // |a + tau (b - a) - c|^2 = h^2, larger root
      const Vec2 d = b - a;
      const Vec2 f = a - c.point;
      const double qa = dot(d, d), qb = 2.0 * dot(f, d), qc = dot(f, f) - h * h;
      const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
      const double tau = std::clamp((-qb + std::sqrt(disc)) / (2.0 * qa), 0.0, 1.0);
      const Vec2 p = a + d * tau;
      const double lap = static_cast<double>(e / n) * perimeter;
      return {e, p, lap + cum[i] + norm(p - poly[i])};
    }
    a = b;
  }
}

// 400 points at equal Euclidean spacing around the closed polygon, starting at vertex 0.
inline std::array<Vec2, kOutlinePoints> equal_chord_resample(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + norm(poly[(i + 1) % n] - poly[i]);
  const double perimeter = cum[n];
  constexpr std::size_t m = kOutlinePoints;

  auto closure = [&](double h) {
    Cursor c{0, poly[0], 0.0};
    for (std::size_t k = 0; k < m; ++k) c = chord_step(poly, cum, c, h);
    return c.arc - perimeter;
  };

  // closure(h) is increasing in h; safeguarded secant on a bracket
  double hi = perimeter / static_cast<double>(m);
  double g_hi = closure(hi);
  double lo = 0.998 * hi;
  double g_lo = closure(lo);
  while (g_lo > 0.0) {
    lo *= 0.5;
    g_lo = closure(lo);
  }
  double h = hi;
  double g = g_hi;
  int side = 0;
  for (int it = 0; it < 100 && std::abs(g) > 1e-12 * perimeter && hi - lo > 1e-16 * hi; ++it) {
    h = hi - g_hi * (hi - lo) / (g_hi - g_lo);
    if (!(h > lo && h < hi)) h = 0.5 * (lo + hi);
    g = closure(h);
    // Illinois: damp the endpoint that survives twice in a row
    if (g > 0.0) {
      hi = h;
      g_hi = g;
      if (side > 0) g_lo *= 0.5;
      side = 1;
    } else {
      lo = h;
      g_lo = g;
      if (side < 0) g_hi *= 0.5;
      side = -1;
    }
  }
  std::array<Vec2, m> out;
  Cursor c{0, poly[0], 0.0};
  out[0] = poly[0];
  for (std::size_t k = 1; k < m; ++k) {
    c = chord_step(poly, cum, c, h);
    out[k] = c.point;
  }
  return out;
}

}  // namespace detail

/// Area-weighted centroid of a closed polygon.
inline Vec2 polygon_centroid(std::span<const Vec2> poly) {
  double area2 = 0.0;
  Vec2 acc;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double c = cross(a, b);
    area2 += c;
    acc += (a + b) * c;
  }
  return acc * (1.0 / (3.0 * area2));
}

/// Offsets the midline by +-width along local normals, resamples the closed
/// boundary to 400 points with equal consecutive spacing and recenters it on
/// the polygon centroid. Throws GeometryError if the offset curve
/// self-intersects.
inline Outline build_outline(std::span<const Vec2> midline, const BodyGeometry& geometry) {
  if (midline.size() != geometry.n_segments() + 1) throw DomainError("build_outline: midline size mismatch");
  const auto poly = detail::boundary_polygon(midline, geometry);
  if (!detail::is_simple(poly)) throw GeometryError("outline self-intersects (joint angles beyond operating range)");
  Outline out;
  out.points = detail::equal_chord_resample(poly);
  const Vec2 c = polygon_centroid(out.points);
  for (auto& p : out.points) p -= c;
  return out;
}

inline Outline outline_from_angles(std::span<const double> joint_angles, const BodyGeometry& geometry) {
  return build_outline(build_midline(joint_angles, geometry), geometry);
}

/// Outline point i in world coordinates.
inline Vec2 to_world(const SwimmerState& state, const Vec2& body_point) {
  return state.com_position + rotate(body_point, state.heading);
}

struct Wrench {
  Vec2 force;
  double torque = 0.0;
};

/// Net force and torque about the COM; outline in body frame, forces in world frame.
inline Wrench net_wrench(const SurfaceForces& forces, const Outline& outline, double heading) {
  const double c = std::cos(heading), s = std::sin(heading);
  Wrench w;
  for (std::size_t i = 0; i < kOutlinePoints; ++i) {
    w.force += forces.forces[i];
    w.torque += cross(rotate(outline.points[i], c, s), forces.forces[i]);
  }
  return w;
}

/// Semi-implicit Euler on COM translation and heading. Joint angles and time
/// are left for the caller.
inline SwimmerState integrate_step(const SwimmerState& state, const SurfaceForces& forces, const Outline& outline,
                                   const BodyGeometry& geometry, double dt) {
  if (!(dt > 0.0)) throw DomainError("integrate_step: dt must be > 0");
  const Wrench w = net_wrench(forces, outline, state.heading);
  SwimmerState next = state;
  next.com_velocity = state.com_velocity + w.force * (dt / geometry.mass());
  next.angular_velocity = state.angular_velocity + w.torque * (dt / geometry.moment_of_inertia());
  next.com_position = state.com_position + next.com_velocity * dt;
  next.heading = wrap_angle(state.heading + next.angular_velocity * dt);
  return next;
}

}  // namespace swimopt::kin
