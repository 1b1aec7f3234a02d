#pragma once

// Local maps near the saddle-foci, the transitions between them, and the
// first-return map to In(sigma1) they compose into.

#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "core.hpp"
#include "linalg.hpp"

namespace bykov {

/// Point on a top/bottom disk (Out(sigma1) or In(sigma2)).
struct DiskPoint {
  double r = 0.0;
  double phi = 0.0;
  bool upper = true;  // top disk (z = +1) or bottom disk (z = -1)
};

/// Point on a cylinder wall (In(sigma1) or Out(sigma2)).
struct WallPoint {
  double x = 0.0;
  double y = 0.0;
};

using OutPoint = std::variant<DiskPoint, WallPoint>;

enum class Node { Sigma1, Sigma2 };

inline double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

// ---------------------------------------------------------------- local maps

/// Exit point on Out(sigma1) of the trajectory entering V1 at wall point (x, y).
inline DiskPoint exit_sigma1(double x, double y, const ModelParams& p) {
  if (y == 0.0) throw Error(Errc::DegenerateInput, "y = 0: point on W^s_loc(sigma1), never exits");
  if (!(std::abs(y) <= 1.0)) throw Error(Errc::DegenerateInput, "|y| > 1 is off the wall");
  const double ay = std::abs(y);
  return DiskPoint{std::pow(ay, p.delta1()), reduce_angle(x - std::log(ay) / p.E1()), y > 0.0};
}

/// Exit point on Out(sigma2) of the trajectory entering V2 at disk point q.
inline WallPoint exit_sigma2(const DiskPoint& q, const ModelParams& p) {
  if (q.r == 0.0) throw Error(Errc::DegenerateInput, "r = 0: point on W^s_loc(sigma2), never exits");
  if (!(q.r > 0.0 && q.r <= 1.0)) throw Error(Errc::DegenerateInput, "disk radius outside (0, 1]");
  const double s = q.upper ? 1.0 : -1.0;
  return WallPoint{reduce_angle(q.phi - std::log(q.r) / p.E2()), s * std::pow(q.r, p.delta2())};
}

/// Dispatch on the node. Entry for sigma1 is a WallPoint, for sigma2 a DiskPoint.
inline OutPoint local_exit(Node node, const OutPoint& entry, const ModelParams& p) {
  if (node == Node::Sigma1) {
    const auto* w = std::get_if<WallPoint>(&entry);
    if (!w) throw Error(Errc::DegenerateInput, "sigma1 entry must be a wall point");
    return exit_sigma1(w->x, w->y, p);
  }
  const auto* d = std::get_if<DiskPoint>(&entry);
  if (!d) throw Error(Errc::DegenerateInput, "sigma2 entry must be a disk point");
  return exit_sigma2(*d, p);
}

// --------------------------------------------------------------- transitions

/// Out(sigma1) -> In(sigma2) along [sigma1 -> sigma2]: the identity.
inline DiskPoint transition_1to2(const DiskPoint& q) { return q; }

/// Out(sigma2) -> In(sigma1): (x, y) -> (x, y + lambda sin x).
inline WallPoint transition_2to1(const WallPoint& w, const ModelParams& p) {
  return WallPoint{w.x, w.y + p.lambda() * std::sin(w.x)};
}

/// First hit map In(sigma1) -> Out(sigma2): (x - K log|y| mod 2pi, sign(y)|y|^delta).
inline WallPoint first_hit_eta(const SectionPoint& q, const ModelParams& p) {
  if (q.y == 0.0) throw Error(Errc::DegenerateInput, "y = 0 lies on W^s_loc(sigma1)");
  const double ay = std::abs(q.y);
  return WallPoint{reduce_angle(q.x - p.K() * std::log(ay)), sign_of(q.y) * std::pow(ay, p.delta())};
}

// ---------------------------------------------------------------- return map

enum class Termination { Completed, HitStableManifold, Escaped };

/// Outcome of one application of the return map. For HitStableManifold the
/// coordinates give the landing point on y = 0; for Escaped, the image that
/// left the section.
struct ReturnOutcome {
  Termination status = Termination::Completed;
  double x = 0.0;
  double y = 0.0;

  SectionPoint point() const { return SectionPoint{x, y}; }
};

/// Unreduced image angle x - K log|y|.
inline double image_angle(const SectionPoint& q, const ModelParams& p) {
  return q.x - p.K() * std::log(std::abs(q.y));
}

/// One return, never throwing on escape. The lower half uses the mirrored
/// form (x - K log|y|, -|y|^delta + lambda sin(.)).
inline ReturnOutcome advance(const SectionPoint& q, const ModelParams& p) {
  if (q.y == 0.0) throw Error(Errc::DegenerateInput, "y = 0 lies on W^s_loc(sigma1)");
  const double ay = std::abs(q.y);
  const double angle = q.x - p.K() * std::log(ay);
  const double h = sign_of(q.y) * std::pow(ay, p.delta()) + p.lambda() * std::sin(angle);
  ReturnOutcome out{Termination::Completed, reduce_angle(angle), h};
  if (h == 0.0)
    out.status = Termination::HitStableManifold;
  else if (!(std::abs(h) < 1.0))
    out.status = Termination::Escaped;
  return out;
}

/// First-return map P_lambda. Throws Escaped when the image leaves the section.
inline ReturnOutcome return_map(const SectionPoint& q, const ModelParams& p) {
  ReturnOutcome out = advance(q, p);
  if (out.status == Termination::Escaped)
    throw Error(Errc::Escaped, "image height " + std::to_string(out.y) + " outside (-1, 1)");
  return out;
}

/// Flight time of one return: -K log|y|.
inline double return_time(const SectionPoint& q, const ModelParams& p) {
  if (q.y == 0.0) throw Error(Errc::DegenerateInput, "y = 0: infinite return time");
  return -p.K() * std::log(std::abs(q.y));
}

/// Derivative of P_lambda at q.
inline Mat2 return_map_jacobian(const SectionPoint& q, const ModelParams& p) {
  if (q.y == 0.0) throw Error(Errc::DegenerateInput, "y = 0: Jacobian undefined");
  const double ay = std::abs(q.y);
  const double K = p.K();
  const double lc = p.lambda() * std::cos(q.x - K * std::log(ay));
  const double dpow = p.delta() * std::pow(ay, p.delta() - 1.0);
  return Mat2{1.0, -K / q.y, lc, dpow - lc * K / q.y};
}

/// Derivative of P_lambda evaluated in another number type. The (2,2) entry is
/// delta|y|^(delta-1) - (lambda K / y) cos(.), so in double a*d - b*c loses the
/// determinant to cancellation once lambda K / |y| >> delta |y|^(delta-1).
/// Evaluating in a wider type keeps it.
template <typename Real>
Mat2T<Real> return_map_jacobian_as(const SectionPoint& q, const ModelParams& p) {
  using std::abs;
  using std::cos;
  using std::log;
  using std::pow;
  if (q.y == 0.0) throw Error(Errc::DegenerateInput, "y = 0: Jacobian undefined");
  const Real C1(p.C1()), E1(p.E1()), C2(p.C2()), E2(p.E2());
  const Real K = (C1 + E2) / (E1 * E2);
  const Real delta = (C1 * C2) / (E1 * E2);
  const Real y(q.y);
  const Real ay = abs(y);
  const Real lc = Real(p.lambda()) * cos(Real(q.x) - K * log(ay));
  const Real dpow = delta * pow(ay, delta - Real(1));
  return Mat2T<Real>{Real(1), -K / y, lc, dpow - lc * K / y};
}

// --------------------------------------------------------------------- orbits

struct OrbitRecord {
  std::vector<SectionPoint> points;  // initial point plus every in-section image
  std::vector<double> times;         // flight time of each applied return
  double total_time = 0.0;
  Termination termination = Termination::Completed;
  std::optional<double> landing_x;   // where W^s(sigma1) was hit, if it was
};

inline OrbitRecord iterate_orbit(const SectionPoint& start, const ModelParams& p, std::size_t n_steps) {
  OrbitRecord rec;
  rec.points.reserve(n_steps + 1);
  rec.times.reserve(n_steps);
  rec.points.push_back(start);
  SectionPoint cur = start;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const ReturnOutcome out = advance(cur, p);
    if (out.status == Termination::Escaped) {
      rec.termination = Termination::Escaped;
      break;
    }
    const double t = return_time(cur, p);
    rec.times.push_back(t);
    rec.total_time += t;
    if (out.status == Termination::HitStableManifold) {
      rec.termination = Termination::HitStableManifold;
      rec.landing_x = out.x;
      break;
    }
    cur = out.point();
    rec.points.push_back(cur);
  }
  return rec;
}

// ------------------------------------------------------------ flow suspension

enum class FlowSegment { InsideV1, Transition12, InsideV2, Transition21 };

/// One sample of the reconstructed trajectory in the cylindrical coordinates
/// of the neighbourhood it belongs to. theta is unwrapped.
struct FlowSample {
  FlowSegment segment;
  double t;
  double rho;
  double theta;
  double z;
};

struct FlowPath {
  std::vector<FlowSample> samples;
  double time_in_v1 = 0.0;
  double time_in_v2 = 0.0;

  double duration() const { return time_in_v1 + time_in_v2; }
  /// Arrival point on In(sigma1), angle reduced.
  WallPoint endpoint() const {
    const FlowSample& s = samples.back();
    return WallPoint{reduce_angle(s.theta), s.z};
  }
  double winding() const { return samples.back().theta - samples.front().theta; }
};

/// Continuous trajectory of one full return from the section point q,
/// sampled every `dt` time units inside V1 and V2.
inline FlowPath flow_trajectory(const SectionPoint& q, const ModelParams& p, double dt) {
  if (q.y == 0.0) throw Error(Errc::DegenerateInput, "y = 0 never leaves V1");
  if (!(dt > 0.0)) throw Error(Errc::InvalidParams, "dt must be positive");
  FlowPath path;
  const double ay = std::abs(q.y);
  const double s = sign_of(q.y);

  auto sample_span = [&](double T, auto&& at) {
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T / dt)));
    for (std::size_t i = 0; i <= n; ++i) at(T * static_cast<double>(i) / static_cast<double>(n));
  };

  // V1: rho = e^{-C1 t}, theta = x + t, z = y e^{E1 t} until |z| = 1.
  const double T1 = -std::log(ay) / p.E1();
  path.time_in_v1 = T1;
  sample_span(T1, [&](double t) {
    const double z = (t == T1) ? s : q.y * std::exp(p.E1() * t);
    path.samples.push_back({FlowSegment::InsideV1, t, std::exp(-p.C1() * t), q.x + t, z});
  });
  const double r = std::pow(ay, p.delta1());
  const double theta1 = q.x + T1;
  path.samples.push_back({FlowSegment::Transition12, T1, r, theta1, s});

  // V2: rho = r e^{E2 t}, theta = phi + t, z = s e^{-C2 t} until rho = 1.
  const double T2 = -std::log(r) / p.E2();
  path.time_in_v2 = T2;
  sample_span(T2, [&](double t) {
    const double rho = (t == T2) ? 1.0 : r * std::exp(p.E2() * t);
    path.samples.push_back({FlowSegment::InsideV2, T1 + t, rho, theta1 + t, s * std::exp(-p.C2() * t)});
  });
  const double theta2 = theta1 + T2;
  const double z2 = s * std::pow(r, p.delta2());
  path.samples.push_back({FlowSegment::Transition21, T1 + T2, 1.0, theta2, z2});
  path.samples.push_back(
      {FlowSegment::Transition21, T1 + T2, 1.0, theta2, z2 + p.lambda() * std::sin(reduce_angle(theta2))});
  return path;
}

}  // namespace bykov
