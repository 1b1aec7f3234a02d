#pragma once

// Horizontal strips H_n in the rectangle around a primary link, a numerical
// strip-crossing check, and itinerary coding.
//
// Offsets are taken from the rectangle centre c: u = x - c. A point (x, y) with
// y > 0 belongs to H_n when |u| <= tau and its image angle u - K log y lies
// within tau of 2 pi n. Inverting the exponential gives the bounds
//   lower(u) = exp((u - tau - 2 pi n) / K),  upper(u) = exp((u + tau - 2 pi n) / K).

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <optional>
#include <vector>

#include "core.hpp"
#include "linalg.hpp"
#include "maps.hpp"

namespace bykov {

struct StripRectangle {
  double center_x = 0.0;
  double tau = 0.25;

  StripRectangle() = default;
  StripRectangle(double c, double t) : center_x(reduce_angle(c)), tau(t) {
    if (!(t > 0.0 && t < 1.0)) throw Error(Errc::InvalidParams, "rectangle half-width must lie in (0, 1)");
  }
};

struct StripSample {
  double x, lower, upper;
};

struct Strip {
  int n = 0;
  StripRectangle rect;
  double K = 1.0;
  std::vector<StripSample> samples;
  double height = 0.0;

  double lower(double u) const { return std::exp((u - rect.tau - two_pi * n) / K); }
  double upper(double u) const { return std::exp((u + rect.tau - two_pi * n) / K); }

  /// Signed position of the image angle relative to the strip centre line:
  /// 0 on the centre line, |theta| <= tau inside.
  double theta(const SectionPoint& q) const {
    return angle_diff(q.x, rect.center_x) - K * std::log(q.y) - two_pi * n;
  }

  bool contains(const SectionPoint& q) const {
    if (!(q.y > 0.0)) return false;
    if (std::abs(angle_diff(q.x, rect.center_x)) > rect.tau) return false;
    return std::abs(theta(q)) <= rect.tau;
  }
};

inline Strip make_strip(int n, const StripRectangle& rect, double K, int nx = 64) {
  Strip s{n, rect, K, {}, 0.0};
  s.samples.reserve(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    const double u = -rect.tau + 2.0 * rect.tau * i / (nx - 1);
    s.samples.push_back({reduce_angle(rect.center_x + u), s.lower(u), s.upper(u)});
    s.height = std::max(s.height, s.upper(u) - s.lower(u));
  }
  return s;
}

/// Strips H_n for n in [n_lo, n_hi] that fit inside the rectangle and whose
/// bounds stay above the double underflow threshold. Empty at lambda = 0,
/// where the perturbation that creates the horseshoe is absent.
inline std::vector<Strip> detect_strips(const ModelParams& p, const StripRectangle& rect, int n_lo, int n_hi,
                                        int nx = 64) {
  if (n_lo < 0 || n_hi < n_lo) throw Error(Errc::RangeInvalid, "need 0 <= n_lo <= n_hi");
  std::vector<Strip> out;
  if (p.lambda() == 0.0) return out;
  const double K = p.K();
  for (int n = n_lo; n <= n_hi; ++n) {
    Strip s = make_strip(n, rect, K, nx);
    if (!(s.upper(rect.tau) <= rect.tau)) continue;
    if (!(s.lower(-rect.tau) >= DBL_MIN)) continue;
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(Errc::EmptyRange, "no strip fits the rectangle for the requested windings");
  return out;
}

// ---------------------------------------------------------------- crossing

struct Interval {
  double lo = 0.0, hi = 0.0;
};

struct CrossingReport {
  int n = 0;
  bool crossed = false;
  Interval image_x_extent;  // offsets from the centre
  Interval image_y_extent;
  bool below = false;       // some image point lies under H_n (or at y <= 0)
  bool above = false;       // some image point lies over H_n
  double expansion_estimate = 0.0;
  double contraction_estimate = 0.0;
  double det_reference = 0.0;
  int nx = 0, ny = 0;
};

namespace detail {

inline CrossingReport crossing_at(const Strip& s, const ModelParams& p, int nx, int ny) {
  CrossingReport r;
  r.n = s.n;
  r.nx = nx;
  r.ny = ny;
  r.image_x_extent = {1e300, -1e300};
  r.image_y_extent = {1e300, -1e300};
  const double tau = s.rect.tau;
  double log_smax = 0.0, log_smin = 0.0, log_det = 0.0;
  bool x_inside = true;
  std::size_t count = 0;
  for (int i = 0; i < nx; ++i) {
    const double u = -tau + 2.0 * tau * i / (nx - 1);
    const double x = reduce_angle(s.rect.center_x + u);
    const double llo = std::log(s.lower(u));
    const double lhi = std::log(s.upper(u));
    double prev_x = 0.0;
    for (int j = 0; j < ny; ++j) {
      const double y = std::exp(llo + (lhi - llo) * j / (ny - 1));
      const SectionPoint q{x, y};
      const ReturnOutcome img = advance(q, p);
      const double ux = angle_diff(img.x, s.rect.center_x);
      if (j > 0 && std::abs(angle_diff(img.x, prev_x)) > 2.0 * tau)
        throw Error(Errc::SamplingTooCoarse, "adjacent image points jump more than the rectangle width");
      prev_x = img.x;
      r.image_x_extent.lo = std::min(r.image_x_extent.lo, ux);
      r.image_x_extent.hi = std::max(r.image_x_extent.hi, ux);
      r.image_y_extent.lo = std::min(r.image_y_extent.lo, img.y);
      r.image_y_extent.hi = std::max(r.image_y_extent.hi, img.y);
      if (std::abs(ux) > tau * (1.0 + 1e-12)) x_inside = false;
      if (img.y <= 0.0) {
        r.below = true;
      } else {
        const double th = s.theta(img.point());
        if (th > tau) r.below = true;
        if (th < -tau) r.above = true;
      }
      const double ldet = std::log(p.delta()) + (p.delta() - 1.0) * std::log(y);
      const auto sv = singular_values(return_map_jacobian(q, p), std::exp(ldet));
      log_smax += std::log(sv[0]);
      log_smin += ldet - std::log(sv[0]);
      log_det += ldet;
      ++count;
    }
  }
  const double c = static_cast<double>(count);
  r.expansion_estimate = std::exp(log_smax / c);
  r.contraction_estimate = std::exp(log_smin / c);
  r.det_reference = std::exp(log_det / c);
  r.crossed = p.lambda() > 0.0 && x_inside && r.below && r.above;
  return r;
}

}  // namespace detail

/// Maps a grid over H_n through the return map. The image crosses when its
/// x-offsets stay within the rectangle and it reaches both below and above
/// H_n. Expansion and contraction are geometric means of the Jacobian singular
/// values; det_reference is the geometric mean of delta y^(delta - 1).
/// The grid starts at 64 x 16 and doubles until the report stabilizes.
inline CrossingReport strip_crossing_check(const Strip& s, const ModelParams& p, int nx = 64, int ny = 16,
                                           int max_doublings = 4) {
  CrossingReport prev = detail::crossing_at(s, p, nx, ny);
  for (int k = 0; k < max_doublings; ++k) {
    nx *= 2;
    ny *= 2;
    CrossingReport next = detail::crossing_at(s, p, nx, ny);
    const bool stable = next.crossed == prev.crossed &&
                        std::abs(next.expansion_estimate / prev.expansion_estimate - 1.0) < 1e-3 &&
                        std::abs(next.contraction_estimate / prev.contraction_estimate - 1.0) < 1e-3;
    prev = next;
    if (stable) break;
  }
  return prev;
}

// --------------------------------------------------------------- itineraries

struct Itinerary {
  std::vector<int> symbols;
  std::optional<int> escape_step;  // 1-based index of the first iterate outside every strip
};

inline std::optional<int> strip_of(const SectionPoint& q, const std::vector<Strip>& strips) {
  for (const Strip& s : strips)
    if (s.contains(q)) return s.n;
  return std::nullopt;
}

/// Symbols s_0 .. s_{n-1} of the strips visited by the forward orbit of q.
inline Itinerary encode_itinerary(const SectionPoint& q, const ModelParams& p, const std::vector<Strip>& strips,
                                  int n_steps) {
  Itinerary it;
  SectionPoint cur = q;
  for (int i = 0; i < n_steps; ++i) {
    const auto sym = strip_of(cur, strips);
    if (!sym) {
      it.escape_step = i + 1;
      return it;
    }
    it.symbols.push_back(*sym);
    if (i + 1 == n_steps) break;
    const ReturnOutcome out = advance(cur, p);
    if (out.status != Termination::Completed) {
      it.escape_step = i + 2;
      return it;
    }
    cur = out.point();
  }
  return it;
}

}  // namespace bykov
