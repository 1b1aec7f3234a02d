#pragma once

// n-pulse connections: points of the unstable curve y = lambda sin x whose
// n-th return lands on y = 0, and the parameters where two of them collide.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "core.hpp"
#include "linalg.hpp"
#include "maps.hpp"
#include "roots.hpp"

namespace bykov {

enum class CurveKind { UnstableOfSigma2, StableOfSigma1 };

struct ManifoldCurve {
  CurveKind kind = CurveKind::UnstableOfSigma2;
  std::vector<WallPoint> points;
};

/// Graph of y = lambda sin x sampled at n points of [0, 2pi).
inline ManifoldCurve unstable_curve(const ModelParams& p, std::size_t n) {
  ManifoldCurve c{CurveKind::UnstableOfSigma2, {}};
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = two_pi * static_cast<double>(i) / static_cast<double>(n);
    c.points.push_back({x, p.lambda() * std::sin(x)});
  }
  return c;
}

inline ManifoldCurve stable_curve(std::size_t n) {
  ManifoldCurve c{CurveKind::StableOfSigma1, {}};
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({two_pi * static_cast<double>(i) / static_cast<double>(n), 0.0});
  return c;
}

// ------------------------------------------------------------ pulse function

/// g_n and its derivatives in x and lambda along the unstable curve.
struct PulseValue {
  bool valid = false;  // false when an earlier return ends on y = 0 or escapes
  double g = 0.0;
  double g_x = 0.0;
  double g_lambda = 0.0;
};

/// Height of the n-th return of (x, lambda sin x), with forward-mode
/// derivatives. Requires 0 < lambda sin x.
inline PulseValue pulse_function(double x, const ModelParams& p, int n) {
  PulseValue out;
  const double lambda = p.lambda();
  SectionPoint q{reduce_angle(x), lambda * std::sin(x)};
  if (!(q.y != 0.0 && std::abs(q.y) < 1.0)) return out;
  Vec2 vx{1.0, lambda * std::cos(x)};
  Vec2 vl{0.0, std::sin(x)};
  for (int k = 0; k < n; ++k) {
    const ReturnOutcome img = advance(q, p);
    const Mat2 j = return_map_jacobian(q, p);
    const double s = std::sin(image_angle(q, p));
    vx = j * vx;
    vl = j * vl;
    vl.y += s;
    if (k + 1 == n) {
      if (img.status == Termination::Escaped) return out;
      out.valid = true;
      out.g = img.y;
      out.g_x = vx.y;
      out.g_lambda = vl.y;
      return out;
    }
    if (img.status != Termination::Completed) return out;
    q = img.point();
  }
  return out;
}

inline double pulse_height(double x, const ModelParams& p, int n) {
  const PulseValue v = pulse_function(x, p, n);
  return v.valid ? v.g : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------- find_pulses

struct PulseConnection {
  int n = 1;
  double lambda = 0.0;
  double x_root = 0.0;
  double residual = 0.0;
  std::vector<SectionPoint> orbit;  // (x, lambda sin x) and the next n - 1 returns
};

struct PulseOptions {
  std::size_t grid_points = 4096;
  int max_refinements = 3;     // each multiplies the grid by 4
  double residual_tol = 1e-10;
  double zero_floor = 1e-10;   // closest approach of the grid to a zero of sin
};

struct PulseResult {
  std::vector<PulseConnection> roots;
  bool degenerate = false;     // lambda = 0: the unstable curve is y = 0
  std::size_t discarded = 0;   // sign changes whose bisected root failed residual_tol
  std::size_t grid_used = 0;
};

namespace detail {

/// Grid over [lo, hi]: half the points uniform, a quarter log-spaced toward
/// each end that sits on a zero of sin, down to `floor`.
inline std::vector<double> pulse_grid(double lo, double hi, std::size_t n, double floor) {
  std::vector<double> g;
  g.reserve(n + 2);
  const std::size_t nu = n / 2;
  for (std::size_t i = 0; i <= nu; ++i) g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nu));
  const auto near_zero = [](double v) { return std::abs(std::remainder(v, pi)) < 1e-12; };
  const std::size_t nl = n / 4;
  const double span = (hi - lo) / 4.0;
  if (span > floor) {
    const double l0 = std::log(floor), l1 = std::log(span);
    for (std::size_t i = 0; i < nl; ++i) {
      const double d = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(nl));
      if (near_zero(lo)) g.push_back(lo + d);
      if (near_zero(hi)) g.push_back(hi - d);
    }
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  // open interval: the endpoints are the primary links themselves
  if (!g.empty() && near_zero(g.front())) g.erase(g.begin());
  if (!g.empty() && near_zero(g.back())) g.pop_back();
  return g;
}

struct Bracket {
  double lo, hi, flo, fhi;
};

inline std::vector<Bracket> sign_changes(const std::vector<double>& grid, const ModelParams& p, int n) {
  std::vector<Bracket> out;
  double px = 0.0, pf = std::numeric_limits<double>::quiet_NaN();
  for (double x : grid) {
    const double f = pulse_height(x, p, n);
    if (std::isfinite(f) && std::isfinite(pf) && ((f <= 0.0) != (pf <= 0.0) || f == 0.0)) out.push_back({px, x, pf, f});
    px = x;
    pf = f;
  }
  return out;
}

}  // namespace detail

/// Roots of g_n in (lo, hi) by sign-change bracketing and bisection. The grid
/// is refined x4 until the number of brackets stops changing.
inline PulseResult find_pulses(const ModelParams& p, int n, double lo, double hi, PulseOptions opt = {}) {
  if (n < 1) throw Error(Errc::InvalidIndex, "pulse count must be >= 1");
  if (!(lo < hi)) throw Error(Errc::RangeInvalid, "empty x window");
  PulseResult res;
  if (p.lambda() == 0.0) {
    res.degenerate = true;
    return res;
  }
  std::size_t npts = opt.grid_points;
  auto brackets = detail::sign_changes(detail::pulse_grid(lo, hi, npts, opt.zero_floor), p, n);
  bool stable = false;
  for (int r = 0; r < opt.max_refinements; ++r) {
    const std::size_t finer = npts * 4;
    auto next = detail::sign_changes(detail::pulse_grid(lo, hi, finer, opt.zero_floor), p, n);
    const bool same = next.size() == brackets.size();
    npts = finer;
    brackets = std::move(next);
    if (same) {
      stable = true;
      break;
    }
  }
  if (!stable) throw Error(Errc::GridTooCoarse, "root count still changing at the finest grid");
  res.grid_used = npts;
  for (const auto& b : brackets) {
    const auto f = [&](double x) { return pulse_height(x, p, n); };
    const double x = bisect(f, b.lo, b.hi, b.flo, b.fhi);
    const double r = std::abs(f(x));
    if (!(r < opt.residual_tol)) {
      ++res.discarded;
      continue;
    }
    PulseConnection pc{n, p.lambda(), reduce_angle(x), r, {}};
    SectionPoint q{reduce_angle(x), p.lambda() * std::sin(x)};
    pc.orbit.push_back(q);
    for (int k = 1; k < n; ++k) {
      q = advance(q, p).point();
      pc.orbit.push_back(q);
    }
    res.roots.push_back(std::move(pc));
  }
  return res;
}

// ---------------------------------------------------------------- tangencies

struct TangencyParameter {
  int n = 1;
  double lambda_star = 0.0;
  double x_star = 0.0;
  double g = 0.0;
  double g_x = 0.0;
  double g_xx = 0.0;
  bool quadratic = false;
};

struct TangencyOptions {
  int steps_per_decade = 64;
  std::size_t grid_points = 2048;
  double x_lo = 1e-3;
  double x_hi = pi - 1e-3;
  double window = 0.25;  // |g| < window * lambda marks a candidate critical point
};

namespace detail {

inline double pulse_slope(double x, const ModelParams& p, int n) {
  const PulseValue v = pulse_function(x, p, n);
  return v.valid ? v.g_x : std::numeric_limits<double>::quiet_NaN();
}

/// Critical points of g_n (roots of g_x) with |g| below window * lambda.
inline std::vector<double> small_critical_points(const ModelParams& p, int n, const TangencyOptions& opt) {
  std::vector<double> out;
  const auto slope = [&](double x) { return pulse_slope(x, p, n); };
  double px = opt.x_lo, ps = slope(px);
  for (std::size_t i = 1; i <= opt.grid_points; ++i) {
    const double x = opt.x_lo + (opt.x_hi - opt.x_lo) * static_cast<double>(i) / static_cast<double>(opt.grid_points);
    const double s = slope(x);
    if (std::isfinite(s) && std::isfinite(ps) && (s <= 0.0) != (ps <= 0.0)) {
      const double xc = bisect(slope, px, x, ps, s);
      const double g = pulse_height(xc, p, n);
      if (std::isfinite(g) && std::abs(g) < opt.window * p.lambda()) out.push_back(xc);
    }
    px = x;
    ps = s;
  }
  return out;
}

/// Critical point of g_n near x0, by bisection on g_x inside [x0 - h, x0 + h].
inline std::optional<double> critical_point_near(double x0, double h, const ModelParams& p, int n) {
  const auto slope = [&](double x) { return pulse_slope(x, p, n); };
  for (int k = 0; k < 6; ++k, h *= 2.0) {
    const double a = x0 - h, b = x0 + h;
    const double sa = slope(a), sb = slope(b);
    if (std::isfinite(sa) && std::isfinite(sb) && (sa <= 0.0) != (sb <= 0.0)) return bisect(slope, a, b, sa, sb);
  }
  return std::nullopt;
}

}  // namespace detail

/// Parameters in [lambda_lo, lambda_hi] at which two adjacent roots of g_n
/// merge. Found by sweeping lambda downward, watching g change sign at a
/// critical point, bisecting in lambda, and polishing (g, g_x) = 0 by Newton.
inline std::vector<TangencyParameter> find_tangency_lambda(const ModelParams& base, int n, double lambda_lo,
                                                           double lambda_hi, TangencyOptions opt = {}) {
  if (n < 1) throw Error(Errc::InvalidIndex, "pulse count must be >= 1");
  if (!(lambda_lo > 0.0 && lambda_lo < lambda_hi && lambda_hi < 1.0))
    throw Error(Errc::RangeInvalid, "bracket must satisfy 0 < lo < hi < 1");
  const int steps =
      std::max(1, static_cast<int>(std::ceil(std::log10(lambda_hi / lambda_lo) * opt.steps_per_decade)));
  std::vector<TangencyParameter> found;

  const auto at = [&](double lam) { return base.with_lambda(lam); };
  double lam_prev = lambda_hi;
  auto crit_prev = detail::small_critical_points(at(lam_prev), n, opt);
  for (int s = 1; s <= steps; ++s) {
    const double lam = lambda_hi * std::pow(lambda_lo / lambda_hi, static_cast<double>(s) / steps);
    const ModelParams p_now = at(lam);
    const auto crit_now = detail::small_critical_points(p_now, n, opt);
    for (double xc_prev : crit_prev) {
      // follow this critical point to the new lambda
      const auto xc_now = detail::critical_point_near(xc_prev, 1e-3, p_now, n);
      if (!xc_now) continue;
      const double g_prev = pulse_height(xc_prev, at(lam_prev), n);
      const double g_now = pulse_height(*xc_now, p_now, n);
      if (!(std::isfinite(g_prev) && std::isfinite(g_now)) || (g_prev <= 0.0) == (g_now <= 0.0)) continue;

      // h(lambda) = g at the critical point tracked from xc_prev
      double x_track = xc_prev;
      const auto h = [&](double l) {
        const auto xc = detail::critical_point_near(x_track, 1e-3, at(l), n);
        if (!xc) return std::numeric_limits<double>::quiet_NaN();
        return pulse_height(*xc, at(l), n);
      };
      double a = lam, b = lam_prev, ha = g_now, hb = g_prev;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (!(m > a && m < b)) break;
        const double hm = h(m);
        if (!std::isfinite(hm)) break;
        if ((hm <= 0.0) == (ha <= 0.0)) {
          a = m;
          ha = hm;
        } else {
          b = m;
          hb = hm;
        }
      }
      const double lam0 = std::abs(ha) <= std::abs(hb) ? a : b;
      const auto x0 = detail::critical_point_near(x_track, 1e-3, at(lam0), n);
      if (!x0) continue;

      // Newton on F(x, lambda) = (g, g_x); lambda scaled by lam0 for conditioning
      const auto F = [&](Vec2 z) {
        const double l = lam0 * z.y;
        if (!(l > 0.0 && l < 1.0)) return Vec2{NAN, NAN};
        const PulseValue v = pulse_function(z.x, at(l), n);
        if (!v.valid) return Vec2{NAN, NAN};
        return Vec2{v.g, v.g_x};
      };
      const auto JF = [&](Vec2 z) {
        const double hx = 1e-7, hl = 1e-7;
        const Vec2 fxp = F({z.x + hx, z.y}), fxm = F({z.x - hx, z.y});
        const Vec2 flp = F({z.x, z.y + hl}), flm = F({z.x, z.y - hl});
        return Mat2{(fxp.x - fxm.x) / (2 * hx), (flp.x - flm.x) / (2 * hl), (fxp.y - fxm.y) / (2 * hx),
                    (flp.y - flm.y) / (2 * hl)};
      };
      Vec2 z{*x0, 1.0};
      if (const auto polished = newton2(F, JF, z, 1e-13, 30)) z = *polished;
      const double lstar = lam0 * z.y;
      const ModelParams ps = at(lstar);
      const PulseValue v = pulse_function(z.x, ps, n);
      if (!v.valid) continue;
      const double hx = 1e-5;
      const double gxx = (detail::pulse_slope(z.x + hx, ps, n) - detail::pulse_slope(z.x - hx, ps, n)) / (2 * hx);
      TangencyParameter t{n, lstar, reduce_angle(z.x), v.g, v.g_x, gxx, false};
      t.quadratic = std::abs(gxx) > 1e3 * std::max(std::abs(v.g_x), 1e-300);
      const bool dup = std::any_of(found.begin(), found.end(), [&](const TangencyParameter& o) {
        return std::abs(o.lambda_star / t.lambda_star - 1.0) < 1e-8 && std::abs(angle_diff(o.x_star, t.x_star)) < 1e-6;
      });
      if (!dup) found.push_back(t);
    }
    lam_prev = lam;
    crit_prev = crit_now;
  }
  if (found.empty()) throw Error(Errc::NoCoalescenceInBracket, "no root pair merges inside the bracket");
  std::sort(found.begin(), found.end(),
            [](const TangencyParameter& a, const TangencyParameter& b) { return a.lambda_star > b.lambda_star; });
  return found;
}

}  // namespace bykov
