#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>

#include "linalg.hpp"

namespace bykov {

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (or one is 0).
/// Runs until the bracket cannot shrink in double precision or its width drops
/// below `xtol`. Returns the endpoint with the smaller |f|.
template <typename F>
double bisect(F&& f, double lo, double hi, double flo, double fhi, double xtol = 0.0) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi || (hi - lo) <= xtol) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

template <typename F>
double bisect(F&& f, double lo, double hi, double xtol = 0.0) {
  return bisect(f, lo, hi, f(lo), f(hi), xtol);
}

/// Generic-precision bisection for monotone threshold conditions; stops on a
/// relative bracket width.
template <typename Real, typename F>
Real bisect_relative(F&& f, Real lo, Real hi, const Real& rtol, int max_iter = 4000) {
  using std::abs;
  Real flo = f(lo);
  for (int it = 0; it < max_iter; ++it) {
    if (hi - lo <= rtol * abs(hi)) break;
    const Real mid = (lo + hi) / Real(2);
    const Real fm = f(mid);
    if (fm == Real(0)) return mid;
    if ((fm < Real(0)) == (flo < Real(0))) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / Real(2);
}

/// Damped Newton iteration for F: R^2 -> R^2 with a user Jacobian.
/// Returns the final iterate if |F| dropped below `ftol`, nullopt otherwise.
template <typename F, typename J>
std::optional<Vec2> newton2(F&& fn, J&& jac, Vec2 z, double ftol, int max_iter = 50) {
  Vec2 fz = fn(z);
  for (int it = 0; it < max_iter; ++it) {
    if (!(std::isfinite(fz.x) && std::isfinite(fz.y))) return std::nullopt;
    if (std::max(std::abs(fz.x), std::abs(fz.y)) < ftol) return z;
    const Mat2 m = jac(z);
    const double det = m.det();
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const Vec2 step{(m.d * fz.x - m.b * fz.y) / det, (-m.c * fz.x + m.a * fz.y) / det};
    double t = 1.0;
    const double f0 = std::hypot(fz.x, fz.y);
    Vec2 trial{};
    Vec2 ft{};
    for (int ls = 0; ls < 30; ++ls) {
      trial = {z.x - t * step.x, z.y - t * step.y};
      ft = fn(trial);
      if (std::isfinite(ft.x) && std::isfinite(ft.y) && std::hypot(ft.x, ft.y) < f0) break;
      t *= 0.5;
    }
    if (trial.x == z.x && trial.y == z.y) break;
    z = trial;
    fz = ft;
  }
  if (std::max(std::abs(fz.x), std::abs(fz.y)) < ftol) return z;
  return std::nullopt;
}

}  // namespace bykov
