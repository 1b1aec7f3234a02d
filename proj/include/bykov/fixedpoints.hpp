#pragma once

// The fixed-point family p_l of the return map, its linearization, and the
// parameter values a_l < b_l < c_l < d_l at which p_l changes type.
//
// Threshold math is templated on the number type so it can run in 50-digit
// binary floating point when the thresholds collapse below double resolution
// (small K, large delta).

#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "core.hpp"
#include "linalg.hpp"
#include "maps.hpp"
#include "roots.hpp"

namespace bykov {

using extended = boost::multiprecision::cpp_bin_float_50;

enum class Precision { Double, Extended };

constexpr std::string_view to_string(Precision p) { return p == Precision::Double ? "double" : "extended"; }

/// Principal: x = arcsin s (cos x > 0). Conjugate: x = pi - arcsin s.
enum class Branch { Principal, Conjugate };

constexpr std::string_view to_string(Branch b) { return b == Branch::Principal ? "principal" : "conjugate"; }

enum class Stability { SaddleNodeBoundary, SinkNode, SinkFocus, Saddle, FlipBoundary, SourceNode, SourceFocus };

constexpr std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::SaddleNodeBoundary: return "saddle-node-boundary";
    case Stability::SinkNode: return "sink-node";
    case Stability::SinkFocus: return "sink-focus";
    case Stability::Saddle: return "saddle";
    case Stability::FlipBoundary: return "flip-boundary";
    case Stability::SourceNode: return "source-node";
    case Stability::SourceFocus: return "source-focus";
  }
  return "unknown";
}

struct FixedPoint {
  int ell = 1;
  Branch branch = Branch::Principal;
  double x = 0.0;
  double y = 0.0;
  double lambda = 0.0;

  SectionPoint point() const { return SectionPoint{x, y}; }
};

struct EigenData {
  double trace = 0.0;
  double det = 0.0;
  bool real = true;
  double mu_s = 0.0;  // smaller modulus (real case)
  double mu_u = 0.0;  // larger modulus (real case)
  std::complex<double> pair{};  // complex case
  Vec2 v_s{}, v_u{};            // unit eigenvectors with positive first component
  Stability stability = Stability::SinkNode;
};

inline void require_index(int ell) {
  if (ell < 1) throw Error(Errc::InvalidIndex, "winding index must be >= 1, got " + std::to_string(ell));
}

// ------------------------------------------------------------ generic closed forms

template <typename Real>
Real two_pi_v() {
  return boost::math::constants::two_pi<Real>();
}

/// y_l = exp(-2 pi l / K).
template <typename Real>
Real fixed_point_height(const Real& K, int ell) {
  using std::exp;
  return exp(-two_pi_v<Real>() * Real(ell) / K);
}

/// a_l = exp(-2 pi l / K) - exp(-2 pi l delta / K): below it p_l does not exist.
template <typename Real>
Real saddle_node_threshold(const Real& delta, const Real& K, int ell) {
  using std::exp;
  require_index(ell);
  const Real t = two_pi_v<Real>() * Real(ell) / K;
  return exp(-t) - exp(-t * delta);
}

inline double saddle_node_threshold(const ModelParams& p, int ell) {
  return saddle_node_threshold<double>(p.delta(), p.K(), ell);
}

/// det DP at p_l: delta y_l^(delta - 1).
template <typename Real>
Real fixed_point_det(const Real& delta, const Real& K, int ell) {
  using std::exp;
  return delta * exp(-two_pi_v<Real>() * Real(ell) * (delta - Real(1)) / K);
}

/// Trace of DP at p_l on a branch, in the square-root form
/// 1 + D -+ (K / y) sqrt(lambda^2 - a^2). NaN below a_l.
template <typename Real>
Real branch_trace(const Real& delta, const Real& K, int ell, const Real& lambda, Branch branch) {
  using std::sqrt;
  const Real y = fixed_point_height(K, ell);
  const Real a = saddle_node_threshold(delta, K, ell);
  const Real D = fixed_point_det(delta, K, ell);
  if (lambda < a) return Real(std::numeric_limits<double>::quiet_NaN());
  const Real root = sqrt(lambda * lambda - a * a);
  const Real lam_cos = branch == Branch::Principal ? root : -root;
  return Real(1) + D - (K / y) * lam_cos;
}

/// Classification of a planar linear map from its trace and determinant.
template <typename Real>
Stability classify(const Real& tr, const Real& det, double tol = 1e-9) {
  using std::abs;
  const Eigenvalues2<Real> e = eigenvalues_from(tr, det);
  if (!e.real) return det < Real(1) ? Stability::SinkFocus : Stability::SourceFocus;
  const Real t(tol);
  if (abs(e.large - Real(1)) <= t || abs(e.small - Real(1)) <= t) return Stability::SaddleNodeBoundary;
  if (abs(e.large + Real(1)) <= t || abs(e.small + Real(1)) <= t) return Stability::FlipBoundary;
  if (abs(e.large) < Real(1)) return Stability::SinkNode;
  if (abs(e.small) < Real(1)) return Stability::Saddle;
  return Stability::SourceNode;
}

// ------------------------------------------------------------------ fixed points

/// The fixed points p_l = (x_l, exp(-2 pi l / K)) at the current lambda:
/// none below a_l, one (x = pi/2) at a_l, two above.
inline std::vector<FixedPoint> fixed_point_family(const ModelParams& p, int ell) {
  require_index(ell);
  std::vector<FixedPoint> out;
  const double lambda = p.lambda();
  if (lambda == 0.0) return out;
  const double y = fixed_point_height(p.K(), ell);
  const double s = saddle_node_threshold(p, ell) / lambda;
  if (!(s <= 1.0)) return out;
  if (s == 1.0) {
    out.push_back({ell, Branch::Principal, pi / 2.0, y, lambda});
    return out;
  }
  const double x0 = std::asin(s);
  out.push_back({ell, Branch::Principal, reduce_angle(x0), y, lambda});
  out.push_back({ell, Branch::Conjugate, reduce_angle(pi - x0), y, lambda});
  return out;
}

/// max(|dx| on the circle, |dy|) between P(q) and q. Infinite if P(q) leaves.
inline double fixed_point_residual(const SectionPoint& q, const ModelParams& p) {
  const ReturnOutcome out = advance(q, p);
  if (out.status == Termination::Escaped) return std::numeric_limits<double>::infinity();
  return std::max(std::abs(angle_diff(out.x, q.x)), std::abs(out.y - q.y));
}

/// Unit eigenvector (1, (1 - mu) y / K) from the first row of DP.
inline Vec2 fixed_point_eigenvector(double mu, double y, double K) {
  return Vec2{1.0, (1.0 - mu) * y / K}.normalized();
}

inline EigenData eigen_data(const FixedPoint& fp, const ModelParams& p, double boundary_tol = 1e-9) {
  const double res = fixed_point_residual(fp.point(), p);
  if (!(res <= 1e-8))
    throw Error(Errc::NotAFixedPoint, "residual " + std::to_string(res) + " exceeds 1e-8");
  const double K = p.K();
  const double delta = p.delta();
  EigenData ed;
  ed.det = delta * std::pow(fp.y, delta - 1.0);
  ed.trace = 1.0 + ed.det - (p.lambda() * K / fp.y) * std::cos(fp.x);
  const Eigenvalues2<double> e = eigenvalues_from(ed.trace, ed.det);
  ed.real = e.real;
  if (e.real) {
    ed.mu_s = e.small;
    ed.mu_u = e.large;
    ed.v_s = fixed_point_eigenvector(ed.mu_s, fp.y, K);
    ed.v_u = fixed_point_eigenvector(ed.mu_u, fp.y, K);
  } else {
    ed.pair = e.pair;
  }
  ed.stability = classify(ed.trace, ed.det, boundary_tol);
  return ed;
}

// -------------------------------------------------------------------- thresholds

template <typename Real>
struct BifurcationThresholdsT {
  int ell = 1;
  Real a, b, c, d;
};

/// a: saddle-node (p_l born). b, c: trace = +-2 sqrt(D) on the principal
/// branch (complex window). d: trace = -(1 + D), an eigenvalue crosses -1.
template <typename Real>
BifurcationThresholdsT<Real> bifurcation_thresholds(const Real& delta, const Real& K, int ell) {
  using std::sqrt;
  require_index(ell);
  const Real y = fixed_point_height(K, ell);
  const Real D = fixed_point_det(delta, K, ell);
  if (!(D < Real(1))) throw Error(Errc::WindowEmpty, "det at p_l >= 1: no sink window");
  const Real a = saddle_node_threshold(delta, K, ell);
  const Real sD = sqrt(D);
  const auto at = [&](const Real& s) { return sqrt(a * a + s * s); };
  const Real lo = y * (Real(1) - sD) * (Real(1) - sD) / K;
  const Real hi = y * (Real(1) + sD) * (Real(1) + sD) / K;
  const Real flip = Real(2) * y * (Real(1) + D) / K;
  return {ell, a, at(lo), at(hi), at(flip)};
}

/// Independent route to a threshold: bisection in lambda on
/// trace(lambda) = target along the principal branch, with the trace evaluated
/// through x = arcsin(a / lambda) and cos x.
template <typename Real>
Real threshold_by_bisection(const Real& delta, const Real& K, int ell, const Real& target, const Real& rtol) {
  using std::asin;
  using std::cos;
  const Real y = fixed_point_height(K, ell);
  const Real a = saddle_node_threshold(delta, K, ell);
  const Real D = fixed_point_det(delta, K, ell);
  const auto excess = [&](const Real& lam) {
    const Real x = asin(a / lam);
    return Real(1) + D - (K / y) * lam * cos(x) - target;
  };
  Real hi = a * Real(2);
  for (int i = 0; i < 2000 && excess(hi) > Real(0); ++i) hi *= Real(2);
  return bisect_relative<Real>(excess, a, hi, rtol);
}

/// Thresholds for a parameter set, always reported in extended precision but
/// computed in the precision asked for.
struct ThresholdReport {
  int ell = 1;
  extended a, b, c, d;
  Precision precision = Precision::Double;

  bool ordered() const { return a < b && b < c && c < d; }
};

inline extended extended_delta(const ModelParams& p) {
  return (extended(p.C1()) * extended(p.C2())) / (extended(p.E1()) * extended(p.E2()));
}

inline extended extended_K(const ModelParams& p) {
  return (extended(p.C1()) + extended(p.E2())) / (extended(p.E1()) * extended(p.E2()));
}

inline ThresholdReport bifurcation_thresholds(const ModelParams& p, int ell, Precision prec) {
  ThresholdReport r;
  r.ell = ell;
  r.precision = prec;
  if (prec == Precision::Double) {
    const auto t = bifurcation_thresholds<double>(p.delta(), p.K(), ell);
    r.a = t.a;
    r.b = t.b;
    r.c = t.c;
    r.d = t.d;
  } else {
    const auto t = bifurcation_thresholds<extended>(extended_delta(p), extended_K(p), ell);
    r.a = t.a;
    r.b = t.b;
    r.c = t.c;
    r.d = t.d;
  }
  return r;
}

/// Double when it resolves a < b < c < d, extended otherwise.
inline ThresholdReport bifurcation_thresholds_auto(const ModelParams& p, int ell) {
  ThresholdReport r = bifurcation_thresholds(p, ell, Precision::Double);
  if (r.ordered()) return r;
  return bifurcation_thresholds(p, ell, Precision::Extended);
}

}  // namespace bykov
