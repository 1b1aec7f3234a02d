#pragma once

// Lyapunov exponents per unit flow time: closed form at the fixed points p_l,
// a Jacobian-product estimate along orbits, and the l -> infinity scan.

#include <cfloat>
#include <cmath>
#include <span>
#include <vector>

#include "core.hpp"
#include "fixedpoints.hpp"
#include "linalg.hpp"
#include "maps.hpp"

namespace bykov {

struct LyapunovData {
  double chi_s = 0.0;
  double chi_u = 0.0;
  bool focus = false;  // complex pair: both entries are log sqrt(det) / t1
};

/// log det DP at height y, without forming y^(delta - 1).
inline double log_det_jacobian(double y, const ModelParams& p) {
  return std::log(p.delta()) + (p.delta() - 1.0) * std::log(std::abs(y));
}

/// chi = log|mu| / t1 with t1 = -K log y_l = 2 pi l. log|mu_s| is taken as
/// log det - log|mu_u| so it survives when mu_s itself underflows.
inline LyapunovData lyapunov_fixed_point(const FixedPoint& fp, const ModelParams& p) {
  const EigenData ed = eigen_data(fp, p);
  const double t1 = return_time(fp.point(), p);
  const double logdet = log_det_jacobian(fp.y, p);
  LyapunovData out;
  if (!ed.real) {
    out.focus = true;
    out.chi_s = out.chi_u = 0.5 * logdet / t1;
    return out;
  }
  const double log_u = std::log(std::abs(ed.mu_u));
  out.chi_u = log_u / t1;
  out.chi_s = (logdet - log_u) / t1;
  return out;
}

struct LyapunovOptions {
  int renorm_period = 1;  // steps multiplied together between QR factorizations
  int warmup = 0;         // steps used only to align the frame (rounded up to a whole block)
};

namespace detail {

/// Accumulates a Jacobian product in the form Q * exp(scale) * R, R upper
/// triangular with unit Frobenius norm.
class ProductAccumulator {
 public:
  explicit ProductAccumulator(LyapunovOptions opt) : opt_(opt) {
    if (opt_.renorm_period < 1) throw Error(Errc::InvalidParams, "renorm_period must be >= 1");
    if (opt_.warmup < 0) throw Error(Errc::InvalidParams, "warmup must be >= 0");
  }

  void push(const Mat2& j, double log_det, double t) {
    block_ = j * block_;
    block_logdet_ += log_det;
    block_time_ += t;
    if (++in_block_ == opt_.renorm_period) flush();
  }

  LyapunovData result() {
    if (in_block_ > 0) flush();
    LyapunovData out;
    if (!(time_ > 0.0)) throw Error(Errc::OrbitTerminated, "no steps left after warmup");
    if (opt_.warmup == 0) {
      const auto sv = singular_values(r_);
      const double log1 = scale_ + std::log(sv[0]);
      out.chi_u = log1 / time_;
      out.chi_s = (logdet_ - log1) / time_;
    } else {
      out.chi_u = std::max(log_r11_, logdet_ - log_r11_) / time_;
      out.chi_s = std::min(log_r11_, logdet_ - log_r11_) / time_;
    }
    return out;
  }

 private:
  void flush() {
    const QR2 f = qr(block_ * q_);
    q_ = f.q;
    const double r11 = f.r.a;
    const bool counted = steps_done_ >= opt_.warmup;
    steps_done_ += in_block_;
    if (counted) {
      Mat2 rb = f.r;
      const double n = std::sqrt(rb.a * rb.a + rb.b * rb.b + rb.d * rb.d);
      rb = Mat2{rb.a / n, rb.b / n, 0.0, rb.d / n};
      r_ = rb * r_;
      const double m = std::sqrt(r_.a * r_.a + r_.b * r_.b + r_.d * r_.d);
      r_ = Mat2{r_.a / m, r_.b / m, 0.0, r_.d / m};
      scale_ += std::log(n) + std::log(m);
      log_r11_ += std::log(r11);
      logdet_ += block_logdet_;
      time_ += block_time_;
    }
    block_ = Mat2::identity();
    block_logdet_ = 0.0;
    block_time_ = 0.0;
    in_block_ = 0;
  }

  LyapunovOptions opt_;
  Mat2 q_ = Mat2::identity();
  Mat2 r_ = Mat2::identity();
  Mat2 block_ = Mat2::identity();
  double scale_ = 0.0, log_r11_ = 0.0, logdet_ = 0.0, time_ = 0.0;
  double block_logdet_ = 0.0, block_time_ = 0.0;
  int in_block_ = 0;
  int steps_done_ = 0;
};

}  // namespace detail

/// Exponents of the Jacobian product along the orbit of p, per unit of
/// accumulated return time. With warmup = 0 they are the log singular values
/// of the whole product; with warmup > 0, the growth rates of the QR frame
/// after the warmup steps.
inline LyapunovData lyapunov_numeric(const SectionPoint& start, const ModelParams& p, int n_steps,
                                     LyapunovOptions opt = {}) {
  if (n_steps < 1) throw Error(Errc::InvalidParams, "n_steps must be >= 1");
  detail::ProductAccumulator acc(opt);
  SectionPoint cur = start;
  for (int i = 0; i < n_steps; ++i) {
    const ReturnOutcome out = advance(cur, p);
    if (out.status != Termination::Completed)
      throw Error(Errc::OrbitTerminated, "orbit left the section after " + std::to_string(i) + " returns");
    acc.push(return_map_jacobian(cur, p), log_det_jacobian(cur.y, p), return_time(cur, p));
    cur = out.point();
  }
  return acc.result();
}

/// Same estimate along a periodic orbit given by its points. Each step uses the
/// stored point, so round-off cannot push the orbit off the cycle.
inline LyapunovData lyapunov_numeric(std::span<const SectionPoint> cycle, const ModelParams& p, int n_steps,
                                     LyapunovOptions opt = {}) {
  if (cycle.empty()) throw Error(Errc::InvalidParams, "empty cycle");
  if (n_steps < 1) throw Error(Errc::InvalidParams, "n_steps must be >= 1");
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const SectionPoint& next = cycle[(i + 1) % cycle.size()];
    const ReturnOutcome out = advance(cycle[i], p);
    if (out.status != Termination::Completed ||
        std::max(std::abs(angle_diff(out.x, next.x)), std::abs(out.y - next.y)) > 1e-8)
      throw Error(Errc::NotAFixedPoint, "points do not form a cycle of the return map");
  }
  detail::ProductAccumulator acc(opt);
  for (int i = 0; i < n_steps; ++i) {
    const SectionPoint& q = cycle[static_cast<std::size_t>(i) % cycle.size()];
    acc.push(return_map_jacobian(q, p), log_det_jacobian(q.y, p), return_time(q, p));
  }
  return acc.result();
}

// ------------------------------------------------------------------ l-scan

struct EigenScanRow {
  int ell = 0;
  double lambda = 0.0;
  double trace = 0.0;
  double det = 0.0;
  double mu_s = 0.0;
  double mu_u = 0.0;
  Vec2 v_s{}, v_u{};
  double chi_s = 0.0;
  double chi_u = 0.0;
};

/// Principal-branch fixed point p_l at the current lambda, or nullopt.
inline std::optional<FixedPoint> principal_fixed_point(const ModelParams& p, int ell) {
  for (const FixedPoint& fp : fixed_point_family(p, ell))
    if (fp.branch == Branch::Principal) return fp;
  return std::nullopt;
}

inline std::vector<EigenScanRow> eigen_asymptotics_scan(const ModelParams& p, int ell_lo, int ell_hi) {
  if (ell_lo < 1 || ell_hi < ell_lo) throw Error(Errc::RangeInvalid, "need 1 <= ell_lo <= ell_hi");
  std::vector<EigenScanRow> rows;
  for (int ell = ell_lo; ell <= ell_hi; ++ell) {
    const auto fp = principal_fixed_point(p, ell);
    if (!fp) throw Error(Errc::RangeInvalid, "no fixed point at ell=" + std::to_string(ell));
    const EigenData ed = eigen_data(*fp, p);
    if (!ed.real) throw Error(Errc::RangeInvalid, "complex eigenvalues at ell=" + std::to_string(ell));
    const LyapunovData ly = lyapunov_fixed_point(*fp, p);
    rows.push_back({ell, p.lambda(), ed.trace, ed.det, ed.mu_s, ed.mu_u, ed.v_s, ed.v_u, ly.chi_s, ly.chi_u});
  }
  return rows;
}

/// Largest l for which the principal p_l exists with real eigenvalues and
/// every eigen quantity (y_l, det, mu_s, mu_u) is a normal double.
inline int max_representable_ell(const ModelParams& p, int ell_cap = 100000) {
  int best = 0;
  for (int ell = 1; ell <= ell_cap; ++ell) {
    const double y = fixed_point_height(p.K(), ell);
    if (!(y >= DBL_MIN)) break;
    const auto fp = principal_fixed_point(p, ell);
    if (!fp) continue;
    const EigenData ed = eigen_data(*fp, p);
    if (!ed.real) continue;
    const bool normal = std::isnormal(ed.det) && std::isnormal(ed.mu_s) && std::isnormal(ed.mu_u);
    if (!normal) break;
    best = ell;
  }
  return best;
}

}  // namespace bykov
