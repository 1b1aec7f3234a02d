#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bykov {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Errc {
  InvalidParams,
  DegenerateInput,
  Escaped,
  InvalidIndex,
  NotAFixedPoint,
  WindowEmpty,
  OrbitTerminated,
  RangeInvalid,
  EmptyRange,
  SamplingTooCoarse,
  GridTooCoarse,
  NoCoalescenceInBracket,
  ResolutionTooCoarse,
  EmptySeed,
};

constexpr std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::Escaped: return "Escaped";
    case Errc::InvalidIndex: return "InvalidIndex";
    case Errc::NotAFixedPoint: return "NotAFixedPoint";
    case Errc::WindowEmpty: return "WindowEmpty";
    case Errc::OrbitTerminated: return "OrbitTerminated";
    case Errc::RangeInvalid: return "RangeInvalid";
    case Errc::EmptyRange: return "EmptyRange";
    case Errc::SamplingTooCoarse: return "SamplingTooCoarse";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::NoCoalescenceInBracket: return "NoCoalescenceInBracket";
    case Errc::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case Errc::EmptySeed: return "EmptySeed";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Reduce an angle to [0, 2pi).
inline double reduce_angle(double a) {
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Shortest signed distance between two angles, in [-pi, pi].
inline double angle_diff(double a, double b) {
  return std::remainder(a - b, two_pi);
}

/// Linearized eigenvalue data of the two saddle-foci plus the perturbation size.
///
/// The saddle-focus at sigma1 has eigenvalues -C1 +- i, E1; the one at sigma2
/// has E2 +- i, -C2. Everything the return map needs is the pair (delta, K).
class ModelParams {
 public:
  ModelParams(double C1, double E1, double C2, double E2, double lambda)
      : C1_(C1), E1_(E1), C2_(C2), E2_(E2), lambda_(lambda) {
    if (!(std::isfinite(C1) && std::isfinite(E1) && std::isfinite(C2) && std::isfinite(E2)))
      throw Error(Errc::InvalidParams, "eigenvalue data must be finite");
    if (!(C1 > E1 && E1 > 0.0))
      throw Error(Errc::InvalidParams, "require C1 > E1 > 0");
    if (!(C2 > E2 && E2 > 0.0))
      throw Error(Errc::InvalidParams, "require C2 > E2 > 0");
    if (!(std::isfinite(lambda) && lambda >= 0.0 && lambda < 1.0))
      throw Error(Errc::InvalidParams, "require 0 <= lambda < 1");
    delta1_ = C1 / E1;
    delta2_ = C2 / E2;
    delta_ = delta1_ * delta2_;
    K_ = (C1 + E2) / (E1 * E2);
  }

  /// Canonical eigenvalue data realizing a given (delta, K): symmetric split
  /// delta1 = delta2 = sqrt(delta), E1 = E2 = (sqrt(delta) + 1) / K.
  static ModelParams from_delta_K(double delta, double K, double lambda) {
    if (!(delta > 1.0 && K > 0.0))
      throw Error(Errc::InvalidParams, "require delta > 1 and K > 0");
    const double s = std::sqrt(delta);
    const double E = (s + 1.0) / K;
    return ModelParams(s * E, E, s * E, E, lambda);
  }

  ModelParams with_lambda(double lambda) const { return ModelParams(C1_, E1_, C2_, E2_, lambda); }

  double C1() const { return C1_; }
  double E1() const { return E1_; }
  double C2() const { return C2_; }
  double E2() const { return E2_; }
  double lambda() const { return lambda_; }
  double delta1() const { return delta1_; }
  double delta2() const { return delta2_; }
  double delta() const { return delta_; }
  double K() const { return K_; }

 private:
  double C1_, E1_, C2_, E2_, lambda_;
  double delta1_ = 0, delta2_ = 0, delta_ = 0, K_ = 0;
};

/// A point (x, y) on the wall In(sigma1): x is an angle, y a signed height.
struct SectionPoint {
  double x = 0.0;
  double y = 0.0;

  /// Validating constructor: reduces x, rejects y = 0 and |y| >= 1.
  static SectionPoint make(double x, double y) {
    if (y == 0.0) throw Error(Errc::DegenerateInput, "y = 0 lies on the local stable manifold");
    if (!(std::abs(y) < 1.0)) throw Error(Errc::Escaped, "|y| >= 1 is outside the section");
    return SectionPoint{reduce_angle(x), y};
  }

  friend bool operator==(const SectionPoint&, const SectionPoint&) = default;
};

}  // namespace bykov
