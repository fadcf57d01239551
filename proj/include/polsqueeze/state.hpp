#pragma once

// Single-mode polarization-squeezed light: a coherent H mode combined with a
// squeezed thermal V mode, parametrized by mean photon numbers.

#include "polsqueeze/error.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace polsq {

/// State of the H ⊗ V modes.
///
///   nc  = |α|²        coherent photons in H (α taken real, non-negative)
///   ns  = sinh²|r|    squeezed-vacuum photons in V (r real, negative)
///   nth               thermal photons in V before squeezing
struct StateParams {
  double nc = 0.0;
  double ns = 0.0;
  double nth = 0.0;

  /// Validating constructor; throws InvalidParams for negative or non-finite input.
  static StateParams make(double nc, double ns, double nth) {
    StateParams p{nc, ns, nth};
    p.validate();
    return p;
  }

  void validate() const {
    auto ok = [](double x) { return std::isfinite(x) && x >= 0.0; };
    if (!ok(nc) || !ok(ns) || !ok(nth)) {
      throw Error(ErrorCode::InvalidParams, "nc, ns, nth must be finite and non-negative (got " +
                                                std::to_string(nc) + ", " + std::to_string(ns) + ", " +
                                                std::to_string(nth) + ")");
    }
  }

  double alpha() const { return std::sqrt(nc); }
  /// Squeeze parameter r (negative by convention).
  double squeeze_r() const { return -std::asinh(std::sqrt(ns)); }
  /// A = √ns + √(ns+1) >= 1.
  double squeeze_factor() const { return std::sqrt(ns) + std::sqrt(ns + 1.0); }
  /// T² = 1 + 2 nth >= 1.
  double thermal_factor() const { return 1.0 + 2.0 * nth; }
  /// ⟨a_V† a_V⟩ = ns + nth + 2 ns nth.
  double mean_v() const { return ns + nth + 2.0 * ns * nth; }

  friend bool operator==(const StateParams&, const StateParams&) = default;
};

struct StokesSummary {
  double s0 = 0.0;
  double sx = 0.0;
  double var_sz = 0.0;
  bool wineland_squeezed = false;
  double squeezing_db = 0.0;
};

struct QuadratureSummary {
  double var_x = 0.0;
  double var_p = 0.0;
  bool p_squeezed = false;
};

/// Threshold n_th²/(2 n_th + 1) above which ns gives Wineland (and p-quadrature) squeezing.
inline double wineland_threshold(double nth) { return nth * nth / (2.0 * nth + 1.0); }

/// n_c → ∞ form of the Wineland criterion: ns > n_th²/(2n_th+1).
inline bool macroscopic_wineland(const StateParams& p) { return p.ns > wineland_threshold(p.nth); }

/// 10·log10(A²/T²): squeezing of var(p) below the vacuum level 1/4.
inline double squeezing_db(const StateParams& p) {
  p.validate();
  const double a = p.squeeze_factor();
  return 10.0 * std::log10(a * a / p.thermal_factor());
}

inline QuadratureSummary quadratures(const StateParams& p) {
  p.validate();
  const double a2 = p.squeeze_factor() * p.squeeze_factor();
  const double t2 = p.thermal_factor();
  QuadratureSummary q;
  q.var_x = t2 * a2 / 4.0;
  q.var_p = t2 / (4.0 * a2);
  q.p_squeezed = p.ns > p.nth * p.nth / (1.0 + 2.0 * p.nth);
  return q;
}

inline StokesSummary stokes_summary(const StateParams& p) {
  p.validate();
  const double nv = p.mean_v();
  const double a = p.squeeze_factor();
  StokesSummary s;
  s.s0 = 0.5 * (p.nc + nv);
  s.sx = 0.5 * (p.nc - nv);
  // (1 + 2ns - 2√(ns(ns+1))) = 1/A²
  s.var_sz = 0.25 * p.nc * p.thermal_factor() / (a * a);
  s.wineland_squeezed = s.var_sz < 0.5 * std::abs(s.sx);
  s.squeezing_db = squeezing_db(p);
  return s;
}

struct Purified {
  StateParams params;  // nth == 0
  double eta = 1.0;
};

/// Pure state plus transmission η such that apply_loss(pure, η) reproduces `p`.
///
/// η = (ns + 2 ns nth − nth²)/(ns + 2 ns nth + nth), nc' = nc/η, ns' = (ns + 2 ns nth + nth)/η.
inline Purified purify(const StateParams& p) {
  p.validate();
  const double num = p.ns + 2.0 * p.ns * p.nth - p.nth * p.nth;
  const double den = p.ns + 2.0 * p.ns * p.nth + p.nth;
  if (p.nth == 0.0) return {p, 1.0};
  if (!(num > 0.0)) {
    throw Error(ErrorCode::NonPurifiable,
                "ns + 2 ns nth - nth^2 must be positive to write the state as a lossy pure state");
  }
  const double eta = num / den;
  return {StateParams{p.nc / eta, den / eta, 0.0}, eta};
}

/// Polarization-independent loss with transmission η ∈ (0, 1].
///
/// nc → η nc and var(q) → η var(q) + (1−η)/4; the variance pair is inverted back
/// to (ns, nth) via A² = √(var_x/var_p), T² = 4√(var_x var_p).
inline StateParams apply_loss(const StateParams& p, double eta) {
  p.validate();
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "transmission must lie in (0, 1]");
  }
  if (eta == 1.0) return p;
  const auto q = quadratures(p);
  const double vx = eta * q.var_x + 0.25 * (1.0 - eta);
  const double vp = eta * q.var_p + 0.25 * (1.0 - eta);
  const double a2 = std::sqrt(vx / vp);
  const double t2 = 4.0 * std::sqrt(vx * vp);
  const double a = std::sqrt(a2);
  const double root_ns = 0.5 * (a - 1.0 / a);
  StateParams out{eta * p.nc, root_ns * root_ns, std::max(0.0, 0.5 * (t2 - 1.0))};
  return out;
}

}  // namespace polsq
