#pragma once

// Entanglement depth from the collective-spin mean and variance.
//
// The Stokes vector plays the role of a collective spin with N_A = 2⟨S_0⟩
// spin-½ particles, J_z ↔ S_x and var(J_x) ↔ var(S_z). Per particle,
//
//   𝒱 = var(S_z)/S_0,   𝒵 = S_x/S_0,
//
// and the large-J boundary of spin-J states gives the block size
//
//   J = (1 − 2𝒱)² / (8𝒱 (1 − 𝒵)),   k = 2J,
//
// with S_0 (1 − 𝒵) = ⟨S_0 − S_x⟩ = n_s + n_th + 2 n_s n_th the defect.

#include "polsqueeze/error.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace polsq {

struct DepthResult {
  double k = 1.0;         // not floored; 1 means no entanglement implied
  double fraction = 0.0;  // k / (2 S_0)
  double v = 0.0;         // 𝒱
  double defect = 0.0;    // ⟨S_0 − S_x⟩
};

inline DepthResult depth_large_j(const StateParams& p) {
  const StokesSummary s = stokes_summary(p);
  DepthResult r;
  r.defect = s.s0 - s.sx;
  if (s.s0 <= 0.0) return r;
  r.v = s.var_sz / s.s0;
  r.fraction = 1.0 / (2.0 * s.s0);
  if (!s.wineland_squeezed || r.v >= 0.5 || r.v <= 0.0 || r.defect <= 0.0) return r;
  const double one_minus_z = r.defect / s.s0;
  const double j = (1.0 - 2.0 * r.v) * (1.0 - 2.0 * r.v) / (8.0 * r.v * one_minus_z);
  r.k = std::max(1.0, 2.0 * j);
  r.fraction = r.k / (2.0 * s.s0);
  return r;
}

/// lim_{n_c→∞} k/(2⟨S_0⟩) = (1 − T²/A²)² / (4 (T²/A²) n_V); zero (grey) when A² <= T².
inline double macroscopic_fraction(double ns, double nth) {
  const StateParams p = StateParams::make(0.0, ns, nth);
  const double a2 = p.squeeze_factor() * p.squeeze_factor();
  const double ratio = p.thermal_factor() / a2;
  if (ratio >= 1.0) return 0.0;
  return (1.0 - ratio) * (1.0 - ratio) / (4.0 * ratio * p.mean_v());
}

inline bool macroscopic_grey(double ns, double nth) {
  const StateParams p = StateParams::make(0.0, ns, nth);
  return p.squeeze_factor() * p.squeeze_factor() <= p.thermal_factor();
}

struct SpinBoundaryPoint {
  double mu = 0.0;
  double jz = 0.0;   // ⟨j_z⟩
  double jx2 = 0.0;  // ⟨j_x²⟩
  int d = 0;         // subspace depth used
};

namespace detail {

// Lowest eigenpair of j_x² − μ j_z on one parity chain m = top, top−2, …
// (at most `len` states) of a spin J. Returns (energy, ⟨j_z⟩).
inline std::pair<double, double> chain_ground(double J, double mu, double top, int len) {
  const double jj = J * (J + 1.0);
  std::vector<double> ms;
  for (int i = 0; i < len; ++i) {
    const double m = top - 2.0 * i;
    if (m < -J - 1e-9) break;
    ms.push_back(m);
  }
  const int n = static_cast<int>(ms.size());
  if (n == 0) return {INFINITY, 0.0};
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int i = 0; i < n; ++i) diag(i) = 0.5 * (jj - ms[i] * ms[i]) - mu * ms[i];
  for (int i = 0; i + 1 < n; ++i) {
    const double mm = ms[i + 1];  // lower m of the coupled pair
    sub(i) = 0.25 * std::sqrt(std::max(0.0, (jj - mm * (mm + 1.0)) * (jj - (mm + 1.0) * (mm + 2.0))));
  }
  if (n == 1) return {diag(0), ms[0]};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  const Eigen::VectorXd psi = es.eigenvectors().col(0);
  double jz = 0.0;
  for (int i = 0; i < n; ++i) jz += psi(i) * psi(i) * ms[i];
  return {es.eigenvalues()(0), jz};
}

// Ground state restricted to J − d <= m <= J.
inline std::pair<double, double> truncated_ground(double J, double mu, int d) {
  const int span = d + 1;
  const auto a = chain_ground(J, mu, J, (span + 1) / 2);
  const auto b = chain_ground(J, mu, J - 1.0, span / 2);
  return a.first <= b.first ? a : b;
}

}  // namespace detail

/// Minimizer of ⟨j_x² − μ j_z⟩ for spin J on the subspace J − d <= m <= J,
/// d = 8, 16, … until the ground value moves by < 1e-10.
inline SpinBoundaryPoint large_j_boundary_point(double J, double mu) {
  if (!(J >= 0.5) || std::abs(2.0 * J - std::round(2.0 * J)) > 1e-9) {
    throw Error(ErrorCode::InvalidParams, "J must be a positive half-integer");
  }
  const int full = static_cast<int>(std::lround(2.0 * J));
  int d = std::min(8, full);
  auto g = detail::truncated_ground(J, mu, d);
  while (d < full) {
    const int next = std::min(2 * d, full);
    const auto g2 = detail::truncated_ground(J, mu, next);
    const bool done = std::abs(g2.first - g.first) < 1e-10;
    g = g2;
    d = next;
    if (done) break;
  }
  return {mu, g.second, g.first + mu * g.second, d};
}

namespace detail {

// υ_min(ζ; J) with υ = ⟨j_x²⟩/J and ζ = ⟨j_z⟩/J on the μ-parametrized boundary.
inline double upsilon_min(double J, double zeta) {
  constexpr int kPoints = 400;
  const double log_lo = std::log(1e-4), log_hi = std::log(1e4);
  auto at = [&](double log_mu) { return large_j_boundary_point(J, std::exp(log_mu)); };
  std::vector<SpinBoundaryPoint> pts(kPoints);
  for (int i = 0; i < kPoints; ++i) pts[i] = at(log_lo + (log_hi - log_lo) * i / (kPoints - 1));
  if (zeta <= pts.front().jz / J) return pts.front().jx2 / J;
  if (zeta >= pts.back().jz / J) return pts.back().jx2 / J;
  for (int i = 0; i + 1 < kPoints; ++i) {
    const double z0 = pts[i].jz / J, z1 = pts[i + 1].jz / J;
    if (!(z0 <= zeta && zeta <= z1)) continue;
    double a = std::log(pts[i].mu), b = std::log(pts[i + 1].mu);
    SpinBoundaryPoint lo = pts[i];
    for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
      const double mid = 0.5 * (a + b);
      const SpinBoundaryPoint pm = at(mid);
      if (pm.jz / J < zeta) {
        a = mid;
        lo = pm;
      } else {
        b = mid;
      }
    }
    return lo.jx2 / J;
  }
  return pts.back().jx2 / J;
}

}  // namespace detail

/// Least half-integer J <= j_max whose spin-J boundary admits (υ, ζ), i.e.
/// υ >= υ_min(ζ; J). Throws NotReachable if none does.
inline double depth_exact_small_j(double upsilon, double zeta, double j_max = 200.0) {
  if (!(upsilon > 0.0) || !(zeta > 0.0 && zeta <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "need upsilon > 0 and 0 < zeta <= 1");
  }
  if (!(j_max >= 0.5 && j_max <= 200.0)) throw Error(ErrorCode::InvalidParams, "j_max must lie in [1/2, 200]");
  auto admitted = [&](int twice_j) { return upsilon >= detail::upsilon_min(0.5 * twice_j, zeta) - 1e-12; };
  int lo = 1, hi = static_cast<int>(std::floor(2.0 * j_max + 1e-9));
  if (!admitted(hi)) {
    throw Error(ErrorCode::NotReachable, "point not admitted for any J <= " + std::to_string(j_max));
  }
  if (admitted(lo)) return 0.5;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (admitted(mid)) hi = mid;
    else lo = mid;
  }
  return 0.5 * hi;
}

struct ContourCell {
  double ns = 0.0;
  double nth = 0.0;
  double fraction = 0.0;
  bool grey = false;
};

struct Range {
  double lo = 1e-3;
  double hi = 10.0;
};

/// Macroscopic-limit fractions on a log-spaced resolution × resolution grid
/// (n_th outer, n_s inner).
inline std::vector<ContourCell> contour_data(Range nth_range, Range ns_range, int resolution) {
  auto check = [](Range r) {
    if (!(r.lo >= 1e-3 && r.hi <= 10.0 && r.lo <= r.hi)) {
      throw Error(ErrorCode::InvalidParams, "contour ranges must lie within [1e-3, 10]");
    }
  };
  check(nth_range);
  check(ns_range);
  if (resolution < 2) throw Error(ErrorCode::InvalidParams, "resolution must be at least 2");
  auto grid = [&](Range r, int i) {
    return std::exp(std::log(r.lo) + (std::log(r.hi) - std::log(r.lo)) * i / (resolution - 1));
  };
  std::vector<ContourCell> out;
  out.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i) {
    const double nth = grid(nth_range, i);
    for (int j = 0; j < resolution; ++j) {
      const double ns = grid(ns_range, j);
      out.push_back({ns, nth, macroscopic_fraction(ns, nth), macroscopic_grey(ns, nth)});
    }
  }
  return out;
}

}  // namespace polsq
