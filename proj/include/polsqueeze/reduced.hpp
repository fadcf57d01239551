#pragma once

// Two-photon reduced observable density matrix ℛ^(2,N) = Tr_{N−2} ℛ^(N).
//
// Tracing N−2 photons of the permutation-symmetric R^(N) leaves, for the pair
// V counts (r, s),
//
//   R(r, s) = Σ_{m=0}^{N−2} C(N−2, m) n_c^{N − m − (r+s)/2} E_{r+m, s+m}
//
// which needs only the |n − m| <= 2 band of the correlation table.

#include "polsqueeze/correlators.hpp"
#include "polsqueeze/error.hpp"
#include "polsqueeze/real.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace polsq {

/// Normalized 4×4 matrix over (HH, HV, VH, VV). `n` is the source photon
/// count, or 0 for a photon-number-averaged state.
struct TwoBodyOdm {
  int n = 0;
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();

  bool averaged() const { return n == 0; }
};

namespace detail {

inline constexpr int kPairPopcount[4] = {0, 1, 1, 2};

inline Eigen::Matrix4d expand_pair(const double t[3][3]) {
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = t[kPairPopcount[i]][kPairPopcount[j]];
  return m;
}

// Unnormalized R(r, s) table plus trace, from a table covering orders up to N.
struct PairTable {
  Real r[3][3];
  Real trace;
};

inline PairTable pair_sum(const CorrelationTable& e, double nc, int n_photons) {
  const Real ncr(nc);
  // n_c^{N−m−(r+s)/2} with (r+s)/2 ∈ {0, 1, 2}; keep powers k = N − m − q.
  std::vector<Real> nc_pow(n_photons + 1);
  nc_pow[0] = 1;
  for (int k = 1; k <= n_photons; ++k) nc_pow[k] = nc_pow[k - 1] * ncr;
  PairTable out;
  for (auto& row : out.r)
    for (auto& x : row) x = 0;
  Real binom(1);  // C(N−2, m)
  for (int m = 0; m <= n_photons - 2; ++m) {
    if (m > 0) binom = binom * (n_photons - 2 - m + 1) / m;
    for (int r = 0; r <= 2; ++r) {
      for (int s = r; s <= 2; s += 2) {
        out.r[r][s] += binom * nc_pow[n_photons - m - (r + s) / 2] * e(r + m, s + m);
      }
    }
  }
  out.r[2][0] = out.r[0][2];
  out.trace = out.r[0][0] + 2 * out.r[1][1] + out.r[2][2];
  return out;
}

inline TwoBodyOdm normalize_pair(const PairTable& t, int n) {
  if (!(t.trace > 0)) throw Error(ErrorCode::NotAState, "two-body trace is not positive");
  double d[3][3];
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) d[r][s] = to_double(t.r[r][s] / t.trace);
  return {n, expand_pair(d)};
}

inline void check_pair_photons(int n) {
  if (n < 2) throw Error(ErrorCode::TooFewPhotons, "need at least two photons (got " + std::to_string(n) + ")");
  if (n > 10000) throw Error(ErrorCode::OrderTooLarge, "N above 10^4 is not supported");
}

}  // namespace detail

/// ℛ^(2,N); cost O(N²) for the correlation band plus O(N) for the sum.
inline TwoBodyOdm reduced_two_body(const StateParams& p, int n_photons) {
  p.validate();
  detail::check_pair_photons(n_photons);
  const CorrelationTable e(p, n_photons, 2);
  return detail::normalize_pair(detail::pair_sum(e, p.nc, n_photons), n_photons);
}

/// P_N for the pure state (n_th = 0): Poisson(n_c) convolved with the
/// squeezed-vacuum law P(2k) = C(2k, k) 4^{−k} n_s^k (1 + n_s)^{−k−1/2}.
inline double photon_number_distribution(const StateParams& p, int n) {
  p.validate();
  if (p.nth != 0.0) throw Error(ErrorCode::UnsupportedThermal, "photon-number law requires n_th = 0");
  if (n < 0) return 0.0;
  auto log_poisson = [&](int k) -> double {
    if (p.nc == 0.0) return k == 0 ? 0.0 : -INFINITY;
    return -p.nc + k * std::log(p.nc) - std::lgamma(k + 1.0);
  };
  auto log_squeezed = [&](int pairs) -> double {
    if (p.ns == 0.0) return pairs == 0 ? 0.0 : -INFINITY;
    return std::lgamma(2.0 * pairs + 1.0) - 2.0 * std::lgamma(pairs + 1.0) - 2.0 * pairs * std::log(2.0) +
           pairs * std::log(p.ns) - (pairs + 0.5) * std::log1p(p.ns);
  };
  double sum = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    const double lp = log_poisson(n - 2 * k) + log_squeezed(k);
    if (std::isfinite(lp)) sum += std::exp(lp);
  }
  return sum;
}

/// Weights used to average ℛ^(2,N) over the detected photon number.
enum class WeightMode {
  Convolution,   // full P_N (coherent ⊗ squeezed vacuum)
  CoherentOnly,  // Poisson(n_c) alone
};

/// Support [lo, hi] outside of which P_N is below ~1e-18. The squeezed part
/// decays geometrically in pairs with ratio n_s / (1 + n_s).
inline std::pair<int, int> photon_number_support(const StateParams& p) {
  const double mean = p.nc + p.ns;
  const double sd = std::sqrt(p.nc + 2.0 * p.ns * (p.ns + 1.0));
  const int lo = std::max(0, static_cast<int>(std::floor(mean - 10.0 * sd - 10.0)));
  const double pairs = p.ns > 0.0 ? (18.0 * std::log(10.0) + 5.0) / std::log1p(1.0 / p.ns) : 0.0;
  const int hi = static_cast<int>(std::ceil(p.nc + 10.0 * std::sqrt(p.nc) + 30.0 + 2.0 * pairs));
  return {lo, hi};
}

/// Σ_N P_N ℛ^(2,N) over N >= 2, renormalized over the retained support.
inline TwoBodyOdm averaged_two_body(const StateParams& p, WeightMode mode = WeightMode::Convolution) {
  p.validate();
  if (p.nth != 0.0) throw Error(ErrorCode::UnsupportedThermal, "averaging requires n_th = 0");
  auto [lo, hi] = photon_number_support(p);
  lo = std::max(lo, 2);
  hi = std::max(hi, lo);
  const CorrelationTable e(p, hi, 2);
  const StateParams coherent{p.nc, 0.0, 0.0};
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  double weight_sum = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const double w =
        mode == WeightMode::Convolution ? photon_number_distribution(p, n) : photon_number_distribution(coherent, n);
    if (w < 1e-300) continue;
    acc += w * detail::normalize_pair(detail::pair_sum(e, p.nc, n), n).matrix;
    weight_sum += w;
  }
  if (!(weight_sum > 0.0)) throw Error(ErrorCode::NotAState, "no photon-number weight at N >= 2");
  return {0, acc / weight_sum};
}

}  // namespace polsq
