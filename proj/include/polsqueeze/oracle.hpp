#pragma once

// Brute-force reference: the V mode as a truncated Fock-space density matrix,
// built with a dense matrix exponential for the squeeze operator. Everything
// here is independent of the phase-space closed forms in correlators.hpp and
// exists to cross-check them.

#include "polsqueeze/error.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace polsq {

inline constexpr int kDefaultFockCutoff = 40;

struct FockState {
  int cutoff = 0;
  Eigen::MatrixXd rho_v;  // real under the α, r real convention
  double alpha = 0.0;
  double trace_deficit = 0.0;
};

/// Smallest cutoff (>= 40) at which the number-distribution tail carries a
/// relative share below `tol` of the moment ⟨n^{moment_order/2}⟩.
///
/// The distribution decays like q^n with q = (ν−1)/(ν+1), ν = T²A² the larger
/// quadrature variance in vacuum units; 20% plus 10 levels of margin cover the
/// non-geometric prefactor.
inline int recommended_cutoff(double ns, double nth, int moment_order = 12, double tol = 1e-12) {
  const double a = std::sqrt(ns) + std::sqrt(ns + 1.0);
  const double nu = (1.0 + 2.0 * nth) * a * a;
  if (nu <= 1.0) return kDefaultFockCutoff;
  const double log_q = std::log((nu - 1.0) / (nu + 1.0));
  const int k = std::max(0, moment_order / 2);
  auto log_term = [&](int n) { return n * log_q + k * std::log(n + 1.0); };
  // Σ_n q^n (n+1)^k, accumulated until terms are negligible.
  std::vector<double> terms;
  double peak = -INFINITY;
  for (int n = 0;; ++n) {
    const double lt = log_term(n);
    peak = std::max(peak, lt);
    terms.push_back(lt);
    if (n > 10 && lt < peak + std::log(tol) - 40.0) break;
  }
  double total = 0.0;
  for (double lt : terms) total += std::exp(lt - peak);
  double tail = 0.0;
  int c = static_cast<int>(terms.size()) - 1;
  while (c > 0 && tail + std::exp(terms[c] - peak) <= tol * total) tail += std::exp(terms[c--] - peak);
  return std::max(kDefaultFockCutoff, static_cast<int>(std::ceil(1.2 * c)) + 10);
}

namespace detail {

inline Eigen::MatrixXd annihilation(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

}  // namespace detail

/// ρ_V = Ŝ(r) ρ_th Ŝ†(r) with Ŝ(r) = exp[(r/2)(a² − a†²)], r = −asinh(√ns).
///
/// The exponential is taken in a space padded by cutoff/4 + 40 levels and the
/// result truncated to `cutoff` levels; throws CutoffTooSmall if the lost trace
/// exceeds 1e-10.
inline FockState build_squeezed_thermal(double ns, double nth, int cutoff = kDefaultFockCutoff) {
  StateParams::make(0.0, ns, nth);
  if (cutoff < 2) throw Error(ErrorCode::CutoffTooSmall, "cutoff must be at least 2");
  const int dim = cutoff + cutoff / 4 + 40;
  const Eigen::MatrixXd a = detail::annihilation(dim);
  const Eigen::MatrixXd a2 = a * a;
  const double r = -std::asinh(std::sqrt(ns));
  const Eigen::MatrixXd generator = 0.5 * r * (a2 - a2.transpose());
  const Eigen::MatrixXd squeeze = generator.exp();

  Eigen::MatrixXd thermal = Eigen::MatrixXd::Zero(dim, dim);
  if (nth == 0.0) {
    thermal(0, 0) = 1.0;
  } else {
    const double ratio = nth / (1.0 + nth);
    double pop = 1.0 / (1.0 + nth);
    for (int n = 0; n < dim; ++n, pop *= ratio) thermal(n, n) = pop;
  }
  const Eigen::MatrixXd full = squeeze * thermal * squeeze.transpose();

  FockState s;
  s.cutoff = cutoff;
  s.rho_v = full.topLeftCorner(cutoff, cutoff);
  s.trace_deficit = std::max(0.0, 1.0 - s.rho_v.trace());
  if (s.trace_deficit > 1e-10) {
    throw Error(ErrorCode::CutoffTooSmall, "trace deficit " + std::to_string(s.trace_deficit) +
                                               " at cutoff " + std::to_string(cutoff));
  }
  return s;
}

/// As above, plus the coherent amplitude of the H mode.
inline FockState build_fock_state(const StateParams& p, int cutoff = kDefaultFockCutoff) {
  FockState s = build_squeezed_thermal(p.ns, p.nth, cutoff);
  s.alpha = p.alpha();
  return s;
}

/// Tr[ρ_V (a†)^m a^n] by explicit matrix products.
inline std::complex<double> oracle_correlation(const FockState& s, int m, int n) {
  if (m < 0 || n < 0) throw Error(ErrorCode::IndexOutOfRange, "orders must be non-negative");
  if (2 * (m + n) > s.cutoff) {
    throw Error(ErrorCode::CutoffTooSmall, "m + n must not exceed cutoff/2");
  }
  const Eigen::MatrixXd a = detail::annihilation(s.cutoff);
  Eigen::MatrixXd op = Eigen::MatrixXd::Identity(s.cutoff, s.cutoff);
  for (int k = 0; k < m; ++k) op = op * a.transpose();
  for (int k = 0; k < n; ++k) op = op * a;
  return {(s.rho_v * op).trace(), 0.0};
}

/// ⟨α|(a†)^j a^k|α⟩ evaluated on a truncated coherent-state vector.
inline std::complex<double> coherent_moment_truncated(double alpha, int j, int k, int cutoff) {
  Eigen::VectorXd psi(cutoff);
  double amp = std::exp(-0.5 * alpha * alpha);
  for (int n = 0; n < cutoff; ++n) {
    psi(n) = amp;
    amp *= alpha / std::sqrt(double(n + 1));
  }
  const Eigen::MatrixXd a = detail::annihilation(cutoff);
  Eigen::VectorXd left = psi, right = psi;
  for (int i = 0; i < j; ++i) left = a * left;
  for (int i = 0; i < k; ++i) right = a * right;
  return {left.dot(right), 0.0};
}

/// Unnormalized R^(N) over the H/V computational basis (bit = 1 ↔ V, most
/// significant bit = first photon): ⟨a†_{π_i^1} … a†_{π_i^N} a_{π_j^N} … a_{π_j^1}⟩
/// on ρ_H ⊗ ρ_V. Mode operators commute across modes, so each entry is
/// α^{#H(i)+#H(j)} times a V-mode moment taken from Fock matrix products.
inline Eigen::MatrixXd oracle_odm(const FockState& s, int n_photons) {
  if (n_photons < 1 || n_photons > 5) {
    throw Error(ErrorCode::DimensionTooLarge, "oracle_odm supports 1 <= N <= 5");
  }
  const int dim = 1 << n_photons;
  const Eigen::MatrixXd a = detail::annihilation(s.cutoff);
  const Eigen::MatrixXd ad = a.transpose();
  // V-mode moments Tr[ρ_V (a†)^v a^w], v, w <= N.
  Eigen::MatrixXd v_moment(n_photons + 1, n_photons + 1);
  Eigen::MatrixXd left = s.rho_v;  // ρ_V (a†)^v
  for (int v = 0; v <= n_photons; ++v) {
    Eigen::MatrixXd op = left;
    for (int w = 0; w <= n_photons; ++w) {
      v_moment(v, w) = op.trace();
      op = op * a;
    }
    left = left * ad;
  }
  Eigen::MatrixXd out(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      int v_i = 0, v_j = 0;
      double h_factor = 1.0;
      for (int l = 0; l < n_photons; ++l) {
        const int bit = n_photons - 1 - l;
        if ((i >> bit) & 1) ++v_i;
        else h_factor *= s.alpha;
        if ((j >> bit) & 1) ++v_j;
        else h_factor *= s.alpha;
      }
      out(i, j) = h_factor * v_moment(v_i, v_j);
    }
  }
  return out;
}

inline Eigen::MatrixXd oracle_odm(const StateParams& p, int n_photons, int cutoff = kDefaultFockCutoff) {
  p.validate();
  return oracle_odm(build_fock_state(p, cutoff), n_photons);
}

}  // namespace polsq
