#pragma once

// Observable N-photon density matrix over the H/V computational basis.
//
// Basis index i ∈ [0, 2^N): bit = 1 means V, the most significant bit is the
// first photon. Because ρ = |α⟩⟨α|_H ⊗ ρ_V with real α, every Glauber
// correlation factors mode by mode:
//
//   ⟨a†_{π_i^1} … a†_{π_i^N} a_{π_j^N} … a_{π_j^1}⟩
//     = ⟨(a_H†)^{N−v_i} a_H^{N−v_j}⟩ ⟨(a_V†)^{v_i} a_V^{v_j}⟩
//     = α^{2N − v_i − v_j} E_{v_i, v_j}
//
// with v_i = popcount(i). Operators on different modes commute, so the order
// inside the string does not matter beyond normal ordering. Only the
// (N+1)×(N+1) table f(v, w) is stored; the dense matrix is expanded on demand.

#include "polsqueeze/correlators.hpp"
#include "polsqueeze/error.hpp"
#include "polsqueeze/real.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace polsq {

inline constexpr int kMaxOdmPhotons = 14;
inline constexpr int kMaxDensePhotons = 12;

using Setting = std::complex<double>;
/// Per-photon polarization state (amplitude on H, amplitude on V).
struct PolarizationState {
  Setting h{1.0, 0.0};
  Setting v{0.0, 0.0};

  static PolarizationState horizontal() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static PolarizationState vertical() { return {{0.0, 0.0}, {1.0, 0.0}}; }
};

class Odm {
 public:
  /// Compressed table for N photons with V counts up to `max_v` (entries with
  /// a larger V count are treated as zero). Used directly by the sampler,
  /// which needs large N but only the low-V corner.
  static Odm from_table(const StateParams& p, int n_photons, int max_v) {
    p.validate();
    max_v = std::clamp(max_v, 0, std::max(n_photons, 0));
    return from_correlations(CorrelationTable(p, max_v, max_v), p.nc, n_photons, max_v);
  }

  /// As above, reusing a table whose order and offset band cover max_v.
  static Odm from_correlations(const CorrelationTable& e, double nc_value, int n_photons, int max_v) {
    if (n_photons < 1) throw Error(ErrorCode::TooFewPhotons, "N must be at least 1");
    max_v = std::clamp(max_v, 0, n_photons);
    if (e.max_order() < max_v || e.max_offset() < max_v) {
      throw Error(ErrorCode::OrderTooLarge, "correlation table too small for max_v");
    }
    const StateParams p{nc_value, e.params().ns, e.params().nth};
    p.validate();
    Odm o;
    o.params_ = p;
    o.n_ = n_photons;
    o.max_v_ = max_v;
    const Real nc(p.nc);
    std::vector<Real> nc_pow(n_photons + 1);
    nc_pow[0] = 1;
    for (int k = 1; k <= n_photons; ++k) nc_pow[k] = nc_pow[k - 1] * nc;
    o.table_.assign(static_cast<std::size_t>(max_v + 1) * (max_v + 1), Real(0));
    for (int v = 0; v <= max_v; ++v) {
      for (int w = v; w <= max_v; w += 2) {
        const Real f = nc_pow[n_photons - (v + w) / 2] * e(v, w);
        o.table_[o.slot(v, w)] = f;
        o.table_[o.slot(w, v)] = f;
      }
    }
    Real tr(0);
    FactorialTable fact(n_photons);
    for (int v = 0; v <= max_v; ++v) tr += fact.binomial(n_photons, v) * o.table_[o.slot(v, v)];
    if (!(tr > 0)) throw Error(ErrorCode::NotAState, "ODM trace is not positive");
    o.trace_ = tr;
    return o;
  }

  int n() const { return n_; }
  int max_v() const { return max_v_; }
  bool truncated() const { return max_v_ < n_; }
  const StateParams& params() const { return params_; }
  const Real& trace() const { return trace_; }

  /// f(v, w): raw entry shared by every (i, j) with popcounts (v, w).
  Real raw(int v, int w) const {
    check_counts(v, w);
    if (v > max_v_ || w > max_v_) return Real(0);
    return table_[slot(v, w)];
  }
  /// f(v, w) / Tr R.
  double normalized(int v, int w) const { return to_double(raw(v, w) / trace_); }
  long double normalized_ld(int v, int w) const { return to_long_double(raw(v, w) / trace_); }

  /// Normalized (N+1)×(N+1) compressed table.
  Eigen::MatrixXd compressed() const {
    Eigen::MatrixXd t(n_ + 1, n_ + 1);
    for (int v = 0; v <= n_; ++v)
      for (int w = 0; w <= n_; ++w) t(v, w) = normalized(v, w);
    return t;
  }

  /// Dense 2^N × 2^N matrix; normalized by default.
  Eigen::MatrixXd dense(bool normalize = true) const {
    if (n_ > kMaxDensePhotons) {
      throw Error(ErrorCode::DimensionTooLarge, "dense ODM limited to N <= " + std::to_string(kMaxDensePhotons));
    }
    Eigen::MatrixXd t(n_ + 1, n_ + 1);
    for (int v = 0; v <= n_; ++v)
      for (int w = 0; w <= n_; ++w) t(v, w) = normalize ? normalized(v, w) : to_double(raw(v, w));
    const int dim = 1 << n_;
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = t(std::popcount(unsigned(i)), std::popcount(unsigned(j)));
    return m;
  }

  /// Copy with every entry of unequal V count removed.
  Odm phase_averaged() const {
    Odm o = *this;
    for (int v = 0; v <= max_v_; ++v)
      for (int w = 0; w <= max_v_; ++w)
        if (v != w) o.table_[slot(v, w)] = Real(0);
    return o;
  }

 private:
  Odm() = default;

  std::size_t slot(int v, int w) const { return static_cast<std::size_t>(v) * (max_v_ + 1) + w; }

  void check_counts(int v, int w) const {
    if (v < 0 || w < 0 || v > n_ || w > n_) {
      throw Error(ErrorCode::IndexOutOfRange, "V count outside [0, N]");
    }
  }

  StateParams params_;
  int n_ = 0;
  int max_v_ = 0;
  Real trace_;
  std::vector<Real> table_;
};

/// R^(N) for 1 <= N <= 14.
inline Odm build_odm(const StateParams& p, int n_photons) {
  if (n_photons > kMaxOdmPhotons) {
    throw Error(ErrorCode::DimensionTooLarge, "build_odm supports N <= " + std::to_string(kMaxOdmPhotons));
  }
  return Odm::from_table(p, n_photons, n_photons);
}

/// Decohered state: coherences between different H-photon numbers removed.
inline Odm phase_average(const Odm& odm) { return odm.phase_averaged(); }

namespace detail {

inline double vacuum_v2(const StateParams& p) { return std::sqrt(p.ns * (p.ns + 1.0)) * p.thermal_factor(); }

inline Eigen::MatrixXd fill_by_popcount(int n, const Eigen::MatrixXd& t) {
  const int dim = 1 << n;
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = t(std::popcount(unsigned(i)), std::popcount(unsigned(j)));
  return m;
}

}  // namespace detail

/// Unnormalized R^(2) assembled from the printed coefficients A_2 … D_2.
inline Eigen::Matrix4d closed_form_r2(const StateParams& p) {
  p.validate();
  const double nc = p.nc, ns = p.ns, nth = p.nth;
  const double a2 = nc * nc;
  const double b2 = nc * (ns + nth + 2 * ns * nth);
  const double c2 = 3 * ns * ns * (1 + 2 * nth) * (1 + 2 * nth) + ns * (1 + 8 * nth + 12 * nth * nth) + 2 * nth * nth;
  const double d2 = nc * detail::vacuum_v2(p);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(3, 3);
  t(0, 0) = a2;
  t(1, 1) = b2;
  t(2, 2) = c2;
  t(0, 2) = t(2, 0) = d2;
  return detail::fill_by_popcount(2, t);
}

/// Unnormalized R^(3) from the coefficients A_3 … F_3, with C_3 = n_c C_2.
inline Eigen::Matrix<double, 8, 8> closed_form_r3(const StateParams& p) {
  p.validate();
  const double nc = p.nc, ns = p.ns, nth = p.nth;
  const double nv = ns + nth + 2 * ns * nth;
  const double c2 = 3 * ns * ns * (1 + 2 * nth) * (1 + 2 * nth) + ns * (1 + 8 * nth + 12 * nth * nth) + 2 * nth * nth;
  const double root = detail::vacuum_v2(p);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4, 4);
  t(0, 0) = nc * nc * nc;
  t(1, 1) = nc * nc * nv;
  t(2, 2) = nc * c2;
  t(3, 3) = 3 * nv * (2 * nth * nth + ns * (1 + 2 * nth) * (3 + 10 * nth) + 5 * (ns + 2 * ns * nth) * (ns + 2 * ns * nth));
  t(0, 2) = t(2, 0) = nc * nc * root;
  t(1, 3) = t(3, 1) = 3 * nc * root * nv;
  return detail::fill_by_popcount(3, t);
}

/// C_3 exactly as typeset, with a single power of (1 + 2 n_th) on the n_s² term.
inline double printed_c3(const StateParams& p) {
  const double ns = p.ns, nth = p.nth;
  return p.nc * (3 * ns * ns * (1 + 2 * nth) + ns * (1 + 8 * nth + 12 * nth * nth) + 2 * nth * nth);
}

/// Born probability ⟨p|ℛ^(N)|p⟩ for the product state p = ⊗ settings.
///
/// With c_v the x^v coefficient of Π_l (h_l + x v_l), the sum over 4^N index
/// pairs collapses to Σ_{v,w} conj(c_v) c_w f(v, w) / Tr R.
inline double born_probability(const Odm& odm, const std::vector<PolarizationState>& settings) {
  const int n = odm.n();
  if (static_cast<int>(settings.size()) != n) {
    throw Error(ErrorCode::IndexOutOfRange, "need one setting per photon");
  }
  for (const auto& s : settings) {
    const double norm = std::norm(s.h) + std::norm(s.v);
    if (std::abs(norm - 1.0) > 1e-9) {
      throw Error(ErrorCode::NonNormalizedSetting, "setting norm deviates from 1");
    }
  }
  std::vector<std::complex<double>> c(n + 1, {0.0, 0.0});
  c[0] = 1.0;
  for (int l = 0; l < n; ++l) {
    for (int k = l + 1; k >= 0; --k) {
      std::complex<double> next = c[k] * settings[l].h;
      if (k > 0) next += c[k - 1] * settings[l].v;
      c[k] = next;
    }
  }
  std::complex<double> sum{0.0, 0.0};
  for (int v = 0; v <= n; ++v) {
    if (c[v] == 0.0) continue;
    for (int w = 0; w <= n; ++w) {
      if ((v - w) % 2 != 0 || c[w] == 0.0) continue;
      sum += std::conj(c[v]) * c[w] * odm.normalized(v, w);
    }
  }
  return sum.real();
}

/// Trace out the leading (most significant) N − keep qubits of a dense matrix.
inline Eigen::MatrixXd partial_trace_leading(const Eigen::MatrixXd& m, int n, int keep) {
  if (keep < 0 || keep > n || m.rows() != (Eigen::Index(1) << n)) {
    throw Error(ErrorCode::IndexOutOfRange, "bad partial trace shape");
  }
  const int kd = 1 << keep;
  const int td = 1 << (n - keep);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(kd, kd);
  for (int t = 0; t < td; ++t)
    for (int i = 0; i < kd; ++i)
      for (int j = 0; j < kd; ++j) out(i, j) += m(t * kd + i, t * kd + j);
  return out;
}

/// Partial transpose of the leading k qubits.
inline Eigen::MatrixXd partial_transpose_leading(const Eigen::MatrixXd& m, int n, int k) {
  if (k < 0 || k > n || m.rows() != (Eigen::Index(1) << n)) {
    throw Error(ErrorCode::IndexOutOfRange, "bad partial transpose shape");
  }
  const int rest = n - k;
  const int rd = 1 << rest;
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Eigen::Index ia = i >> rest, ib = i & (rd - 1);
      const Eigen::Index ja = j >> rest, jb = j & (rd - 1);
      out((ja << rest) | ib, (ia << rest) | jb) = m(i, j);
    }
  }
  return out;
}

}  // namespace polsq
