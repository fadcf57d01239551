#pragma once

// Pairwise and bipartite entanglement measures on observable density matrices.

#include "polsqueeze/error.hpp"
#include "polsqueeze/odm.hpp"
#include "polsqueeze/reduced.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace polsq {

inline void check_two_qubit_state(const Eigen::Matrix4d& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotAState, "trace deviates from 1 by more than 1e-9");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(0.5 * (rho + rho.transpose()));
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw Error(ErrorCode::NotAState, "negative eigenvalue below -1e-9");
  }
}

/// Wootters concurrence max(0, λ1 − λ2 − λ3 − λ4), λ the square roots of the
/// eigenvalues of √ρ (σy⊗σy) ρ* (σy⊗σy) √ρ in decreasing order.
inline double concurrence(const Eigen::Matrix4d& rho) {
  check_two_qubit_state(rho);
  const Eigen::Matrix4d sym = 0.5 * (rho + rho.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym);
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4d root = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  Eigen::Matrix4d flip = Eigen::Matrix4d::Zero();
  flip(0, 3) = flip(3, 0) = -1.0;
  flip(1, 2) = flip(2, 1) = 1.0;
  const Eigen::Matrix4d tilde = flip * sym * flip;  // real ρ: ρ* = ρ
  const Eigen::Matrix4d r = root * tilde * root;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es2(0.5 * (r + r.transpose()), Eigen::EigenvaluesOnly);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

inline double concurrence(const TwoBodyOdm& t) { return concurrence(t.matrix); }

/// X-state closed form 2 max(0, |ρ03| − √(ρ11 ρ22), |ρ12| − √(ρ00 ρ33)).
inline double x_state_concurrence(const Eigen::Matrix4d& rho) {
  const double a = std::abs(rho(0, 3)) - std::sqrt(std::max(0.0, rho(1, 1) * rho(2, 2)));
  const double b = std::abs(rho(1, 2)) - std::sqrt(std::max(0.0, rho(0, 0) * rho(3, 3)));
  return 2.0 * std::max({0.0, a, b});
}

/// Monogamy bound 1/√(N−1) on pairwise concurrence in a symmetric N-party state.
inline double concurrence_bound(int n_photons) {
  if (n_photons < 2) throw Error(ErrorCode::TooFewPhotons, "bound needs N >= 2");
  return 1.0 / std::sqrt(static_cast<double>(n_photons - 1));
}

struct DeltaResult {
  double delta = 0.0;
  bool ppt_negative = false;
};

/// Δ = |ρ_{HH,VV}| − ρ_{HV,VH}. Equivalent to a negative partial transpose when
/// ρ_{HV,VH}² <= ρ_{HH,HH} ρ_{VV,VV}, which holds for every matrix built here.
inline DeltaResult delta_criterion(const Eigen::Matrix4d& rho) {
  const double d = std::abs(rho(0, 3)) - rho(1, 2);
  return {d, d > 0.0};
}

inline DeltaResult delta_criterion(const TwoBodyOdm& t) { return delta_criterion(t.matrix); }

/// Smallest eigenvalue of the partial transpose over the first qubit.
inline double partial_transpose_min_eigenvalue(const Eigen::Matrix4d& rho) {
  const Eigen::MatrixXd pt = partial_transpose_leading(rho, 2, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (pt + pt.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct EntanglementReport {
  double concurrence = 0.0;
  double c_max = 0.0;
  double ratio = 0.0;
  double delta = 0.0;
  bool ppt_negative = false;
  double pt_min_eigenvalue = 0.0;
};

/// Report for ℛ^(2,N); `n_photons` sets the monogamy bound (needed for averaged states).
inline EntanglementReport make_report(const TwoBodyOdm& t, int n_photons) {
  EntanglementReport r;
  r.concurrence = concurrence(t.matrix);
  r.c_max = concurrence_bound(n_photons);
  r.ratio = r.concurrence / r.c_max;
  const auto d = delta_criterion(t.matrix);
  r.delta = d.delta;
  r.ppt_negative = d.ppt_negative;
  r.pt_min_eigenvalue = partial_transpose_min_eigenvalue(t.matrix);
  return r;
}

inline EntanglementReport make_report(const TwoBodyOdm& t) { return make_report(t, t.n); }

struct NsOptimum {
  double ns = 0.0;
  double concurrence = 0.0;
};

/// argmax over n_s ∈ (0, 2] of C(ℛ^(2,N)): 40-point scan, then golden section
/// on the bracket around the best scan point down to width 1e-4.
inline NsOptimum optimize_ns_for_concurrence(double nc, double nth, int n_photons) {
  if (!(nc > 0.0)) throw Error(ErrorCode::InvalidParams, "n_c must be positive");
  auto f = [&](double ns) { return concurrence(reduced_two_body(StateParams::make(nc, ns, nth), n_photons)); };
  constexpr int kScan = 40;
  constexpr double kHi = 2.0;
  std::array<double, kScan> val{};
  int best = 0;
  for (int i = 0; i < kScan; ++i) {
    val[i] = f(kHi * (i + 1) / kScan);
    if (val[i] > val[best]) best = i;
  }
  double lo = kHi * best / kScan;  // grid point i sits at (i + 1)/kScan · kHi
  double hi = kHi * std::min(best + 2, kScan) / kScan;
  if (best == kScan - 1) hi = kHi;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  NsOptimum out{0.5 * (lo + hi), 0.0};
  out.concurrence = f(out.ns);
  const double grid_ns = kHi * (best + 1) / kScan;
  if (val[best] > out.concurrence) out = {grid_ns, val[best]};
  return out;
}

/// Σ |negative eigenvalues| of the partial transpose of ℛ^(N) across the
/// first-k / remaining cut. Dense; N <= 6.
inline double bipartition_negativity(const Odm& odm, int cut_size) {
  const int n = odm.n();
  if (n > 6) throw Error(ErrorCode::DimensionTooLarge, "negativity limited to N <= 6");
  if (cut_size < 1 || 2 * cut_size > n) {
    throw Error(ErrorCode::IndexOutOfRange, "cut size must satisfy 1 <= k <= N/2");
  }
  const Eigen::MatrixXd pt = partial_transpose_leading(odm.dense(true), n, cut_size);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (pt + pt.transpose()), Eigen::EigenvaluesOnly);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < 0.0) neg -= es.eigenvalues()(i);
  return neg;
}

}  // namespace polsq
