#pragma once

// Acceptance checks shared by the `verify` subcommand and the acceptance test.

#include "polsqueeze/correlators.hpp"
#include "polsqueeze/depth.hpp"
#include "polsqueeze/detect.hpp"
#include "polsqueeze/entanglement.hpp"
#include "polsqueeze/odm.hpp"
#include "polsqueeze/oracle.hpp"
#include "polsqueeze/reduced.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace polsq {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::int64_t shots = 100000;  // per N in the detection check
  std::uint64_t seed = 1;
};

namespace verify_detail {

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

inline bool near(double x, double target, double tol) { return std::abs(x - target) <= tol; }

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

// Entries (ρ00, |ρ03|, ρ12, ρ33) against printed values.
inline bool matches_print(const Eigen::Matrix4d& r, const double (&want)[4], double tol, std::string& detail) {
  const double got[4] = {r(0, 0), std::abs(r(0, 3)), r(1, 2), r(3, 3)};
  bool ok = true;
  detail += "entries";
  for (int i = 0; i < 4; ++i) {
    ok = ok && near(got[i], want[i], tol);
    detail += " " + fmt("%.5f", got[i]);
  }
  return ok;
}

inline const std::vector<double>& fig4_ns() {
  static const std::vector<double> v{0.01, 0.05, 0.1, 0.3, 0.7, 1.0, 1.7};
  return v;
}
inline const std::vector<int>& fig4_n() {
  static const std::vector<int> v{2, 17, 50, 100};
  return v;
}
/// n_c from N/4 to 4N, log-spaced.
inline std::vector<double> fig4_nc(int n) {
  std::vector<double> out;
  for (int i = 0; i < 9; ++i) out.push_back(n * std::pow(2.0, -2.0 + 0.5 * i));
  return out;
}

inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace verify_detail

inline CriterionResult check_two_body_print() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{1, "two-body matrix at N = 100", false, {}, 0.0};
  const TwoBodyOdm two = reduced_two_body(StateParams::make(100, 0.3, 0), 100);
  const double c = concurrence(two);
  static const double want[4] = {0.9440, 0.0293, 0.0270, 0.0021};
  const bool entries = matches_print(two.matrix, want, 5e-5, r.detail);
  r.seconds = t.seconds();
  r.detail += "; C " + fmt("%.6f", c);
  r.pass = entries && near(c, 0.00468, 1e-5) && r.seconds < 10.0;
  return r;
}

inline CriterionResult check_averaged_print() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{2, "photon-number-averaged two-body matrix", false, {}, 0.0};
  const StateParams p = StateParams::make(100, 0.3, 0);
  const TwoBodyOdm avg = averaged_two_body(p, WeightMode::Convolution);
  const double c = concurrence(avg);
  static const double want[4] = {0.9336, 0.0333, 0.0310, 0.0030};
  const bool entries = matches_print(avg.matrix, want, 5e-5, r.detail);
  r.seconds = t.seconds();
  r.detail += "; C " + fmt("%.6f", c) + "; trace of target " + fmt("%.4f", want[0] + 2 * want[2] + want[3]);
  const TwoBodyOdm poisson = averaged_two_body(p, WeightMode::CoherentOnly);
  r.detail += "; Poisson-only weights:";
  std::string ignored;
  matches_print(poisson.matrix, want, 5e-5, ignored);
  r.detail += ignored.substr(7) + " C " + fmt("%.6f", concurrence(poisson));
  r.pass = entries && near(c, 0.00464, 2e-5) && r.seconds < 60.0;
  return r;
}

inline CriterionResult check_delta_scaling() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{3, "delta * N at optimal n_s", false, {}, 0.0};
  bool ok = true;
  for (int n : {2, 5, 10, 20, 50, 100}) {
    const NsOptimum opt = optimize_ns_for_concurrence(n, 0.0, n);
    const double dn = delta_criterion(reduced_two_body(StateParams::make(n, opt.ns, 0), n)).delta * n;
    ok = ok && dn >= 0.207 && dn <= 0.253;
    r.detail += (r.detail.empty() ? "" : " ") + std::string("N=") + std::to_string(n) + ":" + fmt("%.4f", dn);
  }
  r.seconds = t.seconds();
  r.pass = ok && r.seconds < 300.0;
  return r;
}

inline CriterionResult check_monogamy_ratio() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{4, "C / C_max at N = 100", false, {}, 0.0};
  const EntanglementReport rep = make_report(reduced_two_body(StateParams::make(100, 0.3, 0), 100));
  r.detail = "ratio " + fmt("%.5f", rep.ratio) + ", C_max " + fmt("%.5f", rep.c_max);
  r.pass = near(rep.ratio, 0.047, 0.002);
  r.seconds = t.seconds();
  return r;
}

inline CriterionResult check_oracle_equivalence() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{5, "closed forms vs Fock oracle", false, {}, 0.0};
  const double grid[] = {0.0, 0.1, 0.3, 1.0};
  double worst_e = 0.0, worst_odm = 0.0, worst_cf = 0.0;
  for (double ns : grid) {
    for (double nth : grid) {
      const StateParams p = StateParams::make(0.0, ns, nth);
      const FockState fs = build_squeezed_thermal(ns, nth, recommended_cutoff(ns, nth));
      for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n)
          worst_e = std::max(worst_e, rel_err(to_double(correlation(p, m, n)), oracle_correlation(fs, m, n).real()));
    }
  }
  for (double nc : {0.1, 1.0, 10.0}) {
    for (double ns : grid) {
      for (double nth : {0.0, 0.1}) {
        const StateParams p = StateParams::make(nc, ns, nth);
        const FockState fs = build_fock_state(p, recommended_cutoff(ns, nth));
        for (int n = 1; n <= 3; ++n) {
          const Eigen::MatrixXd raw = build_odm(p, n).dense(false);
          const Eigen::MatrixXd ora = oracle_odm(fs, n);
          for (Eigen::Index i = 0; i < raw.size(); ++i)
            worst_odm = std::max(worst_odm, rel_err(raw.data()[i], ora.data()[i]));
        }
        const Eigen::MatrixXd r2 = build_odm(p, 2).dense(false);
        const Eigen::MatrixXd r3 = build_odm(p, 3).dense(false);
        const Eigen::Matrix4d c2 = closed_form_r2(p);
        const Eigen::Matrix<double, 8, 8> c3 = closed_form_r3(p);
        for (Eigen::Index i = 0; i < 16; ++i) worst_cf = std::max(worst_cf, rel_err(r2.data()[i], c2.data()[i]));
        for (Eigen::Index i = 0; i < 64; ++i) worst_cf = std::max(worst_cf, rel_err(r3.data()[i], c3.data()[i]));
      }
    }
  }
  r.detail = "E " + fmt("%.2e", worst_e) + ", ODM " + fmt("%.2e", worst_odm) + ", closed forms " + fmt("%.2e", worst_cf);
  r.pass = worst_e < 1e-9 && worst_odm < 1e-9 && worst_cf < 1e-12;
  r.seconds = t.seconds();
  return r;
}

/// Twelve purifiable mixed states used by the loss checks: (n_c, n_s, n_th, N).
struct LossCase {
  double nc, ns, nth;
  int n;
};
inline const std::vector<LossCase>& loss_grid() {
  static const std::vector<LossCase> g{
      {1, 0.1, 0.01, 2},   {1, 0.3, 0.05, 3},  {1, 1.0, 0.2, 4},    {10, 0.1, 0.01, 5},
      {10, 0.3, 0.05, 6},  {10, 1.0, 0.2, 8},  {10, 0.5, 0.1, 10},  {50, 0.3, 0.05, 20},
      {50, 1.0, 0.3, 30},  {100, 0.3, 0.05, 50}, {100, 0.5, 0.1, 100}, {100, 2.0, 0.5, 100},
  };
  return g;
}

inline CriterionResult check_loss_invariance() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{6, "loss invariance and purification round trip", false, {}, 0.0};
  double worst = 0.0, worst_trip = 0.0;
  for (const auto& c : loss_grid()) {
    const StateParams p = StateParams::make(c.nc, c.ns, c.nth);
    const Purified pure = purify(p);
    const Eigen::Matrix4d a = reduced_two_body(p, c.n).matrix;
    const Eigen::Matrix4d b = reduced_two_body(pure.params, c.n).matrix;
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    const StateParams back = apply_loss(pure.params, pure.eta);
    const QuadratureSummary q0 = quadratures(p), q1 = quadratures(back);
    worst_trip = std::max({worst_trip, rel_err(back.nc, p.nc), rel_err(q0.var_x, q1.var_x), rel_err(q0.var_p, q1.var_p),
                           rel_err(back.mean_v(), p.mean_v())});
    const Purified again = purify(apply_loss(pure.params, pure.eta));
    worst_trip = std::max({worst_trip, rel_err(again.params.nc, pure.params.nc),
                           rel_err(again.params.ns, pure.params.ns), rel_err(again.eta, pure.eta)});
  }
  r.detail = "max entry diff " + fmt("%.2e", worst) + ", round trip " + fmt("%.2e", worst_trip);
  r.pass = worst < 1e-10 && worst_trip < 1e-12;
  r.seconds = t.seconds();
  return r;
}

inline CriterionResult check_limits() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{7, "Bell and four-term limits", false, {}, 0.0};
  const StateParams p = StateParams::make(0.01, 1e-4, 0.0);
  const Eigen::MatrixXd r2 = build_odm(p, 2).dense();
  Eigen::Vector4d bell(1, 0, 0, 1);
  bell /= std::sqrt(2.0);
  const double f2 = bell.dot(r2 * bell);
  const Eigen::MatrixXd r3 = build_odm(p, 3).dense();
  Eigen::VectorXd ghz = Eigen::VectorXd::Zero(8);
  for (int i : {0b000, 0b011, 0b101, 0b110}) ghz(i) = 0.5;
  const double f3 = ghz.dot(r3 * ghz);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r3, Eigen::EigenvaluesOnly);
  const Eigen::MatrixXd r3_small = build_odm(StateParams::make(1e-3, 1e-6, 0.0), 3).dense();
  r.detail = "F2 " + fmt("%.5f", f2) + ", F3 " + fmt("%.5f", f3) + " (largest eigenvalue of the N=3 state " +
             fmt("%.5f", es.eigenvalues().maxCoeff()) + " bounds any pure-state fidelity; F3 at n_c=1e-3 " +
             fmt("%.5f", ghz.dot(r3_small * ghz)) + ")";
  r.pass = f2 > 0.99 && f3 > 0.99;
  r.seconds = t.seconds();
  return r;
}

inline CriterionResult check_large_j_bound() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{8, "large-J boundary error bound", false, {}, 0.0};
  bool ok = true;
  int tested = 0;
  double worst = 0.0;
  for (double J : {50.0, 100.0, 200.0}) {
    for (int i = 0; i < 240; ++i) {
      const double mu = std::pow(10.0, -1.0 + 4.0 * i / 239.0);
      const SpinBoundaryPoint b = large_j_boundary_point(J, mu);
      const double dz = J - b.jz;
      if (!(dz > 0.0 && dz <= 2.0)) continue;
      const double approx = 1.0 + 2.0 * dz - 2.0 * std::sqrt(dz * (1.0 + dz));
      const double err = std::abs(2.0 * b.jx2 / J - approx);
      const double bound = 5.0 * std::sqrt(dz) / (2.0 * J);
      worst = std::max(worst, err / bound);
      ok = ok && err <= bound;
      ++tested;
    }
  }
  r.detail = std::to_string(tested) + " points, worst error/bound " + fmt("%.3f", worst);
  r.pass = ok && tested > 30;
  r.seconds = t.seconds();
  return r;
}

inline CriterionResult check_squeezing_identification() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{9, "squeezing dB and Wineland boundary", false, {}, 0.0};
  const double db = squeezing_db(StateParams::make(1, 0.3, 0));
  const auto cells = contour_data({1e-3, 10}, {1e-3, 10}, 80);
  int mismatches = 0;
  for (const auto& c : cells) {
    const bool wineland = macroscopic_wineland(StateParams::make(1.0, c.ns, c.nth));
    if (wineland == c.grey) ++mismatches;
    // Finite but large n_c: the exact predicate may only differ next to the boundary.
    const bool finite = stokes_summary(StateParams::make(1e8, c.ns, c.nth)).wineland_squeezed;
    const double thr = wineland_threshold(c.nth);
    if (finite != wineland && std::abs(std::log(c.ns / thr)) > std::log(10.0) * 4.0 / 79.0) ++mismatches;
  }
  r.detail = fmt("%.3f", db) + " dB, " + std::to_string(mismatches) + " boundary mismatches on " +
             std::to_string(cells.size()) + " cells";
  r.pass = near(db, 4.55, 0.1) && mismatches == 0;
  r.seconds = t.seconds();
  return r;
}

inline CriterionResult check_detection_statistics(const VerifyOptions& opt) {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{10, "detection statistics", false, {}, 0.0};
  std::vector<double> log_n, log_dd, shots_needed;
  for (int n : {16, 32, 64, 100}) {
    const double ns = optimize_ns_for_concurrence(n, 0.0, n).ns;
    DetectorArray arr;
    arr.seed = opt.seed;
    arr.fixed_photons = n;
    const ShotSimulator sim(StateParams::make(n, ns, 0), arr);
    const auto shots = simulate_summaries(sim, opt.shots);
    const Reconstruction rec = reconstruct_two_body(shots, arr.schedule, opt.seed);
    const double per_shot = rec.delta_se * std::sqrt(static_cast<double>(rec.used_shots));
    log_n.push_back(std::log(n));
    log_dd.push_back(std::log(per_shot));
    shots_needed.push_back(rec.shots_to_1sigma);
    r.detail += "N=" + std::to_string(n) + " dD1=" + fmt("%.4f", per_shot) + " s1=" + fmt("%.1f", rec.shots_to_1sigma) + "; ";
  }
  const double s = slope(log_n, log_dd);
  const auto [mn, mx] = std::minmax_element(shots_needed.begin(), shots_needed.end());
  const double spread = *mx / *mn;

  DetectorArray arr;
  arr.seed = opt.seed;
  arr.with_replacement = true;
  arr.m = 1u << 12;
  const StateParams p = StateParams::make(30, 0.3, 0);
  auto dump = [&](int threads) {
    const ShotSimulator sim(p, arr);
    std::vector<std::string> lines(2000);
    parallel_for(lines.size(), [&](std::size_t i) { lines[i] = to_ndjson(sim.shot(i)); }, threads);
    std::string all;
    for (const auto& l : lines) all += l + '\n';
    return all;
  };
  const bool reproducible = dump(1) == dump(1) && dump(1) == dump(4);
  r.seconds = t.seconds();
  r.detail += "slope " + fmt("%.3f", s) + ", spread " + fmt("%.2f", spread) + ", reproducible " +
              (reproducible ? "yes" : "no");
  r.pass = near(s, -1.0, 0.2) && spread < 3.0 && reproducible && r.seconds < 600.0;
  return r;
}

inline CriterionResult check_property_suites() {
  using namespace verify_detail;
  Timer t;
  CriterionResult r{11, "ODM property suites", false, {}, 0.0};
  int failures = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (failures++ == 0) first = what;
  };
  for (double nc : {0.1, 1.0, 10.0})
    for (double ns : {0.0, 0.1, 0.3, 1.0})
      for (double nth : {0.0, 0.1})
        for (int n = 1; n <= 6; ++n) {
          const Eigen::MatrixXd m = build_odm(StateParams::make(nc, ns, nth), n).dense();
          const std::string tag = "N=" + std::to_string(n);
          if ((m - m.transpose()).cwiseAbs().maxCoeff() != 0.0) fail("hermiticity " + tag);
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
          if (es.eigenvalues().minCoeff() < -1e-10) fail("psd " + tag);
          const int dim = 1 << n;
          for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
              const int vi = std::popcount(unsigned(i)), vj = std::popcount(unsigned(j));
              if ((vi - vj) % 2 != 0 && m(i, j) != 0.0) fail("parity " + tag);
              // cyclic shift of photon labels
              auto rot = [n](int x) { return ((x << 1) | (x >> (n - 1))) & ((1 << n) - 1); };
              if (m(rot(i), rot(j)) != m(i, j)) fail("permutation " + tag);
            }
        }
  int decohered_entangled = 0, wineland_unentangled = 0, wineland_points = 0;
  for (int n : fig4_n())
    for (double nc : fig4_nc(n))
      for (double ns : fig4_ns()) {
        const StateParams p = StateParams::make(nc, ns, 0.0);
        const CorrelationTable e(p, n, 2);
        detail::PairTable pt = detail::pair_sum(e, nc, n);
        const TwoBodyOdm two = detail::normalize_pair(pt, n);
        pt.r[0][2] = pt.r[2][0] = 0;  // decohered
        const TwoBodyOdm dec = detail::normalize_pair(pt, n);
        if (concurrence(dec) != 0.0) ++decohered_entangled;
        if (stokes_summary(p).wineland_squeezed) {
          ++wineland_points;
          if (!(concurrence(two) > 0.0)) ++wineland_unentangled;
        }
      }
  if (decohered_entangled) fail("decohered concurrence");
  if (wineland_unentangled) fail("wineland without concurrence");
  r.detail = std::to_string(failures) + " failures" + (first.empty() ? "" : " (first: " + first + ")") + "; " +
             std::to_string(wineland_points) + " Wineland points";
  r.pass = failures == 0;
  r.seconds = t.seconds();
  return r;
}

inline std::vector<std::function<CriterionResult()>> acceptance_checks(const VerifyOptions& opt = {}) {
  return {check_two_body_print,
          check_averaged_print,
          check_delta_scaling,
          check_monogamy_ratio,
          check_oracle_equivalence,
          check_loss_invariance,
          check_limits,
          check_large_j_bound,
          check_squeezing_identification,
          [opt] { return check_detection_statistics(opt); },
          check_property_suites};
}

/// Runs one check, turning an escaped exception into a failure.
inline CriterionResult run_check(int id, const std::function<CriterionResult()>& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return {id, "criterion " + std::to_string(id), false, std::string("error: ") + e.what(), 0.0};
  }
}

inline std::string format_result(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%s] %2d ", r.pass ? "PASS" : "FAIL", r.id);
  return std::string(buf) + r.name + " (" + verify_detail::fmt("%.1f", r.seconds) + " s): " + r.detail;
}

}  // namespace polsq
