#pragma once

// Monte Carlo coincidence detection and pair-averaged two-photon tomography.
//
// Each shot detects N photons on an array of M analyzers, all set to the same
// polarization basis for that shot. Outcome laws are exact:
//
//   Z basis (H/V):      P(k V's) = C(N, k) ℛ(k, k)
//   equatorial φ basis: P(k minus) = C(N, k) 2^{−N} Σ_{v,w} K_v(k) K_w(k) cos((w−v)φ) ℛ(v, w)
//
// with K_v(k) the x^v coefficient of (1+x)^{N−k} (1−x)^k and ℛ the compressed
// normalized ODM. The sum is cut at the V count where the remaining diagonal
// weight is negligible. Pair statistics per shot follow from (N, k) alone.

#include "polsqueeze/correlators.hpp"
#include "polsqueeze/error.hpp"
#include "polsqueeze/odm.hpp"
#include "polsqueeze/parallel.hpp"
#include "polsqueeze/real.hpp"
#include "polsqueeze/reduced.hpp"
#include "polsqueeze/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace polsq {

enum class SettingKind { Z, Equatorial };

/// Basis applied to every analyzer in a shot. Equatorial outcomes are
/// (|H⟩ ± e^{iφ}|V⟩)/√2; bit 1 means V (Z) or minus (equatorial).
struct MeasurementSetting {
  SettingKind kind = SettingKind::Z;
  double phi = 0.0;

  static MeasurementSetting z() { return {SettingKind::Z, 0.0}; }
  static MeasurementSetting equatorial(double phi) { return {SettingKind::Equatorial, phi}; }

  std::string label() const { return kind == SettingKind::Z ? "Z" : "phi:" + std::to_string(phi); }
  friend bool operator==(const MeasurementSetting&, const MeasurementSetting&) = default;
};

/// Z, then φ = 0, π/4, π/2, cycled shot by shot.
inline std::vector<MeasurementSetting> default_schedule() {
  return {MeasurementSetting::z(), MeasurementSetting::equatorial(0.0),
          MeasurementSetting::equatorial(std::numbers::pi / 4), MeasurementSetting::equatorial(std::numbers::pi / 2)};
}

struct DetectorArray {
  std::uint64_t m = 1u << 20;
  double efficiency = 1.0;
  std::vector<MeasurementSetting> schedule = default_schedule();
  std::uint64_t seed = 0;
  bool with_replacement = false;     // true: analyzers drawn independently, collisions flagged
  std::optional<int> fixed_photons;  // post-select on exactly this many detections

  void validate() const {
    if (m < 1) throw Error(ErrorCode::InvalidParams, "need at least one analyzer");
    if (!(efficiency > 0.0 && efficiency <= 1.0)) throw Error(ErrorCode::InvalidParams, "efficiency must lie in (0, 1]");
    if (schedule.empty()) throw Error(ErrorCode::IncompleteSchedule, "empty settings schedule");
    if (fixed_photons && *fixed_photons < 0) throw Error(ErrorCode::InvalidParams, "fixed photon count must be >= 0");
    if (!with_replacement && fixed_photons && static_cast<std::uint64_t>(*fixed_photons) > m) {
      throw Error(ErrorCode::InvalidParams, "more photons than analyzers without replacement");
    }
  }
};

struct Outcome {
  std::uint64_t analyzer = 0;
  int bit = 0;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct ShotRecord {
  std::uint64_t shot = 0;
  int setting = 0;  // index into the schedule
  int n_detected = 0;
  bool multi_hit = false;
  std::vector<Outcome> outcomes;

  int ones() const {
    int k = 0;
    for (const auto& o : outcomes) k += o.bit;
    return k;
  }
  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

/// What the reconstruction needs from a shot.
struct ShotSummary {
  int setting = 0;
  int n = 0;
  int ones = 0;
  bool multi_hit = false;
};

inline ShotSummary summarize(const ShotRecord& r) { return {r.setting, r.n_detected, r.ones(), r.multi_hit}; }

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-stream generator: mt19937_64 seeded from splitmix64(seed, stream).
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

/// Uniform in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do x = g();
  while (x >= limit);
  return x % n;
}

/// Inverse-CDF draw from a cumulative table ending at 1.
inline int sample_cdf(std::mt19937_64& g, const std::vector<double>& cdf) {
  const double u = uniform01(g) * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
}

inline std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = (s += std::max(0.0, p[i]));
  if (!(s > 0.0)) throw Error(ErrorCode::NotAState, "outcome law has no weight");
  return c;
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace detail

/// Exact law of the number of 1-outcomes for N photons in one basis.
inline std::vector<double> outcome_law(const Odm& odm, const MeasurementSetting& s) {
  const int n = odm.n();
  const int vmax = odm.max_v();
  std::vector<double> p(n + 1, 0.0);
  FactorialTable fact(n);
  if (s.kind == SettingKind::Z) {
    for (int v = 0; v <= vmax; ++v) p[v] = to_double(fact.binomial(n, v) * odm.raw(v, v) / odm.trace());
  } else {
    std::vector<Real> f(static_cast<std::size_t>(vmax + 1) * (vmax + 1));
    for (int v = 0; v <= vmax; ++v)
      for (int w = 0; w <= vmax; ++w) {
        const int dvw = w - v;
        f[v * (vmax + 1) + w] = (dvw % 2 != 0) ? Real(0) : odm.raw(v, w) * cos(Real(dvw) * Real(s.phi)) / odm.trace();
      }
    // K(k = 0) = coefficients of (1+x)^N; step k → k+1 multiplies by (1−x)/(1+x).
    std::vector<Real> kv(vmax + 1), tmp(vmax + 1);
    for (int v = 0; v <= vmax; ++v) kv[v] = fact.binomial(n, v);
    const Real scale = ldexp(Real(1), -n);
    for (int k = 0; k <= n; ++k) {
      if (k > 0) {
        for (int v = 0; v <= vmax; ++v) tmp[v] = kv[v] - (v > 0 ? kv[v - 1] : Real(0));
        for (int v = 0; v <= vmax; ++v) kv[v] = tmp[v] - (v > 0 ? kv[v - 1] : Real(0));
      }
      Real q(0);
      for (int v = 0; v <= vmax; ++v) {
        if (kv[v] == 0) continue;
        Real row(0);
        for (int w = 0; w <= vmax; ++w) row += f[v * (vmax + 1) + w] * kv[w];
        q += kv[v] * row;
      }
      p[k] = to_double(fact.binomial(n, k) * scale * q);
    }
  }
  double total = 0.0;
  for (double& x : p) total += (x = std::max(0.0, x));
  for (double& x : p) x /= total;
  return p;
}

/// Expected pair fractions (both 0, mixed, both 1) over all unordered pairs.
struct PairStats {
  double f00 = 0.0;
  double f01 = 0.0;
  double f11 = 0.0;
};

inline PairStats pair_stats(int n, int k) {
  const double pairs = 0.5 * n * (n - 1.0);
  return {0.5 * (n - k) * (n - k - 1.0) / pairs, double(k) * (n - k) / pairs, 0.5 * k * (k - 1.0) / pairs};
}

/// Linear-inversion result: X-state entries a = ρ00, b = ρ11 = ρ12, c = ρ33, d = ρ03.
struct XStateEstimate {
  double a = 0.0, b = 0.0, c = 0.0;
  std::complex<double> d{0.0, 0.0};

  Eigen::Matrix4d real_matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = a;
    m(1, 1) = m(2, 2) = m(1, 2) = m(2, 1) = b;
    m(3, 3) = c;
    m(0, 3) = m(3, 0) = std::abs(d);
    return m;
  }
  double delta() const { return std::abs(d) - b; }
};

/// Mean pair statistics of one setting, optionally with the variances of
/// those means (f00, f01, f11, and the correlator f00 + f11 − f01).
struct SettingData {
  PairStats mean;
  std::array<double, 4> var_of_mean{};
  bool has_variance = false;
};

/// Weighted least-squares inversion of per-setting pair statistics.
/// Z gives a = f00, 2b = f01, c = f11; φ gives 2b + 2Re(d e^{2iφ}) = f00 + f11 − f01.
/// Rows are weighted by the inverse variance of their mean when known.
inline XStateEstimate invert_pair_stats(const std::vector<MeasurementSetting>& schedule,
                                        const std::vector<std::optional<SettingData>>& data) {
  std::vector<Eigen::Matrix<double, 1, 5>> rows;
  std::vector<double> rhs, weight;
  auto push = [&](const Eigen::Matrix<double, 1, 5>& r, double y, const SettingData& d, int slot) {
    rows.push_back(r);
    rhs.push_back(y);
    weight.push_back(d.has_variance ? 1.0 / std::sqrt(std::max(d.var_of_mean[slot], 1e-30)) : 1.0);
  };
  for (std::size_t i = 0; i < schedule.size() && i < data.size(); ++i) {
    if (!data[i]) continue;
    const SettingData& d = *data[i];
    const PairStats& s = d.mean;
    Eigen::Matrix<double, 1, 5> r = Eigen::Matrix<double, 1, 5>::Zero();
    if (schedule[i].kind == SettingKind::Z) {
      r(0) = 1;
      push(r, s.f00, d, 0);
      r.setZero(), r(1) = 2;
      push(r, s.f01, d, 1);
      r.setZero(), r(2) = 1;
      push(r, s.f11, d, 2);
    } else {
      r(1) = 2;
      r(3) = 2 * std::cos(2 * schedule[i].phi);
      r(4) = -2 * std::sin(2 * schedule[i].phi);
      push(r, s.f00 + s.f11 - s.f01, d, 3);
    }
  }
  if (rows.size() < 5) throw Error(ErrorCode::IncompleteSchedule, "settings do not determine the X-state parameters");
  Eigen::MatrixXd a(rows.size(), 5), plain(rows.size(), 5);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    plain.row(i) = rows[i];
    a.row(i) = weight[i] * rows[i];
    y(i) = weight[i] * rhs[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> structure(plain);
  structure.setThreshold(1e-10);
  if (structure.rank() < 5) {
    throw Error(ErrorCode::IncompleteSchedule, "settings do not determine the X-state parameters");
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);
  return {x(0), x(1), x(2), {x(3), x(4)}};
}

/// Exact mean pair statistics for each setting (the infinite-shot limit).
inline std::vector<std::optional<SettingData>> expected_pair_stats(const Odm& odm,
                                                                   const std::vector<MeasurementSetting>& schedule) {
  std::vector<std::optional<SettingData>> out;
  for (const auto& s : schedule) {
    const auto law = outcome_law(odm, s);
    PairStats acc;
    for (int k = 0; k <= odm.n(); ++k) {
      const PairStats ps = pair_stats(odm.n(), k);
      acc.f00 += law[k] * ps.f00;
      acc.f01 += law[k] * ps.f01;
      acc.f11 += law[k] * ps.f11;
    }
    out.push_back(SettingData{acc});
  }
  return out;
}

/// Generates shots for a fixed state and detector configuration.
///
/// Shot i uses its own generator derived from (seed, i), so any subset of
/// shots can be produced in any order or in parallel with identical results.
class ShotSimulator {
 public:
  ShotSimulator(const StateParams& params, DetectorArray array) : params_(params), array_(std::move(array)) {
    params_.validate();
    array_.validate();
    detected_ = apply_loss(params_, array_.efficiency);
    if (array_.fixed_photons) {
      photon_cdf_.assign(*array_.fixed_photons + 1, 0.0);
      photon_cdf_.back() = 1.0;
    } else {
      photon_cdf_ = detail::cumulative(detected_photon_law());
    }
  }

  const StateParams& detected_params() const { return detected_; }
  const DetectorArray& array() const { return array_; }

  /// P(N detections): the purified state's number law thinned by the total transmission.
  std::vector<double> detected_photon_law() const {
    const Purified pure = purify(params_);
    const double eta = pure.eta * array_.efficiency;
    const auto [lo, hi] = photon_number_support(pure.params);
    (void)lo;
    std::vector<double> src(hi + 1);
    for (int m = 0; m <= hi; ++m) src[m] = photon_number_distribution(pure.params, m);
    std::vector<double> out(hi + 1, 0.0);
    for (int m = 0; m <= hi; ++m) {
      if (src[m] < 1e-300) continue;
      for (int n = 0; n <= m; ++n) {
        double lw = detail::log_binomial(m, n);
        lw += n * std::log(eta);
        lw += (m - n) == 0 ? 0.0 : (m - n) * std::log1p(-eta);
        if (eta == 1.0 && n != m) continue;
        out[n] += src[m] * std::exp(lw);
      }
    }
    return out;
  }

  /// Law of the number of 1-outcomes for N photons under schedule entry s.
  const std::vector<double>& outcome_cdf(int n, int s) const {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(n, s);
    if (auto it = cdf_cache_.find(key); it != cdf_cache_.end()) return it->second;
    std::vector<double> law;
    if (n == 0) {
      law = {1.0};
    } else {
      law = outcome_law(odm_for(n), array_.schedule[s]);
    }
    return cdf_cache_.emplace(key, detail::cumulative(law)).first->second;
  }

  ShotRecord shot(std::uint64_t index) const {
    auto g = detail::stream_rng(array_.seed, index);
    ShotRecord r;
    r.shot = index;
    r.setting = static_cast<int>(index % array_.schedule.size());
    r.n_detected = detail::sample_cdf(g, photon_cdf_);
    if (r.n_detected == 0) return r;
    if (!array_.with_replacement && static_cast<std::uint64_t>(r.n_detected) > array_.m) {
      throw Error(ErrorCode::InvalidParams, "more photons than analyzers without replacement");
    }
    const int k = detail::sample_cdf(g, outcome_cdf(r.n_detected, r.setting));
    // Which photons read 1: a uniform k-subset (partial Fisher–Yates).
    std::vector<int> bits(r.n_detected, 0);
    std::vector<int> order(r.n_detected);
    for (int i = 0; i < r.n_detected; ++i) order[i] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(detail::uniform_index(g, r.n_detected - i));
      std::swap(order[i], order[j]);
      bits[order[i]] = 1;
    }
    r.outcomes.resize(r.n_detected);
    std::vector<std::uint64_t> used;
    used.reserve(r.n_detected);
    for (int i = 0; i < r.n_detected; ++i) {
      std::uint64_t a = detail::uniform_index(g, array_.m);
      if (array_.with_replacement) {
        if (std::find(used.begin(), used.end(), a) != used.end()) r.multi_hit = true;
      } else {
        while (std::find(used.begin(), used.end(), a) != used.end()) a = detail::uniform_index(g, array_.m);
      }
      used.push_back(a);
      r.outcomes[i] = {a, bits[i]};
    }
    return r;
  }

 private:
  const Odm& odm_for(int n) const {
    if (auto it = odm_cache_.find(n); it != odm_cache_.end()) return it->second;
    // Grow the V-count cut until the discarded diagonal weight is negligible.
    int vmax = std::min(n, 16);
    for (;;) {
      if (!table_ || table_->max_order() < vmax) {
        table_ = std::make_unique<CorrelationTable>(detected_, std::max(vmax, 16), std::max(vmax, 16));
      }
      Odm o = Odm::from_correlations(*table_, detected_.nc, n, vmax);
      if (vmax == n) return odm_cache_.emplace(n, std::move(o)).first->second;
      FactorialTable fact(n);
      const double tail = std::sqrt(std::max(0.0, to_double(fact.binomial(n, vmax) * o.raw(vmax, vmax) / o.trace())));
      if (tail < 1e-16) return odm_cache_.emplace(n, std::move(o)).first->second;
      vmax = std::min(n, 2 * vmax);
    }
  }

  StateParams params_;
  DetectorArray array_;
  StateParams detected_;
  std::vector<double> photon_cdf_;
  mutable std::mutex mutex_;
  mutable std::unique_ptr<CorrelationTable> table_;
  mutable std::map<int, Odm> odm_cache_;
  mutable std::map<std::pair<int, int>, std::vector<double>> cdf_cache_;
};

/// Shots 0 … shots−1 in order. Generated in parallel; the result is identical
/// for any thread count.
inline std::vector<ShotRecord> simulate_shots(const StateParams& params, const DetectorArray& array,
                                              std::int64_t shots) {
  if (shots < 1) throw Error(ErrorCode::InvalidShotCount, "shot count must be at least 1");
  const ShotSimulator sim(params, array);
  std::vector<ShotRecord> out(static_cast<std::size_t>(shots));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = sim.shot(i); });
  return out;
}

/// One NDJSON line: {"shot":…,"setting":…,"n":…,"multi_hit":…,"outcomes":[[analyzer,bit],…]}.
inline std::string to_ndjson(const ShotRecord& r) {
  std::string s = "{\"shot\":" + std::to_string(r.shot) + ",\"setting\":" + std::to_string(r.setting) +
                  ",\"n\":" + std::to_string(r.n_detected) + ",\"multi_hit\":" + (r.multi_hit ? "true" : "false") +
                  ",\"outcomes\":[";
  for (std::size_t i = 0; i < r.outcomes.size(); ++i) {
    if (i) s += ',';
    s += '[' + std::to_string(r.outcomes[i].analyzer) + ',' + std::to_string(r.outcomes[i].bit) + ']';
  }
  return s + "]}";
}

/// Summaries only; avoids holding per-photon outcomes for large runs.
inline std::vector<ShotSummary> simulate_summaries(const ShotSimulator& sim, std::int64_t shots) {
  if (shots < 1) throw Error(ErrorCode::InvalidShotCount, "shot count must be at least 1");
  std::vector<ShotSummary> out(static_cast<std::size_t>(shots));
  parallel_for(out.size(), [&](std::size_t i) { out[i] = summarize(sim.shot(i)); });
  return out;
}

struct Reconstruction {
  TwoBodyOdm estimate;  // n = 0: mixture over the detected photon numbers
  XStateEstimate x;
  Eigen::Matrix4d standard_errors = Eigen::Matrix4d::Zero();
  double delta_hat = 0.0;
  double delta_se = 0.0;
  double shots_to_1sigma = 0.0;  // shots for Δ̂ / se = 1
  double collision_fraction = 0.0;
  std::size_t used_shots = 0;
  std::size_t excluded_shots = 0;  // multi-hit or fewer than two photons
};

namespace detail {

inline XStateEstimate estimate_from(const std::vector<MeasurementSetting>& schedule,
                                    const std::vector<ShotSummary>& shots, const std::vector<std::size_t>& pick) {
  const std::size_t ns = schedule.size();
  std::vector<std::array<double, 4>> sum(ns, {0, 0, 0, 0}), sq(ns, {0, 0, 0, 0});
  std::vector<std::size_t> count(ns, 0);
  for (std::size_t i : pick) {
    const ShotSummary& s = shots[i];
    const PairStats ps = pair_stats(s.n, s.ones);
    const double v[4] = {ps.f00, ps.f01, ps.f11, ps.f00 + ps.f11 - ps.f01};
    for (int j = 0; j < 4; ++j) {
      sum[s.setting][j] += v[j];
      sq[s.setting][j] += v[j] * v[j];
    }
    ++count[s.setting];
  }
  std::vector<std::optional<SettingData>> data(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    if (count[i] == 0) continue;
    const double c = static_cast<double>(count[i]);
    SettingData d;
    d.mean = {sum[i][0] / c, sum[i][1] / c, sum[i][2] / c};
    d.has_variance = count[i] > 1;
    for (int j = 0; j < 4; ++j) {
      const double m = sum[i][j] / c;
      const double var = count[i] > 1 ? std::max(0.0, (sq[i][j] - c * m * m) / (c - 1.0)) : 0.0;
      // floor: a constant statistic still carries at least one-count resolution
      d.var_of_mean[j] = std::max(var, 1.0 / (c * c)) / c;
    }
    data[i] = d;
  }
  return invert_pair_stats(schedule, data);
}

}  // namespace detail

/// Pair-averaged linear inversion with bootstrap standard errors over shots.
inline Reconstruction reconstruct_two_body(const std::vector<ShotSummary>& shots,
                                           const std::vector<MeasurementSetting>& schedule,
                                           std::uint64_t bootstrap_seed = 0, int bootstrap_rounds = 200) {
  if (shots.empty()) throw Error(ErrorCode::InvalidShotCount, "no shots to reconstruct from");
  Reconstruction rec;
  std::vector<std::size_t> used;
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const auto& s = shots[i];
    if (s.setting < 0 || s.setting >= static_cast<int>(schedule.size())) {
      throw Error(ErrorCode::IncompleteSchedule, "shot refers to a setting outside the schedule");
    }
    if (s.multi_hit) ++collisions;
    if (s.multi_hit || s.n < 2) continue;
    used.push_back(i);
  }
  rec.collision_fraction = static_cast<double>(collisions) / shots.size();
  rec.used_shots = used.size();
  rec.excluded_shots = shots.size() - used.size();
  rec.x = detail::estimate_from(schedule, shots, used);
  rec.estimate = {0, rec.x.real_matrix()};
  rec.delta_hat = rec.x.delta();

  Eigen::Matrix4d s1 = Eigen::Matrix4d::Zero(), s2 = Eigen::Matrix4d::Zero();
  double d1 = 0.0, d2 = 0.0;
  int ok = 0;
  std::vector<std::size_t> pick(used.size());
  for (int b = 0; b < bootstrap_rounds; ++b) {
    auto g = detail::stream_rng(bootstrap_seed ^ 0xb007b007b007b007ULL, static_cast<std::uint64_t>(b));
    for (auto& p : pick) p = used[detail::uniform_index(g, used.size())];
    try {
      const XStateEstimate x = detail::estimate_from(schedule, shots, pick);
      const Eigen::Matrix4d m = x.real_matrix();
      s1 += m;
      s2 += m.cwiseProduct(m);
      d1 += x.delta();
      d2 += x.delta() * x.delta();
      ++ok;
    } catch (const Error&) {
    }
  }
  if (ok > 1) {
    const double n = ok;
    rec.standard_errors = ((s2 - s1.cwiseProduct(s1) / n) / (n - 1)).cwiseMax(0.0).cwiseSqrt();
    rec.delta_se = std::sqrt(std::max(0.0, (d2 - d1 * d1 / n) / (n - 1)));
  }
  if (rec.delta_hat != 0.0) {
    const double per_shot = rec.delta_se * std::sqrt(static_cast<double>(rec.used_shots));
    rec.shots_to_1sigma = (per_shot / rec.delta_hat) * (per_shot / rec.delta_hat);
  }
  return rec;
}

}  // namespace polsq
