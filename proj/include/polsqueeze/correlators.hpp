#pragma once

// Normally ordered moments E_{m,n} = ⟨(a†)^m a^n⟩ of the squeezed thermal V mode,
// evaluated from its Gaussian Wigner function
//
//   W(x,p) = 2/(π T²) exp(−2x²/(T²A²)) exp(−2p²A²/T²),   a ↔ x + i p,
//
// as E_{m,n} = Σ_a Υ_{m,n,a} I_{m,n,a} with
//
//   Υ_{m,n,a} = (−2)^{a−m} n! m! / [a! (a+n−m)! (m−a)!]          (n ≥ m)
//   I_{m,n,a} = ∫ W (x+ip)^{n−m} (x²+p²)^a
//             = Σ_{u≤t} Σ_{b≤a} C(2t,2u) C(a,b) (−1)^{t−u} 4^{−(t+a)}
//               A^{2(2u+2b−t−a)} T^{2(t+a)} (2(t−u+a−b)−1)!! (2(u+b)−1)!!
//
// where t = (n−m)/2; odd n−m gives zero. I depends on (m, n) only through t.
// With α real and r < 0 every E is real and E_{m,n} = E_{n,m}; in particular
// E_{0,2} = +√(ns(ns+1))(1+2nth).

#include "polsqueeze/error.hpp"
#include "polsqueeze/real.hpp"
#include "polsqueeze/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace polsq {

inline constexpr int kDefaultMaxOrder = 256;

/// Exact Υ_{m,n,a}; requires 0 <= a <= m <= n.
inline Rational upsilon(int m, int n, int a) {
  if (a < 0 || m < a || n < m) {
    throw Error(ErrorCode::IndexOutOfRange, "upsilon needs 0 <= a <= m <= n (got m=" + std::to_string(m) +
                                                ", n=" + std::to_string(n) + ", a=" + std::to_string(a) + ")");
  }
  Rational r(factorial_int(n) * factorial_int(m),
             factorial_int(a) * factorial_int(a + n - m) * factorial_int(m - a));
  const int e = m - a;  // (−2)^{a−m} = (−1)^e / 2^e
  r /= Rational(BigInt(1) << e);
  if (e % 2 != 0) r = -r;
  return r;
}

namespace detail {

// Evaluates I(t, a) for all t <= max_t, a <= max_a with shared power and
// factorial tables, in scalar type T.
template <class T>
class MomentIntegrals {
 public:
  MomentIntegrals(const StateParams& p, int max_t, int max_a)
      : max_t_(max_t), max_a_(max_a), fact_(2 * (max_t + max_a) + 2) {
    const T a = sqrt(T(p.ns)) + sqrt(T(p.ns) + 1);
    const T a2 = a * a;
    const T t2 = T(1) + 2 * T(p.nth);
    const int span = max_t + max_a;
    // a2_pow_[span + e] = A^{2e}, e ∈ [−span, span]
    a2_pow_.assign(2 * span + 1, T(1));
    for (int e = 1; e <= span; ++e) {
      a2_pow_[span + e] = a2_pow_[span + e - 1] * a2;
      a2_pow_[span - e] = a2_pow_[span - e + 1] / a2;
    }
    // T^{2k} / 4^k for k <= span
    t2_quarter_pow_.assign(span + 1, T(1));
    for (int k = 1; k <= span; ++k) t2_quarter_pow_[k] = t2_quarter_pow_[k - 1] * t2 / 4;

    values_.resize(static_cast<std::size_t>(max_t + 1) * (max_a + 1));
    for (int t = 0; t <= max_t; ++t)
      for (int aa = 0; aa <= max_a; ++aa) values_[index(t, aa)] = evaluate(t, aa);
  }

  const T& operator()(int t, int a) const { return values_[index(t, a)]; }

 private:
  std::size_t index(int t, int a) const { return static_cast<std::size_t>(t) * (max_a_ + 1) + a; }

  T evaluate(int t, int a) const {
    const int span = max_t_ + max_a_;
    T sum(0);
    for (int u = 0; u <= t; ++u) {
      const T cu = fact_.binomial(2 * t, 2 * u);
      const bool negative = ((t - u) % 2) != 0;
      for (int b = 0; b <= a; ++b) {
        T term = cu * fact_.binomial(a, b);
        term *= a2_pow_[span + 2 * u + 2 * b - t - a];
        term *= fact_.double_factorial(2 * (t - u + a - b) - 1);
        term *= fact_.double_factorial(2 * (u + b) - 1);
        if (negative) sum -= term;
        else sum += term;
      }
    }
    return sum * t2_quarter_pow_[t + a];
  }

  int max_t_;
  int max_a_;
  BasicFactorialTable<T> fact_;
  std::vector<T> a2_pow_;
  std::vector<T> t2_quarter_pow_;
  std::vector<T> values_;
};

inline void check_order(int m, int n, int max_order) {
  if (m < 0 || n < 0) throw Error(ErrorCode::IndexOutOfRange, "orders must be non-negative");
  if (m > max_order || n > max_order) {
    throw Error(ErrorCode::OrderTooLarge, "order (" + std::to_string(m) + ", " + std::to_string(n) +
                                              ") exceeds max_order " + std::to_string(max_order));
  }
}

// Σ_a Υ_{m,n,a} I(t,a) for n >= m, with Υ in floating point from a factorial
// table. Also reports Σ |terms| so callers can track cancellation.
template <class T>
T correlation_sum(int m, int n, const MomentIntegrals<T>& integrals, const BasicFactorialTable<T>& fact,
                  T* abs_sum = nullptr) {
  const int t = (n - m) / 2;
  T sum(0);
  T mag(0);
  const T prefactor = fact.factorial(n) * fact.factorial(m);
  for (int a = 0; a <= m; ++a) {
    T ups = prefactor / (fact.factorial(a) * fact.factorial(a + n - m) * fact.factorial(m - a));
    ups = ldexp(ups, a - m);
    if ((m - a) % 2 != 0) ups = -ups;
    const T term = ups * integrals(t, a);
    sum += term;
    if (abs_sum) mag += abs(term);
  }
  if (abs_sum) *abs_sum = mag;
  return sum;
}

// Digits that must survive cancellation before a tier's result is accepted.
inline constexpr int kKeptDigits = 25;

// One precision tier: integrals for t <= max_t, a <= max_a and the factorials.
template <class T>
struct CorrelationTier {
  MomentIntegrals<T> integrals;
  BasicFactorialTable<T> fact;

  CorrelationTier(const StateParams& p, int max_t, int max_a) : integrals(p, max_t, max_a), fact(max_a + 2 * max_t) {}

  // E_{m,m+2t} and log10(Σ|terms| / |E|); nullopt if too few digits survive.
  std::optional<std::pair<Real, double>> try_entry(int m, int t) const {
    T mag;
    const T e = correlation_sum(m, m + 2 * t, integrals, fact, &mag);
    // for n_s > 0 every E_{m,m+2t} is strictly positive
    if (!(e > 0)) return std::nullopt;
    const double lost = static_cast<double>(log10(mag / e));
    if (lost > std::numeric_limits<T>::digits10 - kKeptDigits) return std::nullopt;
    return std::make_pair(static_cast<Real>(e), lost);
  }
};

// n_s = 0: thermal factorial moments δ_{mn} m! n_th^m.
inline Real thermal_moment(double nth, int m, int n) {
  if (m != n) return Real(0);
  Real r(1);
  for (int k = 1; k <= m; ++k) r *= Real(k) * Real(nth);
  return r;
}

[[noreturn]] inline void precision_exhausted(int m, int n) {
  throw Error(ErrorCode::PrecisionExhausted, "cancellation in E(" + std::to_string(m) + ", " + std::to_string(n) +
                                                 ") exceeds " + std::to_string(std::numeric_limits<WidestReal>::digits10) +
                                                 " digits; n_s too small for this order");
}

}  // namespace detail

/// I_{m,n,a}; requires n >= m, n − m even, a >= 0.
inline Real moment_integral(const StateParams& p, int m, int n, int a) {
  p.validate();
  if (m < 0 || n < m || a < 0) {
    throw Error(ErrorCode::IndexOutOfRange, "moment_integral needs 0 <= m <= n and a >= 0");
  }
  if ((n - m) % 2 != 0) throw Error(ErrorCode::OddOrder, "n - m must be even");
  const int t = (n - m) / 2;
  // Only the (t, a) cell is needed; build a 1×1-sized table for it.
  detail::MomentIntegrals<Real> table(p, t, a);
  return table(t, a);
}

/// E_{m,n} of the V mode, computed directly (no memo). Precision is raised
/// until at least 25 digits survive the alternating sum.
inline Real correlation(const StateParams& p, int m, int n, int max_order = kDefaultMaxOrder) {
  p.validate();
  detail::check_order(m, n, max_order);
  if ((n - m) % 2 != 0) return Real(0);
  if (n < m) std::swap(m, n);
  if (p.ns == 0.0) return detail::thermal_moment(p.nth, m, n);
  const int t = (n - m) / 2;
  if (auto r = detail::CorrelationTier<Real>(p, t, m).try_entry(m, t)) return r->first;
  if (auto r = detail::CorrelationTier<WideReal>(p, t, m).try_entry(m, t)) return r->first;
  if (auto r = detail::CorrelationTier<WidestReal>(p, t, m).try_entry(m, t)) return r->first;
  detail::precision_exhausted(m, n);
}

/// Eagerly filled E_{m,n} for all m, n <= max_order with |n − m| <= max_offset.
///
/// Immutable after construction. The offset band keeps construction cheap for
/// the consumers that only need near-diagonal moments (the two-body reduction
/// needs |n − m| <= 2); pass max_offset = max_order for the full table.
/// Entries that cancel too deeply at 160 digits are refilled from wider tiers.
class CorrelationTable {
 public:
  CorrelationTable(const StateParams& p, int max_order = kDefaultMaxOrder, int max_offset = 2)
      : params_(p), max_order_(max_order), max_offset_(std::min(max_offset, max_order)) {
    p.validate();
    if (max_order < 0 || max_offset < 0) throw Error(ErrorCode::IndexOutOfRange, "negative table bounds");
    const int max_t = max_offset_ / 2;
    values_.assign(static_cast<std::size_t>(max_order_ + 1) * (max_t + 1), Real(0));
    if (p.ns == 0.0) {
      for (int m = 0; m <= max_order_; ++m) values_[slot(m, 0)] = detail::thermal_moment(p.nth, m, m);
      return;
    }
    std::vector<std::pair<int, int>> pending;
    for (int m = 0; m <= max_order_; ++m)
      for (int t = 0; t <= max_t && m + 2 * t <= max_order_; ++t) pending.emplace_back(m, t);
    fill<Real>(pending, max_t);
    if (!pending.empty()) fill<WideReal>(pending, max_t);
    if (!pending.empty()) fill<WidestReal>(pending, max_t);
    if (!pending.empty()) detail::precision_exhausted(pending.front().first, pending.front().first + 2 * pending.front().second);
  }

  /// E_{m,n}; zero for odd n − m. Throws OrderTooLarge outside the filled band.
  Real operator()(int m, int n) const {
    detail::check_order(m, n, max_order_);
    if ((n - m) % 2 != 0) return Real(0);
    if (n < m) std::swap(m, n);
    if (n - m > max_offset_) {
      throw Error(ErrorCode::OrderTooLarge, "offset |n - m| = " + std::to_string(n - m) +
                                                " exceeds table band " + std::to_string(max_offset_));
    }
    return values_[slot(m, (n - m) / 2)];
  }

  const StateParams& params() const { return params_; }
  int max_order() const { return max_order_; }
  int max_offset() const { return max_offset_; }
  /// Worst log10(Σ|terms| / |E|) over the accepted entries.
  double lost_digits() const { return lost_digits_; }

 private:
  std::size_t slot(int m, int t) const { return static_cast<std::size_t>(m) * (max_offset_ / 2 + 1) + t; }

  template <class T>
  void fill(std::vector<std::pair<int, int>>& pending, int max_t) {
    int top = 0;
    for (const auto& [m, t] : pending) top = std::max(top, m);
    const detail::CorrelationTier<T> tier(params_, max_t, top);
    std::vector<std::pair<int, int>> left;
    for (const auto& [m, t] : pending) {
      if (auto r = tier.try_entry(m, t)) {
        values_[slot(m, t)] = r->first;
        lost_digits_ = std::max(lost_digits_, r->second);
      } else {
        left.emplace_back(m, t);
      }
    }
    pending.swap(left);
  }

  StateParams params_;
  int max_order_;
  int max_offset_;
  double lost_digits_ = 0.0;
  std::vector<Real> values_;
};

}  // namespace polsq
