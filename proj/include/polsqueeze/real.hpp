#pragma once

// Extended-precision scalar and exact combinatorics.
//
// The phase-space sums for E_{m,n} alternate in sign and cancel by up to
// ~40 decimal digits at order 130 (far more for weak squeezing), so everything
// upstream of the final normalization runs in a 160-digit binary float.
// Sums that cancel beyond that are redone in the wider tiers.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace polsq {

namespace bmp = boost::multiprecision;

using Real = bmp::number<bmp::cpp_bin_float<160>, bmp::et_off>;
using WideReal = bmp::number<bmp::cpp_bin_float<640>, bmp::et_off>;
using WidestReal = bmp::number<bmp::cpp_bin_float<2560>, bmp::et_off>;
using BigInt = bmp::cpp_int;
using Rational = bmp::cpp_rational;

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline long double to_long_double(const Real& x) { return x.convert_to<long double>(); }

/// x^k for integer k >= 0 with 0^0 = 1.
template <class T>
T ipow(T x, int k) {
  T result(1);
  while (k > 0) {
    if (k & 1) result *= x;
    x *= x;
    k >>= 1;
  }
  return result;
}

inline BigInt factorial_int(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigInt binomial_int(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// Double factorial with (-1)!! = 1 (and 0!! = 1).
inline BigInt double_factorial_int(int n) {
  BigInt r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

/// Cached tables of k! and k!! in T, grown on demand by the owner.
template <class T>
class BasicFactorialTable {
 public:
  explicit BasicFactorialTable(int max_n) { reserve(max_n); }

  void reserve(int max_n) {
    if (max_n < 0) max_n = 0;
    while (static_cast<int>(fact_.size()) <= max_n) {
      const int k = static_cast<int>(fact_.size());
      fact_.push_back(k == 0 ? T(1) : fact_.back() * k);
    }
    while (static_cast<int>(dfact_.size()) <= max_n) {
      const int k = static_cast<int>(dfact_.size());
      dfact_.push_back(k < 2 ? T(1) : dfact_[k - 2] * k);
    }
  }

  const T& factorial(int k) const { return fact_.at(k); }

  /// k!! for k >= -1.
  const T& double_factorial(int k) const {
    static const T one(1);
    return k < 0 ? one : dfact_.at(k);
  }

  T binomial(int n, int k) const {
    if (k < 0 || k > n) return T(0);
    return fact_.at(n) / (fact_.at(k) * fact_.at(n - k));
  }

 private:
  std::vector<T> fact_;
  std::vector<T> dfact_;
};

using FactorialTable = BasicFactorialTable<Real>;

}  // namespace polsq
