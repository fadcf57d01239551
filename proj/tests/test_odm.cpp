#include "polsqueeze/odm.hpp"
#include "polsqueeze/state.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <random>

using namespace polsq;

namespace {

// Apply a qubit permutation to a basis index (bit l of the result = bit perm[l] of i).
int permute_bits(int i, const std::vector<int>& perm) {
  int out = 0;
  for (std::size_t l = 0; l < perm.size(); ++l) out |= ((i >> perm[l]) & 1) << l;
  return out;
}

Eigen::VectorXcd product_vector(const std::vector<PolarizationState>& s) {
  Eigen::VectorXcd v(1);
  v(0) = 1.0;
  for (const auto& p : s) {
    Eigen::VectorXcd next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next(2 * i) = v(i) * p.h;
      next(2 * i + 1) = v(i) * p.v;
    }
    v = next;
  }
  return v;
}

PolarizationState random_setting(std::mt19937_64& g) {
  std::normal_distribution<double> d;
  std::complex<double> h(d(g), d(g)), v(d(g), d(g));
  const double n = std::sqrt(std::norm(h) + std::norm(v));
  return {h / n, v / n};
}

}  // namespace

TEST(BuildOdm, CoherentLightIsAllHorizontal) {
  const Eigen::MatrixXd m = build_odm(StateParams::make(3, 0, 0), 2).dense();
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(4, 4);
  expect(0, 0) = 1;
  EXPECT_EQ(m, expect);
}

TEST(BuildOdm, BellLimit) {
  const Eigen::MatrixXd m = build_odm(StateParams::make(0.01, 1e-4, 0), 2).dense();
  Eigen::Vector4d bell(1, 0, 0, 1);
  bell /= std::sqrt(2.0);
  EXPECT_GT(bell.dot(m * bell), 0.99);
}

TEST(BuildOdm, FourTermLimitAtOnePercent) {
  const Eigen::MatrixXd m = build_odm(StateParams::make(0.01, 1e-4, 0), 3).dense();
  Eigen::VectorXd target = Eigen::VectorXd::Zero(8);
  for (int i : {0b000, 0b011, 0b101, 0b110}) target(i) = 0.5;
  EXPECT_GT(target.dot(m * target), 0.99);
}

TEST(BuildOdm, FourTermLimitApproachedAsCoherentAmplitudeVanishes) {
  Eigen::VectorXd target = Eigen::VectorXd::Zero(8);
  for (int i : {0b000, 0b011, 0b101, 0b110}) target(i) = 0.5;
  double prev = 0;
  for (double nc : {1e-2, 3e-3, 1e-3, 1e-4}) {
    const Eigen::MatrixXd m = build_odm(StateParams::make(nc, nc * nc, 0), 3).dense();
    const double f = target.dot(m * target);
    EXPECT_GT(f, prev);
    prev = f;
  }
  EXPECT_GT(prev, 0.999);
}

TEST(ClosedForms, TwoPhotonCoefficients) {
  const Eigen::Matrix4d r = closed_form_r2(StateParams::make(1, 0.3, 0));
  EXPECT_NEAR(r(3, 3), 0.57, 1e-15);
  EXPECT_NEAR(std::abs(r(0, 3)), std::sqrt(0.39), 1e-15);
  EXPECT_DOUBLE_EQ(r(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(r(1, 1), 0.3);
  EXPECT_DOUBLE_EQ(r(1, 2), 0.3);
}

TEST(ClosedForms, AgreeWithBuildOdm) {
  for (double nc : {0.1, 1.0, 10.0})
    for (double ns : {0.0, 0.1, 0.3, 1.0})
      for (double nth : {0.0, 0.1}) {
        const StateParams p = StateParams::make(nc, ns, nth);
        const Eigen::MatrixXd b2 = build_odm(p, 2).dense(), b3 = build_odm(p, 3).dense();
        const Eigen::Matrix4d c2 = closed_form_r2(p);
        const Eigen::Matrix<double, 8, 8> c3 = closed_form_r3(p);
        EXPECT_LE((b2 - c2 / c2.trace()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((b3 - c3 / c3.trace()).cwiseAbs().maxCoeff(), 1e-12);
      }
}

TEST(ClosedForms, TypesetThreePhotonCoefficientDiffersWithThermalNoise) {
  const StateParams pure = StateParams::make(2, 0.3, 0), mixed = StateParams::make(2, 0.3, 0.1);
  EXPECT_NEAR(printed_c3(pure), to_double(build_odm(pure, 3).raw(2, 2)), 1e-12);
  EXPECT_GT(std::abs(printed_c3(mixed) - to_double(build_odm(mixed, 3).raw(2, 2))), 1e-3);
  EXPECT_NEAR(closed_form_r3(mixed)(3, 3), to_double(build_odm(mixed, 3).raw(2, 2)), 1e-12);
}

TEST(BuildOdm, Invariants) {
  for (double nc : {0.1, 1.0, 10.0})
    for (double ns : {0.0, 0.1, 0.3, 1.0})
      for (double nth : {0.0, 0.1})
        for (int n = 1; n <= 6; ++n) {
          const Odm o = build_odm(StateParams::make(nc, ns, nth), n);
          EXPECT_GT(o.trace(), 0);
          const Eigen::MatrixXd raw = o.dense(false), m = o.dense();
          EXPECT_EQ(raw, raw.transpose());
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
          EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
          EXPECT_NEAR(m.trace(), 1.0, 1e-12);
          std::vector<int> perm(n);
          for (int l = 0; l < n; ++l) perm[l] = n - 1 - l;
          if (n >= 3) std::swap(perm[0], perm[1]);
          const int dim = 1 << n;
          for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
              const int vi = std::popcount(unsigned(i)), vj = std::popcount(unsigned(j));
              if ((vi - vj) % 2) { EXPECT_EQ(raw(i, j), 0.0); }
              EXPECT_EQ(raw(permute_bits(i, perm), permute_bits(j, perm)), raw(i, j));
              EXPECT_EQ(raw(i, j), to_double(o.raw(vi, vj)));
            }
        }
}

TEST(BuildOdm, RawTwoPhotonTraceWithoutSqueezing) {
  EXPECT_NEAR(to_double(build_odm(StateParams::make(7, 0, 0), 2).trace()), 49.0, 1e-12);
}

TEST(BuildOdm, LossInvariance) {
  for (double ns : {0.1, 0.3, 1.0})
    for (double nth : {0.01, 0.05}) {
      const StateParams p = StateParams::make(5, ns, nth);
      const Purified pu = purify(p);
      for (int n = 1; n <= 8; ++n) {
        const Odm a = build_odm(p, n), b = build_odm(pu.params, n);
        for (int v = 0; v <= n; ++v)
          for (int w = 0; w <= n; ++w) EXPECT_NEAR(a.normalized(v, w), b.normalized(v, w), 1e-10);
      }
    }
}

TEST(BuildOdm, DimensionLimits) {
  const StateParams p = StateParams::make(1, 0.3, 0);
  try {
    build_odm(p, 15);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooLarge);
  }
  const Odm big = build_odm(p, 14);
  EXPECT_EQ(big.compressed().rows(), 15);
  EXPECT_THROW(big.dense(), Error);
  EXPECT_THROW(build_odm(p, 0), Error);
  EXPECT_THROW(big.raw(15, 0), Error);
}

TEST(BornProbability, ComputationalBasisReadsDiagonal) {
  const Odm o = build_odm(StateParams::make(1, 0.3, 0.1), 2);
  const auto h = PolarizationState::horizontal(), v = PolarizationState::vertical();
  EXPECT_NEAR(born_probability(o, {h, v}), o.dense()(1, 1), 1e-15);
  EXPECT_NEAR(born_probability(o, {v, v}), o.dense()(3, 3), 1e-15);
}

TEST(BornProbability, CoherentAllHorizontal) {
  const auto h = PolarizationState::horizontal();
  EXPECT_NEAR(born_probability(build_odm(StateParams::make(2, 0, 0), 3), {h, h, h}), 1.0, 1e-15);
}

TEST(BornProbability, CompleteBasesSumToOne) {
  std::mt19937_64 g(7);
  for (int n = 1; n <= 6; ++n) {
    const Odm o = build_odm(StateParams::make(1.3, 0.4, 0.05), n);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<PolarizationState> up(n), down(n);
      for (int l = 0; l < n; ++l) {
        up[l] = trial == 0 ? PolarizationState::horizontal() : random_setting(g);
        down[l] = {-std::conj(up[l].v), std::conj(up[l].h)};  // orthogonal partner
      }
      double total = 0;
      for (int i = 0; i < (1 << n); ++i) {
        std::vector<PolarizationState> s(n);
        for (int l = 0; l < n; ++l) s[l] = ((i >> (n - 1 - l)) & 1) ? down[l] : up[l];
        const double pr = born_probability(o, s);
        EXPECT_GE(pr, -1e-12);
        total += pr;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(BornProbability, MatchesDenseQuadraticForm) {
  std::mt19937_64 g(11);
  for (int n = 1; n <= 5; ++n) {
    const Odm o = build_odm(StateParams::make(0.8, 0.6, 0.1), n);
    const Eigen::MatrixXcd m = o.dense().cast<std::complex<double>>();
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<PolarizationState> s(n);
      for (auto& x : s) x = random_setting(g);
      const Eigen::VectorXcd p = product_vector(s);
      EXPECT_NEAR(born_probability(o, s), (p.adjoint() * m * p)(0, 0).real(), 1e-13);
    }
  }
}

TEST(BornProbability, RejectsBadSettings) {
  const Odm o = build_odm(StateParams::make(1, 0.3, 0), 2);
  try {
    born_probability(o, {PolarizationState::horizontal(), {{1.0, 0.0}, {1e-4, 0.0}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonNormalizedSetting);
  }
  EXPECT_THROW(born_probability(o, {PolarizationState::horizontal()}), Error);
}

TEST(PhaseAverage, RemovesCornerCoherence) {
  const Odm o = build_odm(StateParams::make(2, 0.3, 0.1), 2);
  const Odm d = phase_average(o);
  const Eigen::MatrixXd a = o.dense(), b = d.dense();
  EXPECT_EQ(b(0, 3), 0.0);
  EXPECT_EQ(b(3, 0), 0.0);
  EXPECT_NE(a(0, 3), 0.0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(a(i, i), b(i, i));
  EXPECT_EQ(a(1, 2), b(1, 2));
  EXPECT_EQ(d.trace(), o.trace());
  EXPECT_EQ(phase_average(d).dense(), b);
}

TEST(PartialOps, ShapesAndIdentities) {
  const Eigen::MatrixXd m = build_odm(StateParams::make(1, 0.3, 0), 3).dense();
  EXPECT_THROW(partial_trace_leading(m, 2, 1), Error);
  EXPECT_THROW(partial_transpose_leading(m, 3, 4), Error);
  EXPECT_EQ(partial_trace_leading(m, 3, 3), m);
  EXPECT_NEAR(partial_trace_leading(m, 3, 0)(0, 0), 1.0, 1e-15);
  EXPECT_EQ(partial_transpose_leading(partial_transpose_leading(m, 3, 1), 3, 1), m);
  EXPECT_EQ(partial_transpose_leading(m, 3, 3), m.transpose());
}
