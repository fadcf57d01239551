#include "polsqueeze/entanglement.hpp"
#include "polsqueeze/odm.hpp"
#include "polsqueeze/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polsq;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(FockState, Vacuum) {
  const FockState s = build_squeezed_thermal(0, 0);
  EXPECT_EQ(s.cutoff, kDefaultFockCutoff);
  EXPECT_EQ(s.trace_deficit, 0.0);
  EXPECT_DOUBLE_EQ(s.rho_v(0, 0), 1.0);
  EXPECT_EQ(s.rho_v.cwiseAbs().sum(), 1.0);
}

TEST(FockState, MeanOccupation) {
  EXPECT_NEAR(oracle_correlation(build_squeezed_thermal(0.3, 0), 1, 1).real(), 0.3, 1e-10);
  EXPECT_NEAR(oracle_correlation(build_squeezed_thermal(0.3, 0.1, recommended_cutoff(0.3, 0.1)), 1, 1).real(), 0.46, 1e-10);
}

TEST(FockState, HermitianPositiveNearUnitTrace) {
  for (double ns : {0.0, 0.3, 1.0})
    for (double nth : {0.0, 0.1, 1.0}) {
      const FockState s = build_squeezed_thermal(ns, nth, recommended_cutoff(ns, nth));
      EXPECT_LE((s.rho_v - s.rho_v.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.rho_v, Eigen::EigenvaluesOnly);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
      EXPECT_LE(s.trace_deficit, 1e-10);
      EXPECT_LE(s.rho_v.trace(), 1.0 + 1e-12);
    }
}

TEST(FockState, CutoffTooSmall) {
  try {
    build_squeezed_thermal(1.0, 1.0, 40);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CutoffTooSmall);
  }
  EXPECT_GT(recommended_cutoff(1.0, 1.0), 40);
  EXPECT_EQ(recommended_cutoff(0.0, 0.0), kDefaultFockCutoff);
}

TEST(OracleCorrelation, Normalization) {
  EXPECT_NEAR(oracle_correlation(build_squeezed_thermal(0.3, 0.1), 0, 0).real(), 1.0, 1e-10);
}

TEST(OracleCorrelation, ThermalFactorialMoments) {
  const double nth = 0.5;
  const FockState s = build_squeezed_thermal(0, nth, recommended_cutoff(0, nth));
  double expect = 1;
  for (int m = 0; m <= 6; ++m) {
    if (m) expect *= m * nth;
    EXPECT_LT(rel(oracle_correlation(s, m, m).real(), expect), 1e-9) << m;
  }
}

TEST(OracleCorrelation, AgreesWithClosedFormOnGrid) {
  const double grid[] = {0.0, 0.1, 0.3, 1.0};
  for (double ns : grid)
    for (double nth : grid) {
      const StateParams p = StateParams::make(0, ns, nth);
      const FockState s = build_squeezed_thermal(ns, nth, recommended_cutoff(ns, nth));
      for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n) {
          const double e = to_double(correlation(p, m, n));
          const double o = oracle_correlation(s, m, n).real();
          if (e == 0.0) EXPECT_LE(std::abs(o), 1e-12);
          else EXPECT_LT(rel(o, e), 1e-9) << ns << " " << nth << " " << m << "," << n;
        }
    }
}

TEST(OracleCorrelation, TruncationConverged) {
  for (double ns : {0.1, 0.3, 1.0})
    for (double nth : {0.0, 0.1}) {
      const int c = recommended_cutoff(ns, nth);
      const FockState a = build_squeezed_thermal(ns, nth, c), b = build_squeezed_thermal(ns, nth, c + 10);
      for (int m = 0; m <= 4; ++m)
        for (int n = m; n <= 6; n += 2)
          EXPECT_LT(std::abs(oracle_correlation(a, m, n).real() - oracle_correlation(b, m, n).real()), 1e-10);
    }
}

TEST(OracleCorrelation, OrderBeyondCutoff) {
  const FockState s = build_squeezed_thermal(0.1, 0, 40);
  EXPECT_THROW(oracle_correlation(s, 11, 11), Error);
}

TEST(Coherent, TruncatedVectorMatchesFactorization) {
  for (double alpha : {0.3, 1.0, 2.0})
    for (int j = 0; j <= 4; ++j)
      for (int k = 0; k <= 4; ++k)
        EXPECT_NEAR(coherent_moment_truncated(alpha, j, k, 60).real(), std::pow(alpha, j + k), 1e-10);
}

TEST(OracleOdm, TwoPhotonClosedForm) {
  const StateParams p = StateParams::make(1, 0.3, 0);
  const Eigen::MatrixXd o = oracle_odm(p, 2);
  const Eigen::Matrix4d c = closed_form_r2(p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (c(i, j) == 0.0) EXPECT_LE(std::abs(o(i, j)), 1e-12);
      else EXPECT_LT(rel(o(i, j), c(i, j)), 1e-9);
    }
}

TEST(OracleOdm, ThreePhotonClosedForm) {
  const StateParams p = StateParams::make(1, 0.1, 0.05);
  const Eigen::MatrixXd o = oracle_odm(p, 3);
  const Eigen::Matrix<double, 8, 8> c = closed_form_r3(p);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      if (c(i, j) == 0.0) EXPECT_LE(std::abs(o(i, j)), 1e-12);
      else EXPECT_LT(rel(o(i, j), c(i, j)), 1e-9);
    }
}

TEST(OracleOdm, NoSqueezingGivesProductState) {
  const Eigen::MatrixXd o = oracle_odm(StateParams::make(1.5, 0, 0), 2);
  const Eigen::Matrix4d rho = o / o.trace();
  EXPECT_NEAR(rho(0, 0), 1.0, 1e-15);
  EXPECT_EQ(concurrence(rho), 0.0);
}

TEST(OracleOdm, MatchesClosedFormOdmUpToFivePhotons) {
  for (double nc : {0.1, 1.0, 10.0})
    for (double ns : {0.1, 1.0})
      for (double nth : {0.0, 0.1}) {
        const StateParams p = StateParams::make(nc, ns, nth);
        const FockState fs = build_fock_state(p, recommended_cutoff(ns, nth));
        for (int n = 1; n <= 5; ++n) {
          const Eigen::MatrixXd o = oracle_odm(fs, n), c = build_odm(p, n).dense(false);
          for (Eigen::Index k = 0; k < o.size(); ++k) {
            if (c.data()[k] == 0.0) EXPECT_LE(std::abs(o.data()[k]), 1e-9 * c.cwiseAbs().maxCoeff());
            else EXPECT_LT(rel(o.data()[k], c.data()[k]), 1e-9);
          }
        }
      }
}

TEST(OracleOdm, HermitianPositive) {
  const StateParams p = StateParams::make(2, 0.5, 0.1);
  for (int n = 1; n <= 4; ++n) {
    const Eigen::MatrixXd o = oracle_odm(p, n, recommended_cutoff(0.5, 0.1));
    const Eigen::MatrixXd r = o / o.trace();
    EXPECT_LE((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(OracleOdm, DimensionLimit) {
  const FockState s = build_fock_state(StateParams::make(1, 0.1, 0));
  for (int n : {0, 6}) {
    try {
      oracle_odm(s, n);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DimensionTooLarge);
    }
  }
}
