#include "okm/theory.hpp"
#include "okm/types.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace okm;
using namespace okm::theory;

TEST(Theory, PublishedPhiPsiZeta) {
  const double cs[] = {2, 3, 4, 5, 10};
  const double phi[] = {14.30, 9, 7.04, 5.98, 3.99};
  const double psi[] = {9, 5.98, 4.84, 4.21};
  const double zeta[] = {3, 2.15, 1.85, 1.70, 1.41};
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(solve_phi(cs[i]).ratio, phi[i], 0.01) << "c=" << cs[i];
    EXPECT_NEAR(zeta_kmedian(cs[i]), zeta[i], 0.01) << "c=" << cs[i];
  }
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(solve_psi(cs[i]).ratio, psi[i], 0.01) << "c=" << cs[i];
}

// Frozen from the root finder; agrees with Phi(19).
TEST(Theory, PsiAtTenFromRoot) {
  EXPECT_NEAR(solve_psi(10).ratio, 2.995712979, 1e-8);
  EXPECT_NEAR(solve_psi(10).ratio, solve_phi(19).ratio, 1e-9);
}

TEST(Theory, ExactRootAtThree) {
  const RatioSolution s = solve_phi(3.0);
  EXPECT_NEAR(s.root, 1.5, 1e-12);
  EXPECT_LE(s.residual, 1e-10);
  EXPECT_NEAR(s.ratio, 9.0, 1e-9);
  EXPECT_EQ(ratio_quartic(1.0, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(solve_psi(2.0).ratio, solve_phi(3.0).ratio);
}

TEST(Theory, PsiIsPhiAtTwoCMinusOne) {
  for (double c : {1.3, 2.0, 3.0, 5.5, 8.0, 25.0}) EXPECT_NEAR(solve_psi(c).ratio, solve_phi(2 * c - 1).ratio, 1e-6);
}

TEST(Theory, ResidualsAndRoots) {
  for (double c = 1.05; c < 60; c *= 1.3) {
    for (const RatioSolution& s : {solve_phi(c), solve_psi(c)}) {
      EXPECT_GT(s.root, 1.0);
      EXPECT_LE(s.residual, 1e-12);
      EXPECT_GE(s.ratio, 1.0);
    }
  }
}

TEST(Theory, MonotoneAndOrdered) {
  const RatioTable t = ratio_table({1.2, 1.5, 2, 3, 4, 5, 7.5, 10, 50, 100});
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LT(t.rows[i].phi, t.rows[i - 1].phi);
    EXPECT_LT(t.rows[i].psi, t.rows[i - 1].psi);
    EXPECT_LE(t.rows[i].zeta, t.rows[i - 1].zeta);
  }
  for (const RatioRow& r : t.rows) EXPECT_GE(r.phi, r.psi);
}

TEST(Theory, ZetaClosedForm) {
  for (double c : {1.5, 2.0, 3.0, 7.0}) {
    const double a = (2 * c - 1 + std::sqrt(4 * c + 1)) / (2 * (c - 1));
    const double b = (c + 1) / (c - 1);
    EXPECT_DOUBLE_EQ(zeta_kmedian(c), std::max(a, b));
  }
  EXPECT_DOUBLE_EQ(zeta_kmedian(2.0), 3.0);
}

TEST(Theory, Contracts) {
  EXPECT_THROW(solve_phi(1.0), ContractViolation);
  EXPECT_THROW(solve_psi(0.5), ContractViolation);
  EXPECT_THROW(zeta_kmedian(1.0), ContractViolation);
  EXPECT_THROW(solve_phi(3.0, 0.0), ContractViolation);
}

TEST(Theory, CsvLayout) {
  const std::string csv = ratio_table({3}).to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "c,phi,psi,zeta,root_phi,root_psi");
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 4), "3,9,");
}
