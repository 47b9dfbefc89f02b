#pragma once

#include <string>
#include <vector>

namespace okm::theory {

struct RatioSolution {
  double ratio = 0.0;
  double root = 0.0;      // x* > 1
  double residual = 0.0;  // |f(x*)|
};

// Left side of [(1 + sqrt(a))^2 x^2 - a](x - 1)^2 - 2x + 1 = 0.
double ratio_quartic(double a, double x);

// a = (c - 1) / 2. Ratio (1 + sqrt(a))^2 / a * x*^2 for the radius rule.
RatioSolution solve_phi(double c, double tol = 1e-12);
// a = c - 1, for the mid-range sum rule.
RatioSolution solve_psi(double c, double tol = 1e-12);
// k-Median ratio max{(2c - 1 + sqrt(4c + 1)) / (2(c - 1)), (c + 1) / (c - 1)}.
double zeta_kmedian(double c);

struct RatioRow {
  double c = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double zeta = 0.0;
  double root_phi = 0.0;
  double root_psi = 0.0;
};

struct RatioTable {
  std::vector<RatioRow> rows;
  double tolerance = 0.0;

  // Header c,phi,psi,zeta,root_phi,root_psi.
  std::string to_csv() const;
};

RatioTable ratio_table(const std::vector<double>& cs, double tol = 1e-12);

}  // namespace okm::theory
