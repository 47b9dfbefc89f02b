#include "okm/theory.hpp"

#include "okm/types.hpp"

#include <cmath>
#include <cstdio>

namespace okm::theory {

namespace {

constexpr double kBracketLo = 1.0 + 1e-9;
constexpr double kBracketHi = 100.0;

// Bisection for the root of ratio_quartic(a, .) above 1. The quartic is
// negative just above 1 (value -1 at x = 1) and positive at the upper end.
RatioSolution solve_ratio(double a, double tol) {
  double lo = kBracketLo;
  double hi = kBracketHi;
  const double f_lo = ratio_quartic(a, lo);
  const double f_hi = ratio_quartic(a, hi);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw SolverError("ratio quartic has no sign change on [1+1e-9, 100] for a=" + std::to_string(a));
  }
  double best = lo;
  double best_residual = std::abs(f_lo);
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = ratio_quartic(a, mid);
    if (std::abs(f) < best_residual) {
      best = mid;
      best_residual = std::abs(f);
    }
    if (f == 0.0) break;
    (f < 0.0 ? lo : hi) = mid;
  }
  if (!(best_residual <= tol)) {
    throw SolverError("ratio quartic residual " + std::to_string(best_residual) + " exceeds tolerance");
  }
  const double lead = (1.0 + std::sqrt(a)) * (1.0 + std::sqrt(a));
  return {lead / a * best * best, best, best_residual};
}

}  // namespace

double ratio_quartic(double a, double x) {
  const double lead = (1.0 + std::sqrt(a)) * (1.0 + std::sqrt(a));
  return (lead * x * x - a) * (x - 1.0) * (x - 1.0) - 2.0 * x + 1.0;
}

RatioSolution solve_phi(double c, double tol) {
  require(c > 1.0, "solve_phi needs c > 1");
  require(tol > 0.0, "solve_phi needs tol > 0");
  return solve_ratio((c - 1.0) / 2.0, tol);
}

RatioSolution solve_psi(double c, double tol) {
  require(c > 1.0, "solve_psi needs c > 1");
  require(tol > 0.0, "solve_psi needs tol > 0");
  return solve_ratio(c - 1.0, tol);
}

double zeta_kmedian(double c) {
  require(c > 1.0, "zeta_kmedian needs c > 1");
  const double first = (2.0 * c - 1.0 + std::sqrt(4.0 * c + 1.0)) / (2.0 * (c - 1.0));
  const double second = (c + 1.0) / (c - 1.0);
  return std::max(first, second);
}

RatioTable ratio_table(const std::vector<double>& cs, double tol) {
  RatioTable table;
  table.tolerance = tol;
  for (double c : cs) {
    const RatioSolution phi = solve_phi(c, tol);
    const RatioSolution psi = solve_psi(c, tol);
    table.rows.push_back({c, phi.ratio, psi.ratio, zeta_kmedian(c), phi.root, psi.root});
  }
  return table;
}

std::string RatioTable::to_csv() const {
  std::string out = "c,phi,psi,zeta,root_phi,root_psi\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.c, r.phi, r.psi, r.zeta, r.root_phi,
                  r.root_psi);
    out += buf;
  }
  return out;
}

}  // namespace okm::theory
