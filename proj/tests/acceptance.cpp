// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include "okm/bench.hpp"
#include "okm/oracle.hpp"
#include "okm/recipes.hpp"
#include "okm/theory.hpp"

#include <Eigen/QR>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

using namespace okm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// Every pipeline run in the suite; the cost check applies to all of them.
struct CostLedger {
  long runs = 0;
  long violations = 0;
  void record(const ClusteringResult& r) {
    ++runs;
    if (!(r.robust_cost <= r.removed_cost)) ++violations;
  }
};

CostLedger g_costs;

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  const int raw = pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

Criterion theory_table() {
  Criterion c;
  const double cs[] = {2, 3, 4, 5, 10};
  const double phi[] = {14.30, 9, 7.04, 5.98, 3.99};
  const double psi[] = {9, 5.98, 4.84, 4.21, 2.96};
  const double zeta[] = {3, 2.15, 1.85, 1.70, 1.41};

  const auto start = Clock::now();
  int status = 0;
  const std::string csv = run_capture(std::string(OKM_BENCH_EXE) + " theory --c-list 2,3,4,5,10 2>/dev/null", status);
  const double elapsed = seconds_since(start);
  c.check(status == 0, "bench theory exit status " + std::to_string(status));
  c.check(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  c.check(line == "c,phi,psi,zeta,root_phi,root_psi", "header '" + line + "'");
  int row = 0;
  while (std::getline(in, line) && row < 5) {
    double v[6];
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3], &v[4], &v[5]) != 6) {
      c.check(false, "malformed row '" + line + "'");
      break;
    }
    const std::string at = " at c=" + fmt(cs[row]);
    c.check(v[0] == cs[row], "row order" + at);
    c.check(std::abs(v[1] - phi[row]) <= 0.01, "phi " + fmt(v[1]) + " vs " + fmt(phi[row]) + at);
    c.check(std::abs(v[2] - psi[row]) <= 0.01, "psi " + fmt(v[2]) + " vs " + fmt(psi[row]) + at);
    c.check(std::abs(v[3] - zeta[row]) <= 0.01, "zeta " + fmt(v[3]) + " vs " + fmt(zeta[row]) + at);
    ++row;
  }
  c.check(row == 5, "expected 5 rows, got " + std::to_string(row));
  c.note("runtime " + fmt(elapsed, 3) + " s");
  return c;
}

Criterion exact_root() {
  Criterion c;
  const theory::RatioSolution s = theory::solve_phi(3.0);
  c.check(std::abs(s.root - 1.5) <= 1e-12, "root " + fmt(s.root, 17));
  c.check(s.residual <= 1e-10, "residual " + fmt(s.residual));
  c.check(std::abs(theory::ratio_quartic(1.0, 1.5)) <= 1e-10, "quartic at 1.5");
  c.check(std::abs(s.ratio - 9.0) <= 1e-9, "phi(3) " + fmt(s.ratio, 17));
  for (double x : {2.0, 3.0, 5.5}) {
    const double gap = std::abs(theory::solve_psi(x).ratio - theory::solve_phi(2 * x - 1).ratio);
    c.check(gap <= 1e-6, "psi(c) vs phi(2c-1) at c=" + fmt(x) + ": " + fmt(gap));
  }
  c.note("root " + fmt(s.root, 17) + ", phi(3) " + fmt(s.ratio, 17));
  return c;
}

Criterion ratio_suite() {
  Criterion c;
  const auto start = Clock::now();
  // The sweep checks the cost invariant on each of its runs internally.
  const SweepResult sweep = ratio_sweep({}, 200, 3.0, 2024);
  const double elapsed = seconds_since(start);
  c.check(sweep.trials == 200, "trials " + std::to_string(sweep.trials));
  c.check(sweep.max_ratio_okmeans <= 9.0, "OKMeans worst ratio " + fmt(sweep.max_ratio_okmeans));
  c.check(sweep.max_ratio_okmeans2 <= 5.98 + 1e-9, "OKMeans2 worst ratio " + fmt(sweep.max_ratio_okmeans2));
  c.check(sweep.min_ratio >= 1.0 - 1e-9, "ratio below 1: " + fmt(sweep.min_ratio));
  c.check(elapsed < 300.0, "runtime " + fmt(elapsed) + " s");
  g_costs.runs += 2L * sweep.trials;
  if (!sweep.cost_never_increased) ++g_costs.violations;
  c.note("worst OKMeans " + fmt(sweep.max_ratio_okmeans) + ", worst OKMeans2 " + fmt(sweep.max_ratio_okmeans2) +
         ", resampled " + std::to_string(sweep.rejected) + ", " + fmt(elapsed, 3) + " s");
  return c;
}

Criterion oracle_equivalence() {
  Criterion c;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    std::mt19937_64 rng(mix_seed(77, t));
    PlantedSpec spec;
    spec.k = std::uniform_int_distribution<Index>(1, 3)(rng);
    spec.cluster_size = 2;
    spec.cluster_size_max = 10 / spec.k;
    spec.z = 0;
    spec.d = std::uniform_int_distribution<Index>(1, 3)(rng);
    spec.separation = std::uniform_real_distribution<double>(2.0, 12.0)(rng);
    spec.seed = rng();
    const RobustInstance inst = generate_planted(spec);
    const double opt = brute_force_robust(inst).opt_cost;
    SolverConfig cfg;
    cfg.k = inst.k;
    cfg.restarts = 5;
    cfg.seed = t;
    const double got = solve_kmeans(inst.data, std::nullopt, cfg).cost;
    const double rel = opt > 0 ? std::abs(got - opt) / opt : std::abs(got);
    worst = std::max(worst, rel);
    c.check(rel <= 1e-6, "instance " + std::to_string(t) + " (n=" + std::to_string(inst.data.size()) +
                             ", k=" + std::to_string(inst.k) + "): relative gap " + fmt(rel));
  }
  c.note("50 instances, worst relative gap " + fmt(worst));
  return c;
}

Criterion recall_suite() {
  Criterion c;
  Dataset shuttle = normalize_zscore(recipes::shuttle_like(0));
  shuttle = mark_label_outliers(shuttle, smallest_classes(*shuttle.labels, 2));
  const RobustInstance inst{shuttle, 10, shuttle.outlier_count()};

  const auto start = Clock::now();
  SolverConfig cfg;
  cfg.k = inst.k;
  const ClusteringResult a = run_okmeans(inst, 3.0, cfg);
  const ClusteringResult b = run_okmeans2(inst, 3.0, cfg);
  g_costs.record(a);
  g_costs.record(b);
  const double ra = *bench::recall(a.outliers, shuttle.true_outliers);
  const double rb = *bench::recall(b.outliers, shuttle.true_outliers);
  c.check(std::abs(ra - rb) <= 0.05, "SHUTTLE-like recall " + fmt(ra) + " vs " + fmt(rb));
  c.check(a.removed == b.removed, "SHUTTLE-like score-selected sets differ");
  c.note("SHUTTLE-like n=" + std::to_string(inst.data.size()) + ", z=" + std::to_string(inst.z) + ": recall " +
         fmt(ra) + " / " + fmt(rb) + ", identical removal sets " + (a.removed == b.removed ? "yes" : "no") + ", " +
         fmt(seconds_since(start), 3) + " s");

  int trials = 0;
  for (std::uint64_t t = 0; t < 30; ++t) {
    std::mt19937_64 rng(mix_seed(5, t));
    PlantedSpec spec;
    spec.k = std::uniform_int_distribution<Index>(2, 5)(rng);
    spec.cluster_size = std::uniform_int_distribution<Index>(20, 60)(rng);
    spec.z = std::uniform_int_distribution<Index>(1, 6)(rng);
    spec.d = std::uniform_int_distribution<Index>(2, 5)(rng);
    spec.separation = 20.0;
    spec.seed = rng();
    const RobustInstance planted = generate_planted(spec);
    SolverConfig pc;
    pc.k = spec.k;
    pc.seed = t;
    for (const ClusteringResult& r : {run_okmeans(planted, 3.0, pc), run_okmeans2(planted, 3.0, pc)}) {
      g_costs.record(r);
      const double rec = *bench::recall(r.outliers, planted.data.true_outliers);
      c.check(rec == 1.0, r.method + " recall " + fmt(rec) + " on far-outlier trial " + std::to_string(t));
    }
    ++trials;
  }
  c.note("far-outlier family: " + std::to_string(trials) + " trials x 2 methods");
  return c;
}

Criterion invariant_suite() {
  Criterion c;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 2.0);
  const auto random_matrix = [&](Index n, Index d) {
    Matrix m(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < d; ++j) m(i, j) = g(rng);
    return m;
  };

  // KNN table vs a full sort of exact distances.
  double knn_gap = 0.0;
  for (Index n : {Index{7}, Index{50}, Index{120}, Index{200}}) {
    const Matrix x = random_matrix(n, 3);
    const Index K = std::min<Index>(n, 10);
    const NeighborTable t = knn_table(x, K, {32});
    for (Index i = 0; i < n; ++i) {
      std::vector<double> d;
      for (Index j = 0; j < n; ++j) d.push_back((x.row(i) - x.row(j)).norm());
      std::sort(d.begin(), d.end());
      for (Index r = 0; r < K; ++r) knn_gap = std::max(knn_gap, std::abs(t.dists(i, r) - d[static_cast<std::size_t>(r)]));
    }
  }
  c.check(knn_gap <= 1e-9, "KNN vs full sort gap " + fmt(knn_gap));

  // Blocked distances vs naive loop, relative.
  double block_rel = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Matrix a = random_matrix(5, 3);
    const Matrix b = random_matrix(5, 3);
    const auto sq = pairwise_sq_dists_block(a, b);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) {
        double naive = 0.0;
        for (Index k = 0; k < 3; ++k) naive += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
        block_rel = std::max(block_rel, std::abs(sq(i, j) - naive) / std::max(naive, 1e-300));
      }
  }
  c.check(block_rel <= 1e-9, "blocked vs naive relative error " + fmt(block_rel));

  // Scores under a rotation plus translation.
  const Matrix x = random_matrix(100, 4);
  const Eigen::Matrix4d q = Eigen::Matrix4d(random_matrix(4, 4)).householderQr().householderQ();
  Matrix y = x * q.transpose();
  y.rowwise() += Eigen::RowVector4d(3, -1, 8, 0.5);
  const NeighborTable tx = knn_table(x, 9);
  const NeighborTable ty = knn_table(y, 9);
  double iso = 0.0;
  const auto compare = [&](const Vector& a, const Vector& b) {
    iso = std::max(iso, ((a - b).array().abs() / b.array().abs().max(1.0)).maxCoeff());
  };
  compare(score_vanilla(tx, 3, 3.0).scores, score_vanilla(ty, 3, 3.0).scores);
  compare(score_midrange_sum(tx, 3, 3.0).scores, score_midrange_sum(ty, 3, 3.0).scores);
  compare(score_constant_k(tx, 4).scores, score_constant_k(ty, 4).scores);
  c.check(iso <= 1e-7, "isometry score drift " + fmt(iso));

  // Coreset budget scaling.
  Dataset big;
  big.points = random_matrix(1000, 2);
  for (Index z : {Index{1}, Index{7}, Index{10}, Index{55}}) {
    for (Index m : {Index{60}, Index{100}, Index{333}, Index{500}, Index{1000}}) {
      const RobustInstance inst{big, 2, z};
      const Index expected = std::max<Index>(1, std::llround(static_cast<double>(z * m) / 1000.0));
      const Index got = uniform_coreset(inst, {m, 3}).instance.z;
      c.check(got == expected, "coreset z' for z=" + std::to_string(z) + ", m=" + std::to_string(m) + ": " +
                                   std::to_string(got));
    }
  }

  // End-to-end determinism, through the CLI and across worker counts.
  const std::string cmd = std::string(OKM_BENCH_EXE) + " run " + OKM_SOURCE_DIR + "/configs/planted.cfg";
  int s1 = 0;
  int s2 = 0;
  const std::string first = run_capture(cmd, s1);
  const std::string second = run_capture(cmd + " --set workers=3", s2);
  c.check(s1 == 0 && s2 == 0, "bench run exit status");
  c.check(!first.empty() && first == second, "bench run output differs between runs");

  bench::ExperimentConfig cfg = bench::load_config(std::string(OKM_SOURCE_DIR) + "/configs/planted.cfg");
  cfg.methods = {"okmeans:3", "okmeans2:3", "constk:2", "kmeanspp"};
  RobustInstance inst;
  inst.data = bench::build_dataset(cfg.dataset);
  inst.k = cfg.k;
  inst.z = inst.data.outlier_count();
  for (const auto& spec : cfg.methods) {
    Method m = Method::parse(spec);
    m.solver.k = cfg.k;
    m.solver.seed = 17;
    const ClusteringResult ra = run_pipeline(inst, m, CoresetSpec{80, 4});
    const ClusteringResult rb = run_pipeline(inst, m, CoresetSpec{80, 4});
    g_costs.record(ra);
    g_costs.record(rb);
    auto a = to_json(ra);
    auto b = to_json(rb);
    a.erase("elapsed_s");
    b.erase("elapsed_s");
    c.check(a.dump() == b.dump(), spec + " result differs between identical runs");
  }
  c.note("KNN gap " + fmt(knn_gap) + ", block error " + fmt(block_rel) + ", isometry drift " + fmt(iso));
  return c;
}

Criterion not_reproduced() {
  Criterion c;
  c.note("out of scope: full-scale SUSY/KDDFULL rows and the TIKMeans/IKMeans/NKMeans/RobustKMeans++ rows");
  // KMeans++ should show larger cost spread across seeds than OKMeans on
  // contaminated planted data.
  int wider = 0;
  const int families = 5;
  for (int f = 0; f < families; ++f) {
    bench::ExperimentConfig cfg = bench::load_config(std::string(OKM_SOURCE_DIR) + "/configs/planted.cfg");
    cfg.dataset.seed = static_cast<std::uint64_t>(f + 1);
    cfg.methods = {"okmeans:3", "kmeanspp"};
    const auto rows = bench::run_experiment(cfg);
    c.check(rows[0].status == "ok" && rows[1].status == "ok", "planted experiment failed");
    if (rows[1].cost_std > rows[0].cost_std) ++wider;
    c.check(rows[1].cost_mean > rows[0].cost_mean, "KMeans++ mean cost not above OKMeans on family " +
                                                        std::to_string(f));
  }
  c.check(wider == families, "KMeans++ cost std above OKMeans on " + std::to_string(wider) + "/" +
                                 std::to_string(families) + " planted datasets");
  c.note("KMeans++ cost std above OKMeans on " + std::to_string(wider) + "/" + std::to_string(families) +
         " planted datasets");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* title;
    Criterion (*run)();
  };
  const Entry entries[] = {
      {1, "theory table reproduction", theory_table},
      {2, "exact root check", exact_root},
      {3, "ratio property suite", ratio_suite},
      {4, "oracle equivalence", oracle_equivalence},
      {5, "recall at desk scale", recall_suite},
      {7, "invariant suite", invariant_suite},
      {8, "not-reproduced scope and KMeans++ variance", not_reproduced},
  };

  // Criterion 6 is reported last because it covers the pipelines run by
  // all the other suites.
  int failures = 0;
  const auto report = [&](int id, const char* title, const Criterion& c) {
    std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << '\n';
    for (const auto& n : c.notes) std::cout << "     " << n << '\n';
    std::cout.flush();
    if (!c.pass) ++failures;
  };

  for (const Entry& e : entries) {
    Criterion c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.check(false, std::string("exception: ") + ex.what());
    }
    report(e.id, e.title, c);
  }

  Criterion cost;
  cost.check(g_costs.violations == 0, std::to_string(g_costs.violations) + " runs with f_z(X, C) > f(X \\ O, C)");
  cost.note(std::to_string(g_costs.runs) + " pipeline runs checked");
  report(6, "cost never increases on recomputation", cost);

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
