// Acceptance suite: runs every cross-module requirement end to end on the
// vein-lattice fixture and prints one pass/fail line per criterion.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gapmode/birman.hpp"
#include "gapmode/config.hpp"
#include "gapmode/bulk.hpp"
#include "gapmode/errors.hpp"
#include "gapmode/geometry.hpp"
#include "gapmode/greens.hpp"
#include "gapmode/oracle.hpp"
#include "gapmode/pipeline.hpp"
#include "gapmode/strip.hpp"

using namespace gapmode;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& label,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Fixture: eps=9 vein lattice (air square rod, side 0.75) on a 48-grid;
// the defect raises the vein eps by t in the central supercell row.
DielectricMap fixture_map(double t) {
  std::vector<Shape> bg = {Shape::fill(9.0), Shape::rect(1.0, 0.5, 0.5, 0.75, 0.75)};
  std::vector<Shape> defect = {Shape::fill(10.0),
                               Shape::rect(1.0, 0.5, 0.5, 0.75, 0.75)};
  DielectricMap base = DielectricMap::build(bg, defect, 1, 48);
  return scale_defect(base, t);
}

constexpr double kKx0 = kPi;
constexpr int kCells = 11;
constexpr int kOrder = 5;

Eigen::VectorXcd random_vec(int n, std::mt19937& rng) {
  std::normal_distribution<double> g(0, 1);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

struct FixtureSystem {
  DielectricMap map;
  StripSpace space;
  FormMatrices forms;
  BlochDecomposition decomp;
  GapEdge edge;
};

GapEdge fixture_edge(const DielectricMap& map, int order = kOrder) {
  PlaneWaveBasis basis(order);
  BandStructure bs = compute_bands(map, make_k_grid(17, 17), 6, basis);
  auto gaps = find_gaps(bs);
  if (gaps.empty()) throw NoGap("fixture lost its gap");
  auto widest = *std::max_element(
      gaps.begin(), gaps.end(),
      [](const Gap& a, const Gap& b) { return a.width() < b.width(); });
  return locate_gap_edge(map, widest, kKx0, basis);
}

FixtureSystem make_fixture(double t, int n_cells = kCells, int order = kOrder) {
  DielectricMap map = fixture_map(t);
  GapEdge edge = fixture_edge(map, order);
  auto [space, forms] = build_strip(map, kKx0, n_cells, order);
  BlochDecomposition decomp = diagonalize_background(space, forms);
  return {std::move(map), std::move(space), std::move(forms), std::move(decomp),
          edge};
}

// ---------------------------------------------------------------------------

void criterion_1_empty_lattice() {
  auto start = Clock::now();
  bool ok = true;
  double worst = 0;
  for (double eps : {1.0, 4.0}) {
    std::vector<Shape> bg = {Shape::fill(eps)};
    DielectricMap map = DielectricMap::build(bg, {}, 0, 24);
    PlaneWaveBasis basis(4);
    BandStructure bs = compute_bands(map, make_k_grid(16, 16), 8, basis);
    for (size_t i = 0; i < bs.k_grid.size(); ++i) {
      std::vector<double> expect;
      for (int mx = -8; mx <= 8; ++mx)
        for (int my = -8; my <= 8; ++my) {
          double ax = bs.k_grid[i][0] + kTwoPi * mx;
          double ay = bs.k_grid[i][1] + kTwoPi * my;
          expect.push_back((ax * ax + ay * ay) / eps);
        }
      std::sort(expect.begin(), expect.end());
      for (int s = 0; s < 8; ++s) {
        double rel = std::abs(bs.bands(i, s) - expect[s]) /
                     std::max(std::abs(expect[s]), 1.0);
        worst = std::max(worst, rel);
        ok = ok && rel < 1e-10;
      }
    }
  }
  double secs = elapsed(start);
  ok = ok && secs < 10.0;
  report(1, ok, "empty-lattice exactness, 8 bands on 16x16 grid",
         fmt("worst rel %.2e, %.1f s", worst, secs));
}

void criterion_2_blochrep(const FixtureSystem& sys) {
  auto start = Clock::now();
  std::mt19937 rng(101);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXcd f = random_vec(sys.space.dim(), rng);
    Eigen::VectorXcd spectral = apply_G0(sys.space, sys.decomp, f);
    Eigen::VectorXcd direct = sys.forms.solve_b0(f);
    worst = std::max(worst, (spectral - direct).norm() / direct.norm());
  }
  double secs = elapsed(start);
  bool ok = worst < 1e-10 && secs < 30.0;
  report(2, ok, "discrete Bloch representation vs direct b0 solve",
         fmt("worst rel %.2e on 20 vectors, %.1f s", worst, secs));
}

void criterion_3_operator_identities(const FixtureSystem& sys,
                                 const DefectSubspace& sub) {
  std::mt19937 rng(2025);
  double worst = 0;

  std::vector<Eigen::VectorXcd> us, kus;
  for (int i = 0; i < 50; ++i) {
    us.push_back(random_vec(sys.space.dim(), rng));
    kus.push_back(apply_K(sys.forms, us.back()));
  }
  for (int i = 0; i < 50; ++i) {
    const auto& u = us[i];
    const auto& v = us[(i + 1) % 50];
    Complex a = h_minus1_inner(sys.forms, kus[i], v);
    Complex b = h_minus1_inner(sys.forms, kus[(i + 1) % 50], u);
    worst = std::max(worst, std::abs(a - std::conj(b)) / (std::abs(a) + 1e-30));
    double nrm2 = std::pow(h_minus1_norm(sys.forms, u), 2);
    double pos = h_minus1_inner(sys.forms, kus[i], u).real();
    worst = std::max(worst, std::max(0.0, -pos) / nrm2);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ges(sub.gram_k);
  double gmax = ges.eigenvalues().maxCoeff();
  worst = std::max(worst, std::max(0.0, -ges.eigenvalues().minCoeff()) / gmax);

  double mu_lo = 1.0 / (sys.edge.lambda1 + 1.0);
  double mu_hi = 1.0 / (sys.edge.lambda0 + 1.0);
  for (double f : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    double mu = mu_lo + f * (mu_hi - mu_lo);
    auto [n_mat, m_mat] = assemble_A_mu(sys.space, sys.decomp, sub, mu);
    Eigen::MatrixXcd rk(sys.space.dim(), sub.rank());
    for (int j = 0; j < sub.rank(); ++j)
      rk.col(j) =
          apply_shifted_resolvent(sys.space, sys.decomp, mu, sub.k_basis.col(j));
    Eigen::MatrixXcd n_direct = sub.k_basis.adjoint() * sys.forms.solve_b0(rk);
    double nscale = n_mat.cwiseAbs().maxCoeff();
    worst = std::max(
        worst, (n_direct - n_direct.adjoint()).cwiseAbs().maxCoeff() / nscale);
    worst = std::max(worst, (n_direct - n_mat).cwiseAbs().maxCoeff() / nscale);

    Eigen::VectorXcd u = random_vec(sys.space.dim(), rng);
    Eigen::VectorXcd v = random_vec(sys.space.dim(), rng);
    Complex a = h_minus1_inner(
        sys.forms, apply_shifted_resolvent(sys.space, sys.decomp, mu, u), v);
    Complex b = h_minus1_inner(
        sys.forms, u, apply_shifted_resolvent(sys.space, sys.decomp, mu, v));
    worst = std::max(worst, std::abs(a - b) / (std::abs(a) + 1e-30));
  }

  report(3, worst < 1e-9, "operator identities (K, gram_K, A_mu, resolvent)",
         fmt("worst residual %.2e", worst));
}

void criterion_4_bounds() {
  FixtureSystem sys = make_fixture(0.2);
  NormBundle norms = sys.map.compute_norms();
  try {
    BoundReport rep = verify_lem12_bounds(sys.space, sys.forms, norms, 100, 42);
    report(4, true, "operator bound suite, 100 vectors at t=0.2",
           fmt("||K|| est %.3e <= %.3e, slack_i %.2e", rep.k_norm_estimate,
               rep.k_norm_bound, rep.worst_slack_i));
  } catch (const BoundViolation& e) {
    report(4, false, "operator bound suite, 100 vectors at t=0.2", e.what());
  }
}

void criterion_5_kappa_laws(const FixtureSystem& sys, const DefectSubspace& sub,
                            const KappaCurve& curve) {
  NormBundle norms = sys.map.compute_norms();
  bool mono = true, lower = true, diverge = true;
  for (size_t i = 0; i + 1 < curve.kappa_values.size(); ++i)
    mono = mono && curve.kappa_values[i] <= curve.kappa_values[i + 1] + 1e-9;
  for (size_t i = 0; i < curve.mu_samples.size(); ++i) {
    double rq = norms.g1_norm_bound * norms.inv_diff_weighted /
                (1.0 - curve.mu_samples[i] * (sys.edge.lambda1 + 1.0));
    lower = lower && curve.kappa_values[i] >= rq - 1e-9;
  }
  double mu_lo = 1.0 / (sys.edge.lambda1 + 1.0);
  double width = 1.0 / (sys.edge.lambda0 + 1.0) - mu_lo;
  std::vector<double> seq;
  for (int k = 0; k <= 4; ++k)
    seq.push_back(kappa(sys.space, sys.decomp, sub,
                        mu_lo + width / 8.0 / std::pow(2.0, k)));
  for (int k = 0; k + 1 <= 4; ++k) diverge = diverge && seq[k + 1] < seq[k];

  report(5, mono && lower && diverge,
         "kappa curve: monotone, lower bound, edge divergence",
         fmt("kappa range [%.3f, %.3f], halving-sequence drop %.3e",
             curve.kappa_values.front(), curve.kappa_values.back(),
             seq.back() - seq.front()));
}

struct CrossResult {
  double t = 0;
  double lambda_bs = 0, lambda_oracle = 0, residual = 0;
  bool in_gap = false;
};

void criterion_6_cross_method(std::vector<CrossResult>& out) {
  auto start = Clock::now();
  bool ok = true;
  double worst_rel = 0;
  for (double t : {0.5, 1.0, 3.0}) {
    FixtureSystem sys = make_fixture(t);
    DefectSubspace sub = build_defect_subspace(sys.space, sys.forms, sys.decomp);
    KappaCurve curve =
        find_crossing(sys.space, sys.forms, sys.decomp, sub, sys.edge);
    CrossResult res;
    res.t = t;
    if (curve.crossing_lambda) {
      res.lambda_bs = *curve.crossing_lambda;
      res.residual = curve.crossing_residual;
      res.in_gap =
          res.lambda_bs > sys.edge.lambda0 && res.lambda_bs < sys.edge.lambda1;
      OracleResult orc =
          supercell_eigensolve(sys.space, sys.forms, sys.map, sys.edge);
      double best = 1e300;
      for (double l : orc.gap_eigenvalues)
        if (std::abs(l - res.lambda_bs) < std::abs(best - res.lambda_bs)) best = l;
      res.lambda_oracle = best;
    }
    out.push_back(res);
    if (res.lambda_bs == 0 || res.lambda_oracle > 1e200 || !res.in_gap) {
      ok = false;
      continue;
    }
    double rel = std::abs(res.lambda_bs - res.lambda_oracle) / res.lambda_bs;
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel < 1e-3;
  }
  double secs = elapsed(start);
  ok = ok && secs < 300.0;
  report(6, ok, "cross-method agreement at t in {0.5, 1, 3}",
         fmt("worst rel diff %.2e, %.0f s", worst_rel, secs));
}

void criterion_7_weak_trend() {
  std::vector<double> ts;
  for (int i = 0; i < 6; ++i)
    ts.push_back(3.0 * std::pow(0.05 / 3.0, i / 5.0));  // 3 down to 0.05
  std::vector<double> lams;
  bool cond_ok = true, trend_ok = true, below_edge = true;
  double lambda1 = 0;
  int crossings = 0;
  for (size_t i = 0; i < ts.size(); ++i) {
    FixtureSystem sys = make_fixture(ts[i]);
    lambda1 = sys.edge.lambda1;
    DefectSubspace sub = build_defect_subspace(sys.space, sys.forms, sys.decomp);
    KappaCurve curve =
        find_crossing(sys.space, sys.forms, sys.decomp, sub, sys.edge);
    if (curve.crossing_lambda) {
      lams.push_back(*curve.crossing_lambda);
      below_edge = below_edge && *curve.crossing_lambda < lambda1;
      ++crossings;
    } else {
      lams.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    if (i >= ts.size() - 3) {
      NormBundle norms = sys.map.compute_norms();
      AssumptionReport ar = sys.map.validate_assumptions();
      ConditionReport cr =
          check_condition(norms, sys.edge, ar.strict_witness_ok);
      cond_ok = cond_ok && cr.cond_satisfied && cr.cond1_satisfied &&
                cr.cond_weighted_satisfied && cr.cond1_weighted_satisfied &&
                cr.assumptions_hold;
    }
  }
  for (size_t i = 0; i + 1 < lams.size(); ++i) {
    if (std::isnan(lams[i]) || std::isnan(lams[i + 1])) continue;
    trend_ok = trend_ok && lams[i + 1] > lams[i];
  }
  report(7, cond_ok && trend_ok && below_edge && crossings > 0,
         "weak-amplitude sweep: lambda* climbs toward the edge; condition holds",
         fmt("lambda*(t=3)=%.6f up to lambda*(t=0.05)=%.9f < %.9f",
             lams.front(), lams.back(), lambda1));
}

void criterion_8_decay() {
  bool ok = true;
  double g1 = 0, g3 = 0, control_gamma = 1.0;
  for (double t : {1.0, 3.0}) {
    FixtureSystem sys = make_fixture(t, 19);
    OracleResult orc =
        supercell_eigensolve(sys.space, sys.forms, sys.map, sys.edge);
    ok = ok && !orc.gap_eigenvalues.empty();
    for (const DecayFit& fit : orc.decay)
      ok = ok && fit.gamma > 0 && fit.r2 >= 0.9;
    if (!orc.decay.empty()) (t == 1.0 ? g1 : g3) = orc.decay.front().gamma;
    if (t == 3.0) {
      int node = 2, s = 0;
      Eigen::VectorXcd bulk = Eigen::VectorXcd::Zero(sys.space.dim());
      for (int c = 0; c < sys.space.block_dim(); ++c)
        bulk(sys.space.strip_index(node, c)) = sys.decomp.psi[node](c, s);
      control_gamma = decay_rate(sys.space, sys.map, bulk).gamma;
      ok = ok && std::abs(control_gamma) < 0.05;
    }
  }
  report(8, ok, "decay at N_c=19: gamma > 0, R^2 >= 0.9, extended control",
         fmt("gamma(t=1)=%.3f, gamma(t=3)=%.3f, control %.2e", g1, g3,
             control_gamma));
}

void criterion_9_reconstruction(const std::vector<CrossResult>& cross) {
  bool ok = !cross.empty();
  double worst = 0;
  for (const auto& r : cross) {
    worst = std::max(worst, r.residual);
    ok = ok && r.residual < 1e-6 && r.residual > 0;
  }
  report(9, ok, "reconstruction residual at each crossing",
         fmt("worst rel residual %.2e", worst));
}

void criterion_10_convergence() {
  DielectricMap map = fixture_map(1.0);
  ConvergenceOptions opt;
  opt.base_cells = kCells;
  opt.base_order = kOrder;
  opt.k_grid = 13;
  opt.fine_grid = 192;
  opt.n_bands = 6;
  ConvergenceTable table =
      convergence_study(map, kKx0, {11, 15, 19}, {4, 6, 8}, opt);
  bool ok = table.cauchy_cells.size() == 2 && table.cauchy_orders.size() == 2;
  for (const auto& row : table.rows) ok = ok && row.crossed;
  std::string detail = "missing crossings";
  if (ok) {
    ok = table.cauchy_cells[1] < table.cauchy_cells[0] &&
         table.cauchy_orders[1] < table.cauchy_orders[0];
    detail = fmt("cells |d lambda*|: %.3e -> %.3e; ", table.cauchy_cells[0],
                 table.cauchy_cells[1]) +
             fmt("orders: %.3e -> %.3e", table.cauchy_orders[0],
                 table.cauchy_orders[1]);
  }
  report(10, ok, "Cauchy convergence over N_c {11,15,19} and G {4,6,8}", detail);
}

}  // namespace

int main() {
  auto start = Clock::now();
  std::printf("gapmode acceptance suite\n");

  criterion_1_empty_lattice();

  FixtureSystem sys = make_fixture(1.0);
  criterion_2_blochrep(sys);
  DefectSubspace sub = build_defect_subspace(sys.space, sys.forms, sys.decomp);
  criterion_3_operator_identities(sys, sub);
  criterion_4_bounds();
  KappaCurve curve =
      find_crossing(sys.space, sys.forms, sys.decomp, sub, sys.edge);
  criterion_5_kappa_laws(sys, sub, curve);

  std::vector<CrossResult> cross;
  criterion_6_cross_method(cross);
  criterion_7_weak_trend();
  criterion_8_decay();
  criterion_9_reconstruction(cross);
  criterion_10_convergence();

  std::printf("%d criteria failed; total %.0f s\n", g_failures, elapsed(start));
  return g_failures == 0 ? 0 : 1;
}
