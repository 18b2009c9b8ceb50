#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gradest/bernstein/levelset.hpp"
#include "gradest/bernstein/maximal.hpp"
#include "gradest/bernstein/scaling.hpp"
#include "gradest/bernstein/thm1.hpp"
#include "gradest/bernstein/thm2.hpp"
#include "gradest/solver/newton.hpp"

using namespace gradest;

namespace {

ProblemSpec trivial_problem(int N, double p, double gamma) {
  ProblemSpec pb;
  pb.N = N;
  pb.extents.assign(static_cast<std::size_t>(N), 1.0);
  pb.p = p;
  pb.gamma = gamma;
  pb.coefficient = PowerDiffusion{p};
  pb.source = SourceSpec{CosineProduct{std::pow(pb.eps, 0.5 * gamma), std::vector<int>(static_cast<std::size_t>(N), 0)}};
  return pb;
}

template <int Dim>
Grid<Dim> unit_grid(int n) {
  Box<Dim> b;
  b.extents.fill(1.0);
  typename Grid<Dim>::Index c;
  c.fill(n);
  return Grid<Dim>(b, c);
}

}  // namespace

TEST(Ledger, RowSemantics) {
  const auto id = make_row("a", RowKind::Identity, 1.0, 1.05, 0.01, 1.0);
  EXPECT_NEAR(id.tolerance, 0.1, 1e-15);
  EXPECT_TRUE(id.pass);
  EXPECT_FALSE(make_row("b", RowKind::Identity, 1.0, 1.2, 0.01, 1.0).pass);
  EXPECT_TRUE(make_row("c", RowKind::Inequality, 1.0, 1.09, 0.01, 1.0).pass);
  EXPECT_FALSE(make_row("d", RowKind::Inequality, 1.0, 1.11, 0.01, 1.0).pass);
  EXPECT_TRUE(make_row("e", RowKind::Inequality, 5.0, -3.0, 0.01, 0.0).pass);
  const auto emp = make_row("f", RowKind::Empirical, 6.0, 2.0, 0.01, 1.0);
  EXPECT_DOUBLE_EQ(emp.fitted, 3.0);
  EXPECT_TRUE(emp.pass);
  EXPECT_FALSE(make_row("g", RowKind::Inequality, NAN, 0.0, 0.01, 1.0).pass);
}

TEST(Constants, LinearDiffusionOracle) {
  ProblemSpec pb = trivial_problem(3, 2.0, 6.0);
  const auto c1 = thm1_constants(pb, 4.0);
  EXPECT_NEAR(c1.zeta1, 2.0, 1e-12);
  EXPECT_NEAR(c1.zeta2, 1.0, 1e-12);
  EXPECT_NEAR(c1.nu, 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(c1.c1, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(c1.c2, std::pow(16.0 + 2.0 * std::sqrt(3.0), 2) / 4.0, 1e-9);
  const auto c2 = thm2_constants(pb, 5.0, 11.0);
  EXPECT_NEAR(c2.nu2, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(c2.c10, 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(c2.c11, 2.0 / 3.0, 1e-12);
  EXPECT_GE(c2.c14, (3.0 + 36.0) / 2.0);
}

TEST(Thm1Ledger, ZeroSolutionGivesZeroRows) {
  const auto pb = trivial_problem(2, 3.0, 3.0);
  const auto res = solve<2>(pb, unit_grid<2>(12));
  const auto L = thm1_ledger(pb, res.u, 4.0);
  ASSERT_EQ(L.rows.size(), 6u);
  // Only the source terms survive: f = eps^{gamma/2} = 1e-3 enters squared.
  for (const auto& r : L.rows) {
    EXPECT_TRUE(r.pass) << r.id;
    EXPECT_LE(std::abs(r.lhs), 1e-10) << r.id;
  }
  EXPECT_EQ(L.find("diff1")->lhs, 0.0);
  EXPECT_TRUE(weak_identity_check(pb, res.u, 4.0).pass);
}

TEST(Thm1Ledger, SmoothSolutionPassesEveryRow) {
  ProblemSpec pb = trivial_problem(2, 3.0, 3.0);
  pb.source = SourceSpec{CosineProduct{8.0, {1, 2}}};
  const auto res = solve<2>(pb, unit_grid<2>(32));
  const auto L = thm1_ledger(pb, res.u, 6.0);
  for (const auto& r : L.rows) EXPECT_TRUE(r.pass) << r.id << " slack " << r.slack << " tol " << r.tolerance;
  for (const char* id : {"diff1", "diff2", "diff3", "rhs", "Hphi", "corollary"}) EXPECT_NE(L.find(id), nullptr) << id;
  EXPECT_LT(relative_gap(weak_identity_check(pb, res.u, 4.0)), 0.01);
}

TEST(Thm1Ledger, UnconvergedIterateRejected) {
  const auto pb = trivial_problem(2, 3.0, 3.0);
  const auto g = unit_grid<2>(12);
  const auto u = sample<2>(g, [](const std::array<double, 2>& x) { return std::cos(3.0 * x[0]) * x[1]; });
  EXPECT_THROW(weak_identity_check(pb, u, 4.0), RejectedInput);
  EXPECT_THROW(thm1_ledger(pb, u, 4.0), RejectedInput);
  EXPECT_THROW(weak_identity_check(pb, u, 1.0), ParameterError);
}

TEST(Thm2Ledger, EmptySuperlevelSetGivesZeroRows) {
  const auto pb = trivial_problem(3, 2.0, 6.0);
  const auto res = solve<3>(pb, unit_grid<3>(8));
  const auto L = thm2_ledger(pb, res.u, 2.0, Rational(3));
  ASSERT_EQ(L.rows.size(), 4u);
  for (const auto& r : L.rows) {
    EXPECT_TRUE(r.pass) << r.id;
    EXPECT_EQ(r.lhs, 0.0) << r.id;
  }
}

TEST(Thm2Ledger, ProofGapRefused) {
  const auto pb = trivial_problem(3, 2.0, 2.0);
  const auto res = solve<3>(pb, unit_grid<3>(8));
  EXPECT_THROW(thm2_ledger(pb, res.u, 1.0, Rational(5, 2)), RejectedInput);
}

TEST(Thm2Ledger, PreconditionsEnforced) {
  const auto pb = trivial_problem(3, 2.0, 6.0);
  const auto res = solve<3>(pb, unit_grid<3>(8));
  const auto ex = std::get<Theorem2Exponents>(theorem2_exponents(3, Rational(2), Rational(6), Rational(3)));
  EXPECT_THROW(thm2_ledger(pb, res.u, 0.5, ex), ParameterError);
}

TEST(Thm2Ledger, SmoothSolutionPassesEveryRow) {
  ProblemSpec pb = trivial_problem(3, 2.0, 3.0);
  pb.source = SourceSpec{CosineProduct{6.0, {1, 1, 1}}};
  const auto res = solve<3>(pb, unit_grid<3>(12));
  const auto L = thm2_ledger(pb, res.u, 1.0, Rational(3));
  for (const char* id : {"t2s1", "t2s2", "t2s4", "mainineq"}) {
    const auto* r = L.find(id);
    ASSERT_NE(r, nullptr) << id;
    EXPECT_TRUE(r->pass) << id << " slack " << r->slack << " tol " << r->tolerance;
  }
}

TEST(Dichotomy, SquareRootOracle) {
  // z^{1/2} = omega + z: with s = sqrt z, s^2 - s + omega = 0.
  const double omega = 0.1;
  const auto [zm, zp] = dichotomy_roots(0.5, 1.0, omega);
  ASSERT_TRUE(zm && zp);
  const double d = std::sqrt(1.0 - 4.0 * omega);
  EXPECT_NEAR(*zm, std::pow(0.5 * (1.0 - d), 2), 1e-12);
  EXPECT_NEAR(*zp, std::pow(0.5 * (1.0 + d), 2), 1e-12);
}

TEST(Dichotomy, NoRootsAboveTangency) {
  const auto [zm, zp] = dichotomy_roots(0.5, 1.0, 0.3);
  EXPECT_FALSE(zm);
  EXPECT_FALSE(zp);
}

TEST(Dichotomy, ZeroSlopeAndZeroOmega) {
  const auto [zm, zp] = dichotomy_roots(1.0 / 3.0, 0.0, 0.5);
  ASSERT_TRUE(zm);
  EXPECT_NEAR(*zm, 0.125, 1e-15);
  EXPECT_FALSE(zp);
  const auto [z0, z1] = dichotomy_roots(0.5, 2.0, 0.0);
  EXPECT_EQ(*z0, 0.0);
  EXPECT_NEAR(*z1, 0.25, 1e-12);
}

TEST(LevelScan, MonotoneQuantitiesOnRandomField) {
  const auto g = unit_grid<3>(10);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  ScalarField<3> u(g);
  for (auto& v : u.values) v = dist(rng);
  std::vector<double> ks;
  for (double k = 1.0; k <= 4.0; k += 0.25) ks.push_back(k);
  const auto scan = levelset_scan(u, 1e-2, 8.0 / 3.0, 6.0, ks);
  EXPECT_TRUE(scan.Z_nonincreasing());
  EXPECT_TRUE(scan.measure_nonincreasing());
  EXPECT_TRUE(scan.chebyshev_all());
  EXPECT_NEAR(scan.theta, 1.0 / 3.0, 1e-15);
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    EXPECT_GE(scan.rows[i].omega, scan.rows[i].omega_raw);
    if (i > 0) EXPECT_LE(scan.rows[i].omega, scan.rows[i - 1].omega);
  }
  EXPECT_THROW(levelset_scan(u, 1e-2, 3.0, 6.0, {2.0, 1.0}), ParameterError);
}

TEST(LevelScan, MeasureMatchesCellCount) {
  const auto g = unit_grid<2>(16);
  const auto u = sample<2>(g, [](const std::array<double, 2>& x) { return 4.0 * x[0]; });
  // |Du| = 4 in the interior columns, 2 in the two boundary columns.
  const auto scan = levelset_scan(u, 0.0, 3.0, 2.0, {1.0, 3.0, 5.0});
  EXPECT_NEAR(scan.rows[0].measure, 1.0, 1e-14);
  EXPECT_NEAR(scan.rows[1].measure, 14.0 / 16.0, 1e-14);
  EXPECT_EQ(scan.rows[2].measure, 0.0);
  EXPECT_NEAR(scan.rows[1].Z, 14.0 / 16.0, 1e-12);  // (4 - 3)^6 on the interior columns
}

TEST(MaximalNorm, PiecewiseConstantGradientOracle) {
  const int n = 16;
  const auto g = unit_grid<2>(n);
  const auto u = sample<2>(g, [](const std::array<double, 2>& x) { return x[0]; });
  const double q = 3.0, gamma = 2.0;
  // Interior columns have |Du| = 1, the two boundary columns 1/2.
  const double integral = ((n - 2.0) * n + 2.0 * n * std::pow(0.5, gamma * q)) / (n * n);
  const auto m = maximal_regularity_norms(u, q, gamma);
  EXPECT_NEAR(m.direct, std::pow(integral, 1.0 / q), 1e-13);
  EXPECT_LT(m.relative_difference(), 1e-13);
  EXPECT_THROW(maximal_regularity_norm(u, 0.5, gamma), ParameterError);
}

TEST(Scaling, LeastSquaresRecoversExactLine) {
  const std::vector<double> x{0.0, 1.0, 2.5, 4.0}, y{1.0, 3.0, 6.0, 9.0};
  const auto [s, b] = least_squares_line(x, y);
  EXPECT_NEAR(s, 2.0, 1e-14);
  EXPECT_NEAR(b, 1.0, 1e-14);
  EXPECT_THROW(least_squares_line({1.0, 1.0}, {0.0, 1.0}), ParameterError);
}

TEST(Scaling, TopHalfFitOfPowerLaw) {
  EstimateFit fit;
  for (int i = 1; i <= 7; ++i) {
    const double X = std::pow(2.0, i);
    // Power 0.5 at large X, with a perturbation that only affects the lower half.
    const double Y = 3.0 * std::sqrt(X) + (i <= 3 ? 5.0 : 0.0);
    fit.points.push_back({static_cast<double>(i), X, Y, true});
  }
  fit_top_half(fit);
  EXPECT_EQ(fit.fitted_points, 4);
  EXPECT_NEAR(fit.slope, 0.5, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
}

TEST(Scaling, ExponentsUseThreeDimensionalBookkeepingInTwoDimensions) {
  const auto e = scaling_exponents(2, Rational(3), Rational(6));
  EXPECT_EQ(e.eta, Rational(45, 2));
  EXPECT_EQ(e.q_eta, Rational(45, 17));
}
