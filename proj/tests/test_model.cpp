#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gradest/grid/grid.hpp"
#include "gradest/model/coefficient.hpp"
#include "gradest/model/exponents.hpp"
#include "gradest/model/hamiltonian.hpp"
#include "gradest/model/problem.hpp"
#include "gradest/model/source.hpp"

using namespace gradest;

namespace {

Rational R(long long n, long long d = 1) { return Rational(n, d); }

}  // namespace

// --- coefficient families --------------------------------------------------

TEST(Coefficient, PowerDiffusionValueAndDerivative) {
  const auto v = eval_diffusion(PowerDiffusion{3.0}, 4.0);
  EXPECT_DOUBLE_EQ(v.a, 2.0);         // 4^{1/2}
  EXPECT_DOUBLE_EQ(v.a_prime, 0.25);  // (1/2) 4^{-1/2}
}

TEST(Coefficient, NonPositiveArgumentIsDomainError) {
  EXPECT_THROW(eval_diffusion(PowerDiffusion{3.0}, 0.0), DomainError);
  EXPECT_THROW(eval_diffusion(PowerDiffusion{3.0}, -1.0), DomainError);
}

TEST(Coefficient, PerturbedPowerDerivativeMatchesCentralDifference) {
  const PerturbedPower f{2.5, 0.3};
  for (double t : {0.01, 0.7, 3.0, 250.0}) {
    const double h = 1e-6 * t;
    const double fd = (eval_diffusion(f, t + h).a - eval_diffusion(f, t - h).a) / (2.0 * h);
    EXPECT_NEAR(eval_diffusion(f, t).a_prime, fd, 1e-6 * std::abs(fd) + 1e-12) << "t = " << t;
  }
}

TEST(Structure, PowerFamilyRatioIsPMinusTwo) {
  for (double p : {1.5, 2.0, 3.0, 4.5}) {
    const auto rep = check_structure_conditions(PowerDiffusion{p}, 1e-3, 1e3, 500);
    EXPECT_NEAR(rep.sampled_inf_ratio, p - 2.0, 1e-12);
    EXPECT_NEAR(rep.sampled_sup_ratio, p - 2.0, 1e-12);
    EXPECT_NEAR(rep.c_tilde, p - 1.0, 1e-12);
    EXPECT_NEAR(rep.c_bar, 1.0, 1e-12);
    EXPECT_NEAR(rep.C_bar, 1.0, 1e-12);
    EXPECT_TRUE(rep.pass());
  }
}

TEST(Structure, TooFewSamplesRejected) {
  EXPECT_THROW(check_structure_conditions(PowerDiffusion{3.0}, 1e-3, 1e3, 50), ParameterError);
}

TEST(Structure, NestedLatticesOnlyTightenBounds) {
  // Samples at 2^j + 1 points nest, so sampled infima decrease and suprema increase.
  const PerturbedPower f{3.0, 0.4};
  double prev_inf = std::numeric_limits<double>::infinity(), prev_sup = -prev_inf;
  for (int j = 7; j <= 11; ++j) {
    const auto rep = check_structure_conditions(f, 1e-4, 1e4, (1 << j) + 1);
    EXPECT_LE(rep.sampled_inf_ratio, prev_inf + 1e-15);
    EXPECT_GE(rep.sampled_sup_ratio, prev_sup - 1e-15);
    prev_inf = rep.sampled_inf_ratio;
    prev_sup = rep.sampled_sup_ratio;
  }
}

TEST(Structure, PerturbedRatioBoundedByDeltaFormula) {
  // 2 t a'/a = (p-2) + 2 delta cos(log t) / (1 + delta sin(log t)).
  const double p = 3.0, delta = 0.2;
  const auto rep = check_structure_conditions(PerturbedPower{p, delta}, 1e-4, 1e4, 4000);
  const double bound = 2.0 * delta / (1.0 - delta);
  EXPECT_GE(rep.sampled_inf_ratio, p - 2.0 - bound - 1e-12);
  EXPECT_LE(rep.sampled_sup_ratio, p - 2.0 + bound + 1e-12);
  EXPECT_TRUE(rep.pass());
}

// --- Hamiltonian ------------------------------------------------------------

TEST(Hamiltonian, ValueAndGradient) {
  const PowerHamiltonian h{3.0, 0.0};
  const std::vector<double> xi{3.0, 4.0};
  const auto v = eval_hamiltonian(h, xi);
  EXPECT_NEAR(v.H, 125.0, 1e-12);
  EXPECT_NEAR(v.grad[0], 3.0 * 5.0 * 3.0, 1e-12);
  EXPECT_NEAR(v.grad[1], 3.0 * 5.0 * 4.0, 1e-12);
}

TEST(Hamiltonian, ZeroEpsAtOrigin) {
  const std::vector<double> xi{0.0, 0.0, 0.0};
  const auto v = eval_hamiltonian(PowerHamiltonian{2.5, 0.0}, xi);
  EXPECT_EQ(v.H, 0.0);
  EXPECT_EQ(v.grad[0], 0.0);
}

TEST(Hamiltonian, GrowthConstants) {
  const auto rep = check_growth_conditions(PowerHamiltonian{4.0, 1e-2}, 1.0, 1e3, 1000);
  EXPECT_GE(rep.c_H, 1.0);  // (eps + r^2)^{g/2} >= r^g
  EXPECT_GE(rep.c_H * 2.0, kLowerBoundCH);
  EXPECT_NEAR(rep.C_H, 4.0 * 1.01, 1e-9);  // sup at r = 1
  EXPECT_TRUE(rep.pass);
  EXPECT_THROW(check_growth_conditions(PowerHamiltonian{4.0, 1e-2}, 0.5, 10.0), ParameterError);
}

TEST(Hamiltonian, HessianConstantDominatesSampledHessian) {
  for (double gamma : {1.5, 2.0, 3.0, 6.0}) {
    const PowerHamiltonian h{gamma, 1e-2};
    const double C = hessian_frobenius_constant(h, 3);
    for (double r : {0.0, 0.1, 1.0, 10.0}) {
      const double s = h.eps + r * r;
      const double l1 = gamma * std::pow(s, 0.5 * gamma - 1.0);
      const double l2 = l1 * (1.0 + (gamma - 2.0) * r * r / s);
      const double fro = std::sqrt(2.0 * l1 * l1 + l2 * l2);
      EXPECT_LE(fro, C * std::pow(s, 0.5 * (gamma - 2.0)) * (1.0 + 1e-12));
    }
  }
}

// --- sources ----------------------------------------------------------------

namespace {

// int_delta^1 r^{N-1-aq} dr by composite midpoint rule in log r.
double shell_integral(int N, double aq, double delta) {
  const int n = 20000;
  const double l0 = std::log(delta), step = -l0 / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::exp(l0 + (i + 0.5) * step);
    s += std::pow(r, N - aq) * step;
  }
  return s;
}

}  // namespace

TEST(Source, RadialMembershipAgreesWithBruteForceQuadrature) {
  for (int N : {2, 3}) {
    for (double a : {0.4, 0.9, 1.2, 1.6}) {
      for (double q : {1.0, 2.0, 3.0}) {
        const double ratio = shell_integral(N, a * q, 1e-12) / shell_integral(N, a * q, 1e-6);
        const bool diverges = ratio > 1.5;
        auto spec = SourceSpec{make_radial_singular(N, std::vector<double>(N, 0.5), a, 1.0, 0.0)};
        EXPECT_EQ(belongs_to_lq(spec, q), !diverges) << "N=" << N << " a=" << a << " q=" << q;
      }
    }
  }
}

TEST(Source, RadialTargetOutsideMembershipRejected) {
  EXPECT_THROW(make_radial_singular(3, {0.5, 0.5, 0.5}, 1.6, 1.0, 0.0, 2.0), MembershipError);
  const auto r = make_radial_singular(3, {0.5, 0.5, 0.5}, 0.8, 1.0, 0.0, 3.0);
  EXPECT_DOUBLE_EQ(r.q_sup, 3.0 / 0.8);
}

TEST(Source, ScalingPreservesMembership) {
  const SourceSpec base{make_radial_singular(3, {0.5, 0.5, 0.5}, 0.8, 1.0, 0.0)};
  EXPECT_DOUBLE_EQ(lq_membership_sup(scaled(base, 7.0)), lq_membership_sup(base));
  EXPECT_THROW(scaled(base, 0.0), ParameterError);
}

TEST(Source, SeededRandomIsReproducible) {
  Grid<2> g(Box<2>{{1.0, 1.0}}, {16, 16});
  const SourceSpec s{SeededSmoothRandom{42, 3}};
  const auto f1 = evaluate_source(s, g);
  const auto f2 = evaluate_source(s, g);
  EXPECT_EQ(f1.values, f2.values);
  const auto f3 = evaluate_source(SourceSpec{SeededSmoothRandom{43, 3}}, g);
  EXPECT_NE(f1.values, f3.values);
}

// --- problem ----------------------------------------------------------------

TEST(Problem, GammaAtMostPMinusOneIsRegimeError) {
  ProblemSpec pb;
  pb.p = 3.0;
  pb.gamma = 2.0;
  pb.coefficient = PowerDiffusion{3.0};
  EXPECT_THROW(validate(pb), RegimeError);
}

TEST(Problem, CoefficientExponentMustMatchP) {
  ProblemSpec pb;
  pb.p = 3.0;
  pb.gamma = 3.0;
  pb.coefficient = PowerDiffusion{2.0};
  EXPECT_THROW(validate(pb), ParameterError);
}

// --- exponents ----------------------------------------------------------------

TEST(Exponents, EndpointFormula) {
  EXPECT_EQ(endpoint_exponent(3, R(2), R(6)), R(5, 2));
  EXPECT_EQ(endpoint_exponent(3, R(3), R(5, 2)), R(3, 5));
  EXPECT_THROW(endpoint_exponent(3, R(3), R(2)), RegimeError);
}

TEST(Exponents, SecondChainIdentitiesOnAGrid) {
  // r/(r-2)(beta-p+1) = r gamma = beta + eta and (beta+p-1) N/(N-2) = q gamma, exactly.
  for (int N : {3, 4, 5})
    for (long long p2 : {4, 5, 6})       // p = p2/2 in {2, 5/2, 3}
      for (long long g : {3, 4, 6, 9}) {
        const Rational p = R(p2, 2), gamma = R(g);
        if (!(gamma > p - 1)) continue;
        const Rational q_end = endpoint_exponent(N, p, gamma);
        for (const Rational& q : std::vector<Rational>{q_end + R(1, 3), q_end + 2, q_end + 7}) {
          const auto res = theorem2_exponents(N, p, gamma, q);
          if (std::holds_alternative<ProofGap>(res)) {
            EXPECT_LE(std::get<ProofGap>(res).r, 2);
            continue;
          }
          const auto& e = std::get<Theorem2Exponents>(res);
          EXPECT_EQ(e.r / (e.r - 2) * (e.beta - p + 1), e.r * gamma);
          EXPECT_EQ(e.r * gamma, e.beta + e.eta);
          EXPECT_EQ((e.beta + p - 1) * Rational(N, N - 2), q * gamma);
        }
      }
}

TEST(Exponents, SecondChainReferencePoint) {
  const auto e = std::get<Theorem2Exponents>(theorem2_exponents(3, R(2), R(6), R(3)));
  EXPECT_EQ(e.r, R(8, 3));
  EXPECT_EQ(e.beta, R(5));
  EXPECT_EQ(e.eta, R(11));
}

TEST(Exponents, ProofGapReportsExactR) {
  const auto res = theorem2_exponents(3, R(2), R(2), R(5, 2));
  ASSERT_TRUE(std::holds_alternative<ProofGap>(res));
  EXPECT_EQ(std::get<ProofGap>(res).r, R(11, 6));
}

TEST(Exponents, FirstChainQEtaBelowNAndIncreasing) {
  for (int N : {3, 4, 6})
    for (const Rational& p : std::vector<Rational>{R(3, 2), R(2), R(3)}) {
      Rational prev = -1;
      for (long long b = 2; b <= 200; b += 3) {
        const auto e = theorem1_exponents(N, p, R(b));
        EXPECT_LT(e.q_eta, R(N));
        EXPECT_GT(e.q_eta, prev);
        EXPECT_EQ(e.eta, (R(b) + p / 2) * Rational(N, N - 2));
        prev = e.q_eta;
      }
      // q_eta -> N as beta grows.
      EXPECT_LT(R(N) - theorem1_exponents(N, p, R(1000000)).q_eta, R(1, 1000));
    }
}

TEST(Exponents, FirstChainNeedsThreeDimensions) {
  EXPECT_THROW(theorem1_exponents(2, R(2), R(4)), ParameterError);
}

TEST(Regime, ReferenceClassifications) {
  EXPECT_TRUE(classify_regime(3, R(2), R(6), R(3), R(1)).has(Regime::Thm2Interior));
  const auto endpoint = classify_regime(3, R(2), R(6), R(5, 2), R(1));
  EXPECT_EQ(endpoint.primary(), Regime::Thm2Endpoint_ii);
  EXPECT_EQ(classify_regime(3, R(2), R(6), R(5, 2), R(0)).primary(), Regime::Thm2Endpoint_i);
  EXPECT_EQ(classify_regime(3, R(3), R(5, 2), R(10), R(0)).primary(), Regime::Thm2Interior);
  EXPECT_TRUE(classify_regime(3, R(3), R(5, 2), R(10), R(0)).has(Regime::Thm1));
  EXPECT_EQ(classify_regime(3, R(3), R(2), R(10), R(0)).primary(), Regime::Inadmissible);
  EXPECT_EQ(classify_regime(2, R(3), R(3), R(5, 2), R(1)).primary(), Regime::Thm1);
  const auto gap = classify_regime(3, R(2), R(2), R(5, 2), R(1));
  EXPECT_TRUE(gap.has(Regime::Thm2Interior));
  EXPECT_TRUE(gap.has(Regime::ProofGap));
}

TEST(Regime, ExponentTableCarriesDerivedProducts) {
  const auto t = exponent_table(3, R(2), R(6), R(3), R(1), R(6));
  ASSERT_TRUE(t.r_gamma && t.q_gamma && t.thm1);
  EXPECT_EQ(*t.r_gamma, R(16));
  EXPECT_EQ(*t.q_gamma, R(18));
  EXPECT_EQ(*t.q_end, R(5, 2));
}

TEST(Rational, ParsesExactDecimals) {
  EXPECT_EQ(parse_rational("2.5"), R(5, 2));
  EXPECT_EQ(parse_rational("-5/2"), R(-5, 2));
  EXPECT_EQ(parse_rational("1e-3"), R(1, 1000));
  EXPECT_EQ(rational_from_double(0.1), R(1, 10));
  EXPECT_THROW(parse_rational("abc"), ParameterError);
  EXPECT_THROW(parse_rational("1/0"), ParameterError);
}
