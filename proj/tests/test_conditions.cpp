#include <gtest/gtest.h>

#include <random>

#include "flockstab/conditions.hpp"
#include "flockstab/fixtures.hpp"
#include "flockstab/spectral.hpp"
#include "oracles.hpp"

using namespace flockstab;

namespace {

FlockSpec rotate_types(const FlockSpec& s, int shift) {
  std::vector<AgentParams> a;
  for (int k = 0; k < s.type_count(); ++k) a.push_back(s.agent(k + shift));
  return build_spec(s.arrangement(), a);
}

}  // namespace

TEST(DFunc, Examples) {
  EXPECT_EQ(D_func(0.3, -0.7, 2.0, 0.0), cplx(0.0));
  for (double t : {0.1, 0.9, 2.0}) {
    const cplx d = D_func(-0.5, -0.5, -0.5, t);
    EXPECT_NEAR(d.real(), 0.25 * (1.0 - std::cos(t)), 1e-16);
    EXPECT_NEAR(d.imag(), 0.0, 1e-16);
  }
  // Figure 1 weights: the derivative at 0 vanishes with the condition.
  EXPECT_LT(std::abs(D_derivative(-0.6, -0.8, -1.0 / 7.0, 0.0)), 1e-15);
}

TEST(EFunc, Examples) {
  EXPECT_EQ(E_func(0.0, 2.0, 3.0, 4.0), 0.0);
  EXPECT_EQ(E_func(1.0, 1.0, 0.0, 7.0), 1.0);
  EXPECT_NEAR(E_func(-1.0, -1.0, -0.6, -0.8), 0.88, 1e-15);
}

TEST(TriatomicConditions, FigureOne) {
  const ConditionReport r = triatomic_conditions(fixtures::figure1());
  EXPECT_NEAR(r.quantity("beta_sum"), -0.6 / 7.0, 1e-15);
  // Printed as -0.0858: within one unit of the fourth decimal.
  EXPECT_NEAR(r.quantity("beta_sum"), -0.0858, 1e-4);
  EXPECT_LT(std::abs(r.quantity("moment_plus_correction")), 1e-9);
  EXPECT_FALSE(r.clause("iii").triggered);
  EXPECT_EQ(r.overall, Overall::NecessaryConditionsHold);
}

TEST(TriatomicConditions, FigureTwo) {
  const ConditionReport r = triatomic_conditions(fixtures::figure2());
  EXPECT_LT(std::abs(r.quantity("beta_sum")), 1e-9);
  EXPECT_NEAR(r.quantity("moment_plus_correction"), 0.096, 1e-9);
  EXPECT_NEAR(r.quantity("e_sum"), 2.12, 1e-12);
  EXPECT_TRUE(r.clause("iii").triggered);
  EXPECT_EQ(r.overall, Overall::InstabilityCertified);
}

TEST(TriatomicConditions, ZeroGainTriggersClauseOne) {
  std::vector<AgentParams> a = fixtures::figure1().agents();
  a[1].g_x = 0.0;
  const ConditionReport r = triatomic_conditions(build_spec(Arrangement::TriatomicNN, a));
  EXPECT_TRUE(r.clause("i").triggered);
  EXPECT_EQ(r.overall, Overall::InstabilityCertified);
}

TEST(TriatomicConditions, WrongArrangement) {
  EXPECT_THROW(triatomic_conditions(fixtures::figure3()), WrongArrangement);
  EXPECT_THROW(diatomic_conditions(fixtures::figure1()), WrongArrangement);
}

TEST(DiatomicConditions, FigureThree) {
  const ConditionReport r = diatomic_conditions(fixtures::figure3());
  EXPECT_LT(std::abs(r.clause("iii").value), 1e-12);
  EXPECT_FALSE(r.clause("iii").triggered);
  EXPECT_NEAR(r.quantity("x_alpha_sum"), 14.0 / 15.0, 1e-14);
  EXPECT_FALSE(r.clause("ii.x").triggered);
  EXPECT_FALSE(r.clause("ii.v").triggered);
  EXPECT_EQ(r.overall, Overall::NecessaryConditionsHold);
  EXPECT_LT(std::abs(necessary_condition_value(fixtures::figure3())), 1e-12);
}

TEST(DiatomicConditions, CompletedFigureThreeCIsCertified) {
  const ConditionReport r = diatomic_conditions(fixtures::figure3c());
  EXPECT_NEAR(fixtures::figure3c().agent(1).rho_x[-2], -0.05, 1e-15);
  EXPECT_TRUE(r.clause("iii").triggered);
}

TEST(DiatomicConditions, SymmetricWeightsGiveZeroMoment) {
  const Weights w{{-2, -0.2}, {-1, -0.3}, {1, -0.3}, {2, -0.2}};
  const FlockSpec s = build_spec(Arrangement::DiatomicNNN, {{-1, -2, w, w}, {-0.5, -1, w, w}});
  EXPECT_EQ(diatomic_conditions(s).clause("iii").value, 0.0);
}

TEST(DiatomicConditions, ZeroGainAndNegativeAlphaSum) {
  std::vector<AgentParams> a = fixtures::figure3().agents();
  a[0].g_x = 0.0;
  EXPECT_TRUE(diatomic_conditions(build_spec(Arrangement::DiatomicNNN, a)).clause("i").triggered);
  a = fixtures::figure3().agents();
  a[0].g_v = 1.0;
  a[1].g_v = 1.0;
  const ConditionReport r = diatomic_conditions(build_spec(Arrangement::DiatomicNNN, a));
  EXPECT_TRUE(r.clause("ii.v").triggered);
  EXPECT_EQ(r.overall, Overall::InstabilityCertified);
}

TEST(DiatomicConditions, SecondaryQuantityIsOriginNuSquaredBracket) {
  // Q(nu, 0) = nu^2 [nu^2 + a3 nu + a2]: the reported secondary value is a2(0).
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const FlockSpec s = oracle::random_spec(rng, Arrangement::DiatomicNNN);
    const double secondary = diatomic_conditions(s).quantity("origin_nu2_bracket");
    EXPECT_NEAR(secondary, char_poly(s, 0.0).coeffs[2].real(), 1e-12);
  }
}

TEST(Conditions, CyclicRelabelingInvariance) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    const FlockSpec s = oracle::random_spec(rng, Arrangement::TriatomicNN);
    const ConditionReport r0 = triatomic_conditions(s);
    for (int shift : {1, 2}) {
      const ConditionReport r = triatomic_conditions(rotate_types(s, shift));
      for (std::size_t c = 0; c < r0.clauses.size(); ++c) {
        EXPECT_NEAR(r.clauses[c].value, r0.clauses[c].value, 1e-12);
        EXPECT_EQ(r.clauses[c].triggered, r0.clauses[c].triggered);
      }
    }
  }
}

TEST(Conditions, SymmetricSpecsAreNeverUnstableAtDeskScale) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> gain(-2.0, -0.2), split(0.05, 0.45);
  for (auto arr : {Arrangement::TriatomicNN, Arrangement::DiatomicNNN})
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<AgentParams> agents;
      for (int k = 0; k < type_count(arr); ++k) {
        AgentParams a{gain(rng), gain(rng), {}, {}};
        for (Weights* w : {&a.rho_x, &a.rho_v}) {
          const double near = arr == Arrangement::TriatomicNN ? 0.5 : split(rng);
          (*w)[1] = (*w)[-1] = -near;
          if (arr == Arrangement::DiatomicNNN) (*w)[2] = (*w)[-2] = -(0.5 - near);
        }
        agents.push_back(a);
      }
      const FlockSpec s = build_spec(arr, agents);
      const ConditionReport r = evaluate_conditions(s);
      if (r.clause("i").triggered || r.clause(arr == Arrangement::TriatomicNN ? "ii" : "ii.x").triggered)
        continue;
      for (int n : {3, 6, 12})
        EXPECT_NE(analyze_stability(s, n).status, StabilityStatus::Unstable) << "n=" << n;
    }
}
