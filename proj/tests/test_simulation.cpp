#include <gtest/gtest.h>

#include <random>

#include "flockstab/fixtures.hpp"
#include "flockstab/simulation.hpp"
#include "oracles.hpp"

using namespace flockstab;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b, double scale_b = 1.0) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - scale_b * b[i]));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(Simulate, ZeroKickStaysAtRest) {
  SimulationOptions opts;
  opts.kick = 0.0;
  const Trajectory tr = simulate(fixtures::figure1(), 5, BoundaryType::TypeI, 20.0, 0.01, opts);
  EXPECT_EQ(max_abs(tr.positions), 0.0);
  EXPECT_EQ(max_abs(tr.velocities), 0.0);
  const TransientReport r = transient(tr);
  EXPECT_EQ(r.magnitude, 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(Simulate, InitialStateAndLeaderMotion) {
  for (auto bc : {BoundaryType::TypeI, BoundaryType::TypeII}) {
    const Trajectory tr = simulate(fixtures::figure3(), 4, bc, 10.0, 0.01);
    ASSERT_GT(tr.samples(), 2u);
    EXPECT_EQ(tr.times.front(), 0.0);
    EXPECT_EQ(max_abs(tr.z(0)), 0.0);
    EXPECT_EQ(tr.v(0)[0], 1.0);
    for (int p = 1; p < tr.agent_count; ++p) EXPECT_EQ(tr.v(0)[p], 0.0);
    for (std::size_t i = 0; i < tr.samples(); ++i) {
      EXPECT_NEAR(tr.z(i)[0], tr.times[i], 1e-12);
      EXPECT_EQ(tr.v(i)[0], 1.0);
    }
    EXPECT_NEAR(tr.times.back(), 10.0, 1e-12);
    // Decimation: samples every ceil(0.1/dt) = 10 steps.
    EXPECT_NEAR(tr.times[1], 0.1, 1e-12);
  }
}

TEST(Simulate, InvalidArguments) {
  const FlockSpec s = fixtures::figure1();
  EXPECT_THROW(simulate(s, 4, BoundaryType::TypeI, 10.0, 0.0), Error);
  EXPECT_THROW(simulate(s, 4, BoundaryType::TypeI, 0.001, 0.01), Error);
  EXPECT_THROW(simulate(s, 2, BoundaryType::TypeI, 1.0, 0.01), SizeError);
}

TEST(Simulate, BlowUpReportsTime) {
  std::vector<AgentParams> a = fixtures::figure1().agents();
  for (auto& p : a) p.g_v = 1.0;  // anti-damping
  const FlockSpec s = build_spec(Arrangement::TriatomicNN, a);
  SimulationOptions opts;
  opts.blowup_guard = 1e6;
  try {
    simulate(s, 4, BoundaryType::TypeI, 1000.0, 0.01, opts);
    FAIL() << "expected BlowUp";
  } catch (const BlowUp& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 1000.0);
  }
}

TEST(SimulateProperties, LinearityAndTranslationOnRandomSpecs) {
  std::mt19937_64 rng(83);
  for (auto arr : {Arrangement::TriatomicNN, Arrangement::DiatomicNNN})
    for (int trial = 0; trial < 5; ++trial) {
      const FlockSpec s = oracle::random_spec(rng, arr);
      for (auto bc : {BoundaryType::TypeI, BoundaryType::TypeII}) {
        const Trajectory base = simulate(s, 4, bc, 15.0, 0.01);
        SimulationOptions twice;
        twice.kick = 2.0;
        const Trajectory doubled = simulate(s, 4, bc, 15.0, 0.01, twice);
        EXPECT_LE(max_abs_diff(doubled.positions, base.positions, 2.0),
                  1e-9 * max_abs(doubled.positions));
        EXPECT_LE(max_abs_diff(doubled.velocities, base.velocities, 2.0),
                  1e-9 * max_abs(doubled.velocities));

        SimulationOptions shifted;
        shifted.position_offset = 3.5;
        const Trajectory moved = simulate(s, 4, bc, 15.0, 0.01, shifted);
        double worst = 0.0;
        for (std::size_t i = 0; i < base.samples(); ++i)
          for (int p = 0; p < base.agent_count; ++p)
            worst = std::max(worst, std::abs(moved.z(i)[p] - 3.5 - base.z(i)[p]));
        EXPECT_LT(worst, 1e-9);
        EXPECT_NEAR(transient(moved).magnitude, transient(base).magnitude, 1e-9);
      }
    }
}

TEST(SimulateProperties, StepHalvingOnFigureOne) {
  const FlockSpec s = fixtures::figure1();
  const double coarse = transient(simulate(s, 60, BoundaryType::TypeI, 400.0, 0.01)).magnitude;
  const double fine = transient(simulate(s, 60, BoundaryType::TypeI, 400.0, 0.005)).magnitude;
  EXPECT_LT(std::abs(coarse - fine), 1e-3 * std::abs(fine));
}

TEST(SimulateProperties, StepHalvingOnRandomStableSpecs) {
  std::mt19937_64 rng(89);
  int checked = 0;
  for (int trial = 0; trial < 20 && checked < 4; ++trial) {
    const FlockSpec s = oracle::random_spec(rng, Arrangement::DiatomicNNN);
    try {
      const double coarse = transient(simulate(s, 5, BoundaryType::TypeI, 30.0, 0.01)).magnitude;
      const double fine = transient(simulate(s, 5, BoundaryType::TypeI, 30.0, 0.005)).magnitude;
      EXPECT_LT(std::abs(coarse - fine), 1e-3 * std::abs(fine));
      ++checked;
    } catch (const BlowUp&) {
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Transient, FigureOneBoundaryTypesAgree) {
  const FlockSpec s = fixtures::figure1();
  const TransientReport a = transient(simulate(s, 60, BoundaryType::TypeI, 400.0, 0.01));
  const TransientReport b = transient(simulate(s, 60, BoundaryType::TypeII, 400.0, 0.01));
  EXPECT_LT(std::abs(a.magnitude - b.magnitude), 0.02 * std::abs(a.magnitude));
  EXPECT_EQ(a.agent_at_extremum, 179);
}

TEST(Transient, SmallCaseExtremumAfterStart) {
  const Trajectory tr = simulate(fixtures::figure1(), 3, BoundaryType::TypeI, 30.0, 0.01);
  const TransientReport r = transient(tr);
  EXPECT_GT(r.time_at_extremum, 0.0);
  // Brute force over the stored samples never beats the step-wise extremum.
  double best = 0.0;
  for (std::size_t i = 0; i < tr.samples(); ++i)
    for (int p = 1; p < tr.agent_count; ++p)
      best = std::max(best, std::abs(tr.z(i)[p] - tr.z(i)[0]));
  EXPECT_GE(std::abs(r.magnitude), best);
  EXPECT_LT(std::abs(r.magnitude) - best, 1e-3 * best);
}

TEST(Transient, EmptyTrajectory) { EXPECT_THROW(transient(Trajectory{}), Error); }

TEST(FitLine, ExactAndDegenerate) {
  const double x[] = {1, 2, 3, 4};
  const double y[] = {3, 5, 7, 9};
  const auto f = fit_line(x, y);
  ASSERT_TRUE(f);
  EXPECT_NEAR(f->slope, 2.0, 1e-14);
  EXPECT_NEAR(f->intercept, 1.0, 1e-14);
  EXPECT_NEAR(f->r_squared, 1.0, 1e-14);
  EXPECT_FALSE(fit_line(std::span(x, 1), std::span(y, 1)));
}

TEST(ScanN, SingleSizeReportsFitError) {
  const int Ns[] = {30};
  const ScanResult r = scan_N(fixtures::figure2(), BoundaryType::TypeI, Ns);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_NE(r.points[0].magnitude, 0.0);
  EXPECT_FALSE(r.fit);
  EXPECT_FALSE(r.fit_error.empty());
}

TEST(ScanN, RejectsSizesNotMultipleOfTypes) {
  const int Ns[] = {30, 31};
  EXPECT_THROW(scan_N(fixtures::figure2(), BoundaryType::TypeI, Ns), ShapeError);
}

TEST(ScanN, FigureOneGrowsSlowerThanFigureTwo) {
  const std::span<const int> Ns(fixtures::kFig2ScanN);
  const ScanResult stable = scan_N(fixtures::figure1(), BoundaryType::TypeI, Ns);
  const ScanResult unstable = scan_N(fixtures::figure2(), BoundaryType::TypeI, Ns);
  ASSERT_TRUE(stable.fit && unstable.fit);
  EXPECT_LT(stable.fit->slope, 0.5 * unstable.fit->slope);
  // Regression value (Type I, dt 0.01, t_max 3N).
  EXPECT_NEAR(unstable.fit->slope, 0.0335091547, 1e-8);
  EXPECT_GT(unstable.fit->r_squared, 0.99);
  // Stable transients grow roughly linearly: log|m| tracks log N.
  std::vector<double> logN, logM;
  for (const ScanPoint& p : stable.points) {
    logN.push_back(std::log(p.N));
    logM.push_back(p.log_magnitude);
  }
  const auto power = fit_line(logN, logM);
  ASSERT_TRUE(power);
  EXPECT_LT(power->slope, 2.5);
}

TEST(ScanN, CensorsBlowUps) {
  std::vector<AgentParams> a = fixtures::figure1().agents();
  for (auto& p : a) p.g_v = 1.0;
  const int Ns[] = {9, 12};
  ScanOptions opts;
  opts.t_max = 2000.0;
  const ScanResult r = scan_N(build_spec(Arrangement::TriatomicNN, a), BoundaryType::TypeI, Ns, opts);
  for (const ScanPoint& p : r.points) {
    EXPECT_TRUE(p.censored);
    EXPECT_TRUE(p.blowup_time.has_value());
  }
  EXPECT_FALSE(r.fit);
}
