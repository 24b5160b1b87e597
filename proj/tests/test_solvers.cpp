#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rowaction/errors.hpp"
#include "rowaction/solvers.hpp"

using namespace rowaction;

namespace {

LinearSystem identitySystem(const Vector& b) { return LinearSystem(DenseMatrix::identity(b.size()), b); }

LinearSystem gaussianSystem(std::size_t m, std::size_t n, double noise, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.m = m;
  spec.n = n;
  spec.noiseStd = noise;
  spec.seed = seed;
  return generate(spec);
}

StopRule capAt(std::size_t iterations) {
  StopRule s;
  s.maxIterations = iterations;
  return s;
}

// Frequency of `index` over `draws` samples stays within 3 binomial standard deviations.
void expectFrequency(std::size_t hits, std::size_t draws, double p) {
  const double n = static_cast<double>(draws);
  EXPECT_NEAR(static_cast<double>(hits) / n, p, 3.0 * std::sqrt(p * (1.0 - p) / n));
}

}  // namespace

TEST(SelectMotzkin, Examples) {
  EXPECT_EQ(selectMotzkin(Vector{-1, 3, -3}), 1u);
  EXPECT_EQ(selectMotzkin(Vector{0, 0, 5}), 2u);
  EXPECT_EQ(selectMotzkin(Vector{0.1, -0.2, 0.15}), 1u);
  EXPECT_THROW(selectMotzkin(Vector{}), ContractError);
}

TEST(SelectMotzkin, InvariantUnderScalingAndSign) {
  const Vector r{0.3, -1.7, 1.2, 1.7, -0.4};
  for (double c : {1e-8, 0.5, -2.0, 1e6}) {
    Vector scaled = r;
    for (auto& v : scaled) v *= c;
    EXPECT_EQ(selectMotzkin(scaled), 1u);
  }
}

TEST(SelectRK, UniformFrequencies) {
  Rng rng(101);
  const std::size_t draws = 100000;
  std::vector<std::size_t> counts(5, 0);
  const Vector ones(5, 1.0);
  for (std::size_t t = 0; t < draws; ++t) ++counts[selectRK(ones, rng)];
  for (std::size_t c : counts) expectFrequency(c, draws, 0.2);
}

TEST(SelectRK, WeightedFrequencies) {
  Rng rng(202);
  const std::size_t draws = 100000;
  std::size_t hits = 0;
  const Vector w{1, 3};
  for (std::size_t t = 0; t < draws; ++t) hits += selectRK(w, rng);
  expectFrequency(hits, draws, 0.75);
}

TEST(SelectRK, SingleRowAndBadWeights) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(selectRK(Vector{2.5}, rng), 0u);
  EXPECT_THROW(selectRK(Vector{1, 0}, rng), ContractError);
  EXPECT_THROW(selectRK(Vector{1, -1}, rng), ContractError);
}

TEST(ProjectStep, Examples) {
  const LinearSystem id = identitySystem({1, 2});
  EXPECT_EQ(projectStep(id, Vector{0, 0}, 1), (Vector{0, 2}));

  const LinearSystem tall(DenseMatrix::fromRows({{0.6, 0.8}, {1, 0}}), Vector{2, 0});
  const Vector x = projectStep(tall, Vector{1, 1}, 0);
  EXPECT_NEAR(x[0], 1.36, 1e-15);
  EXPECT_NEAR(x[1], 1.48, 1e-15);
  // Already on the hyperplane.
  EXPECT_EQ(projectStep(tall, Vector{0, 5}, 1), (Vector{0, 5}));
  EXPECT_THROW(projectStep(tall, Vector{0, 0}, 2), ContractError);
}

TEST(Run, IdentitySolvedInNIterations) {
  const Vector b{3, -1, 4, -1.5, 9};
  const LinearSystem sys = identitySystem(b);
  StopRule stop = capAt(5);
  const RunResult res = run(sys, SelectionRule::motzkin(), stop, Vector(5, 0.0), 0);
  EXPECT_EQ(res.state.x, b);
  ASSERT_EQ(res.records.size(), 5u);
  EXPECT_EQ(res.records[0].selectedRow, 4u);  // largest |b_i| first

  stop.residualInfThreshold = 0.0;
  stop.maxIterations = 100;
  const RunResult zero = run(sys, SelectionRule::motzkin(), stop, Vector(5, 0.0), 0);
  EXPECT_EQ(zero.state.iteration, 5u);
  EXPECT_EQ(zero.stopReason, StopReason::ResidualThreshold);
}

TEST(Run, MaxIterationsZeroReturnsStart) {
  const LinearSystem sys = gaussianSystem(40, 4, 0.1, 2);
  const Vector x0{1, 2, 3, 4};
  const RunResult res = run(sys, SelectionRule::rkUniform(), capAt(0), x0, 5);
  EXPECT_EQ(res.state.x, x0);
  EXPECT_TRUE(res.records.empty());
  EXPECT_EQ(res.terminal.k, 0u);
  EXPECT_EQ(res.stopReason, StopReason::MaxIterations);
}

TEST(Run, TelemetryDescribesIterateBeforeUpdate) {
  const LinearSystem sys = gaussianSystem(80, 5, 0.05, 4);
  const RunResult res = run(sys, SelectionRule::motzkin(), capAt(30), Vector(5, 0.0), 0);
  ASSERT_EQ(res.records.size(), 30u);
  const auto& first = res.records.front();
  EXPECT_DOUBLE_EQ(first.residualInf, normInf(sys.rhs()));
  EXPECT_DOUBLE_EQ(*first.errorSq, norm2Sq(*sys.reference()));
  for (const auto& rec : res.records) {
    EXPECT_DOUBLE_EQ(rec.selectedResidualSq, rec.residualInf * rec.residualInf);  // Motzkin picks the max
    ASSERT_TRUE(rec.gamma);
    EXPECT_GE(*rec.gamma, 1.0 - 1e-12);
    EXPECT_LE(*rec.gamma, 80.0 + 1e-9);
  }
  EXPECT_DOUBLE_EQ(*res.terminal.errorSq, norm2Sq(subtract(res.state.x, *sys.reference())));
}

TEST(Run, ConsistentDecreaseIsExact) {
  const LinearSystem sys = gaussianSystem(120, 8, 0.0, 6);
  const RunResult res = run(sys, SelectionRule::motzkin(), capAt(60), Vector(8, 0.0), 0);
  for (std::size_t k = 0; k + 1 < res.records.size(); ++k) {
    const auto& now = res.records[k];
    EXPECT_NEAR(*res.records[k + 1].errorSq, *now.errorSq - now.residualInf * now.residualInf, 1e-10);
  }
}

TEST(Run, DecreaseAboveNoiseLevel) {
  const LinearSystem sys = gaussianSystem(300, 10, 0.01, 8);
  StopRule stop = capAt(10000);
  stop.residualInfThreshold = 4.0 * sys.errorInf();
  const RunResult res = run(sys, SelectionRule::motzkin(), stop, Vector(10, 0.0), 0);
  EXPECT_EQ(res.stopReason, StopReason::ResidualThreshold);
  ASSERT_GT(res.records.size(), 1u);
  for (std::size_t k = 0; k < res.records.size(); ++k) {
    const double next = k + 1 < res.records.size() ? *res.records[k + 1].errorSq : *res.terminal.errorSq;
    const auto& now = res.records[k];
    EXPECT_LE(next, *now.errorSq - 0.5 * now.residualInf * now.residualInf + 1e-10);
  }
}

TEST(Run, IncrementalResidualTracksDirect) {
  const LinearSystem sys = gaussianSystem(500, 20, 0.01, 10);
  RunOptions inc;
  inc.residualMode = ResidualMode::Incremental;
  inc.refreshEvery = 100000;
  for (const auto& rule : {SelectionRule::motzkin(), SelectionRule::rkUniform()}) {
    const RunResult direct = run(sys, rule, capAt(2000), Vector(20, 0.0), 3);
    const RunResult fast = run(sys, rule, capAt(2000), Vector(20, 0.0), 3, inc);
    ASSERT_EQ(direct.records.size(), fast.records.size());
    for (std::size_t k = 0; k < direct.records.size(); ++k) {
      EXPECT_NEAR(direct.records[k].residualInf, fast.records[k].residualInf, 1e-8);
    }
    EXPECT_NEAR(direct.terminal.residualInf, fast.terminal.residualInf, 1e-8);
  }
}

TEST(Run, SeedDeterminesRkPath) {
  const LinearSystem sys = gaussianSystem(100, 5, 0.1, 12);
  const RunResult a = run(sys, SelectionRule::rkUniform(), capAt(200), Vector(5, 0.0), 42);
  const RunResult b = run(sys, SelectionRule::rkUniform(), capAt(200), Vector(5, 0.0), 42);
  const RunResult c = run(sys, SelectionRule::rkUniform(), capAt(200), Vector(5, 0.0), 43);
  EXPECT_EQ(a.state.x, b.state.x);
  EXPECT_NE(a.state.x, c.state.x);
}

TEST(Run, HybridSwitchesOnceAndStaysRandom) {
  const LinearSystem sys = gaussianSystem(400, 10, 0.05, 14);
  // RK's median residual at its horizon: Motzkin gets below it, and RK alone
  // sits above it about half the time, so the switch back is tempting.
  const RunResult rkOnly = run(sys, SelectionRule::rkUniform(), capAt(3000), Vector(10, 0.0), 1);
  std::vector<double> tail;
  for (std::size_t k = 2000; k < 3000; ++k) tail.push_back(rkOnly.records[k].residualInf);
  std::nth_element(tail.begin(), tail.begin() + 500, tail.end());
  const double threshold = tail[500];
  const std::uint64_t seed = 77;
  const RunResult res = run(sys, SelectionRule::hybrid(threshold), capAt(3000), Vector(10, 0.0), seed);
  ASSERT_TRUE(res.switchIteration);
  const std::size_t s = *res.switchIteration;
  ASSERT_GT(s, 0u);
  for (std::size_t k = 0; k < s; ++k) {
    EXPECT_GT(res.records[k].residualInf, threshold);
    EXPECT_DOUBLE_EQ(res.records[k].selectedResidualSq, res.records[k].residualInf * res.records[k].residualInf);
  }
  EXPECT_LE(res.records[s].residualInf, threshold);
  // After the switch every row comes from the RK stream, whatever the residual does.
  Rng rng(seed);
  const RowSampler sampler(Vector(sys.rows(), 1.0));
  bool roseAbove = false;
  for (std::size_t k = s; k < res.records.size(); ++k) {
    EXPECT_EQ(res.records[k].selectedRow, sampler(rng)) << "k = " << k;
    roseAbove = roseAbove || res.records[k].residualInf > threshold;
  }
  EXPECT_TRUE(roseAbove) << "residual never crossed back, so the one-way switch went unexercised";
  EXPECT_EQ(res.stopReason, StopReason::MaxIterations);
}

TEST(Rules, Validation) {
  EXPECT_THROW(SelectionRule::hybrid(0.0).validate(), ContractError);
  EXPECT_THROW(SelectionRule::hybrid(-1.0).validate(), ContractError);
  StopRule bad;
  bad.residualInfThreshold = -1.0;
  EXPECT_THROW(bad.validate(), ContractError);
  StopRule both;
  both.residualInfThreshold = 1.0;
  both.errorBoundBeta = 0.5;
  EXPECT_DOUBLE_EQ(*both.effectiveThreshold(), 2.0);
  EXPECT_EQ(parseRuleKind("rk"), RuleKind::RkUniform);
  EXPECT_THROW(parseRuleKind("greedy"), ContractError);
}

TEST(Timing, IdentityTakesNIterationsEveryTrial) {
  const LinearSystem sys = identitySystem({1, -2, 3, -4, 5, -6});
  const TimingSummary t = timeToThreshold(sys, SelectionRule::motzkin(), 0.0, 4, 0, 1000);
  EXPECT_EQ(t.iterationsPerTrial, (std::vector<std::size_t>(4, 6)));
  EXPECT_EQ(t.censored, 0u);
}

TEST(Timing, IterationCountsDeterministic) {
  const LinearSystem sys = gaussianSystem(300, 10, 0.01, 16);
  const double threshold = 4.0 * sys.errorInf();
  for (const auto& rule : {SelectionRule::motzkin(), SelectionRule::rkUniform()}) {
    const TimingSummary a = timeToThreshold(sys, rule, threshold, 10, 5, 100000);
    const TimingSummary b = timeToThreshold(sys, rule, threshold, 10, 5, 100000);
    EXPECT_EQ(a.iterationsPerTrial, b.iterationsPerTrial);
    EXPECT_EQ(a.trials, 10u);
  }
}

TEST(Timing, CensoredTrialsCounted) {
  const LinearSystem sys = gaussianSystem(300, 10, 0.01, 16);
  const TimingSummary t = timeToThreshold(sys, SelectionRule::rkUniform(), 0.0, 3, 0, 50);
  EXPECT_EQ(t.censored, 3u);
  EXPECT_DOUBLE_EQ(t.meanIterations, 50.0);
}
