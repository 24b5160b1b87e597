#pragma once

// Row-action iteration engine: Motzkin (maximal residual), randomized
// Kaczmarz, and the Motzkin-then-RK hybrid, all projecting with unit step.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rowaction/linalg.hpp"
#include "rowaction/rng.hpp"
#include "rowaction/systems.hpp"

namespace rowaction {

enum class RuleKind { Motzkin, RkUniform, RkWeighted, Hybrid };

std::string_view toString(RuleKind kind);
RuleKind parseRuleKind(std::string_view name);  // accepts "rk" as rk-uniform

struct SelectionRule {
  RuleKind kind = RuleKind::Motzkin;
  // Hybrid only: Motzkin while ‖Ax_k − b‖∞ exceeds this, RK-uniform after.
  double hybridThreshold = 0.0;

  static SelectionRule motzkin() { return {RuleKind::Motzkin, 0.0}; }
  static SelectionRule rkUniform() { return {RuleKind::RkUniform, 0.0}; }
  static SelectionRule rkWeighted() { return {RuleKind::RkWeighted, 0.0}; }
  static SelectionRule hybrid(double threshold) { return {RuleKind::Hybrid, threshold}; }

  void validate() const;
};

struct StopRule {
  std::size_t maxIterations = 0;
  // Stop as soon as ‖Ax_k − b‖∞ <= threshold.
  std::optional<double> residualInfThreshold;
  // Known bound β >= ‖e‖∞; stops at ‖Ax_k − b‖∞ <= 4β.
  std::optional<double> errorBoundBeta;

  void validate() const;
  // Either threshold stops the run, so the larger active one governs.
  std::optional<double> effectiveThreshold() const;
};

enum class StopReason { ResidualThreshold, MaxIterations };
std::string_view toString(StopReason reason);

// How the residual Ax_k − b is maintained between iterations.
enum class ResidualMode {
  Direct,       // recomputed from scratch, O(mn) per iteration
  Incremental,  // r += δ·A a_i using cached rows of AAᵀ when m is moderate
};

/// Telemetry for iterate x_k, measured before the update that produces x_{k+1}.
struct IterationRecord {
  std::size_t k = 0;
  std::size_t selectedRow = 0;
  double residualInf = 0.0;         // ‖Ax_k − b‖∞
  double residual2Sq = 0.0;         // ‖Ax_k − b‖²
  std::optional<double> gamma;      // ‖A(x_k − x)‖² / ‖A(x_k − x)‖∞², reference only
  std::optional<double> errorSq;    // ‖x_k − x‖², reference only
  double selectedResidualSq = 0.0;  // (a_iᵀx_k − b_i)² for the selected row
};

// The same quantities for the iterate the run stopped at (no row selected).
struct TerminalRecord {
  std::size_t k = 0;
  double residualInf = 0.0;
  double residual2Sq = 0.0;
  std::optional<double> gamma;
  std::optional<double> errorSq;
};

struct SolverState {
  Vector x;
  std::size_t iteration = 0;
};

struct RunOptions {
  ResidualMode residualMode = ResidualMode::Direct;
  // With Incremental, recompute the residual from scratch every this many steps.
  std::size_t refreshEvery = 512;
  // Skip IterationRecord collection (timing runs).
  bool recordTelemetry = true;
  // Optional precomputed AAᵀ for Incremental mode, shared across runs.
  const DenseMatrix* rowGram = nullptr;
};

// Largest m for which Incremental mode caches AAᵀ itself (m² doubles).
inline constexpr std::size_t kMaxCachedGramRows = 4096;

struct RunResult {
  SolverState state;
  std::vector<IterationRecord> records;
  TerminalRecord terminal;
  StopReason stopReason = StopReason::MaxIterations;
  // Hybrid only: first iteration that used RK selection.
  std::optional<std::size_t> switchIteration;
};

/// Smallest index attaining max r_i².
std::size_t selectMotzkin(std::span<const double> r);

/// Categorical sampler over rows with probability proportional to weight.
class RowSampler {
 public:
  // weights must all be positive; throws ContractError otherwise.
  explicit RowSampler(std::span<const double> weights);
  std::size_t operator()(Rng& rng) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
  bool uniform_ = false;
};

// One draw with probability rowNormsSq_i / Σ rowNormsSq.
std::size_t selectRK(std::span<const double> rowNormsSq, Rng& rng);

/// Projection of x onto {y : a_iᵀy = b_i} for a unit-norm row i.
Vector projectStep(const LinearSystem& sys, std::span<const double> x, std::size_t i);
void projectInPlace(const LinearSystem& sys, std::span<double> x, std::size_t i);

/// Iterates until a stop rule fires. One IterationRecord per performed update.
RunResult run(const LinearSystem& sys, const SelectionRule& rule, const StopRule& stop,
              std::span<const double> x0, std::uint64_t seed, const RunOptions& options = {});

struct TimingSummary {
  double meanSeconds = 0.0;      // process CPU time
  double meanWallSeconds = 0.0;
  double meanIterations = 0.0;
  std::size_t trials = 0;
  std::size_t censored = 0;      // trials that hit maxIterations first
  std::vector<std::size_t> iterationsPerTrial;
};

/// Runs `trials` independent runs from x0 = 0 with seeds seed + t and reports
/// the mean cost of reaching ‖Ax_k − b‖∞ <= threshold.
TimingSummary timeToThreshold(const LinearSystem& sys, const SelectionRule& rule, double threshold,
                              std::size_t trials, std::uint64_t seed, std::size_t maxIterations,
                              const RunOptions& options = {.residualMode = ResidualMode::Incremental,
                                                           .refreshEvery = 512,
                                                           .recordTelemetry = false});

}  // namespace rowaction
