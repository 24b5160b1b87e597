#pragma once

// Experiment harness behind the `rowaction` CLI. Each command produces data
// files (CSV or system files) and a short human-readable report; judging the
// data against the bounds is left to the test suite.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rowaction/bounds.hpp"
#include "rowaction/csv.hpp"
#include "rowaction/mps.hpp"
#include "rowaction/solvers.hpp"
#include "rowaction/systems.hpp"

namespace rowaction {

// Where a system comes from: a cached system file, an MPS file run through
// the identity-stacking transform, or the synthetic generator.
struct SystemSource {
  std::optional<std::string> systemFile;
  std::optional<std::string> mpsFile;
  ColumnPolicy columnPolicy = ColumnPolicy::StandardForm;
  TransformSpec transform;
  GeneratorSpec generator;
};

LinearSystem loadSource(const SystemSource& source);

struct SolverSpec {
  SelectionRule rule;
  StopRule stop;
  // Stop at ‖Ax_k − b‖∞ <= 4‖e‖∞ using the system's exact error vector.
  bool stopAtHorizon = false;

  std::string label() const { return std::string(toString(rule.kind)); }
  // Fills thresholds that depend on the system: the horizon stop, and a
  // hybrid switch left at 0 becomes 4β (when β is set) or 4‖e‖∞.
  SolverSpec resolvedFor(const LinearSystem& sys) const;
};

struct ExperimentConfig {
  SystemSource source;
  std::vector<SolverSpec> solvers;
  std::size_t trials = 1;
  std::string outputDir = ".";
  std::uint64_t seed = 0;
  RunOptions options;

  void validate() const;  // throws ContractError
};

inline constexpr const char* kTelemetryHeader =
    "k,selected_row,residual_inf,residual_2sq,gamma,error_sq,selected_residual_sq";

CsvTable telemetryTable(const RunResult& result);

struct TelemetryColumns {
  std::vector<double> errorSq;  // NaN where absent
  std::vector<double> gamma;    // NaN where absent
  std::vector<double> residualInf;
};
TelemetryColumns parseTelemetry(const CsvTable& table);

// Seed for trial t of a run with base seed s.
constexpr std::uint64_t trialSeed(std::uint64_t base, std::size_t trial) { return base + trial; }

struct GenerateReport {
  std::size_t m = 0;
  std::size_t n = 0;
  double errorInf = 0.0;
  double sigmaMin = 0.0;
};

/// Generates a system, writes it to outPath and reports its key quantities.
GenerateReport cmdGenerate(const GeneratorSpec& spec, const std::string& outPath, std::ostream& log);

struct NetlibPrepReport {
  std::size_t extractedRows = 0;
  std::size_t extractedCols = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double errorInf = 0.0;
};

/// MPS file → stacked, normalized system file.
NetlibPrepReport cmdNetlibPrep(const std::string& mpsPath, ColumnPolicy policy, const TransformSpec& spec,
                               const std::string& outPath, std::ostream& log);

struct SolveRunSummary {
  std::string solver;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::optional<double> finalErrorSq;
  double finalResidualInf = 0.0;
  StopReason stopReason = StopReason::MaxIterations;
  std::optional<std::size_t> switchIteration;
};

/// Runs every solver for every trial, writing <solver>_trial<t>.csv telemetry
/// and summary.csv into the output directory.
std::vector<SolveRunSummary> cmdSolve(const ExperimentConfig& config, std::ostream& log);

struct BoundsConfig {
  SystemSource source;
  std::optional<std::string> telemetryFile;  // enables the empirical-γ curve
  std::optional<std::size_t> iterations;     // defaults to the telemetry length, else 1000
  std::optional<double> beta;                // replaces ‖e‖∞ when given
  std::string outputDir = ".";
};

/// Writes bound_<name>.csv files with columns k,value,name.
std::vector<BoundCurve> cmdBounds(const BoundsConfig& config, std::ostream& log);

struct TimingConfig {
  SystemSource source;
  std::string problem = "problem";
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::optional<double> threshold;  // defaults to 4‖e‖∞
  std::size_t maxIterations = 1000000;
  RunOptions options{.residualMode = ResidualMode::Incremental, .refreshEvery = 512, .recordTelemetry = false};
  std::string outputFile = "timing.csv";
};

struct TimingRow {
  std::string problem;
  std::string solver;
  TimingSummary summary;
};

/// Motzkin vs RK time and iterations to the residual threshold, written as
/// problem,solver,mean_seconds,mean_iterations,trials,censored.
std::vector<TimingRow> cmdTiming(const TimingConfig& config, std::ostream& log);

}  // namespace rowaction
