// rowaction: generate or ingest linear systems, run Motzkin / randomized
// Kaczmarz / hybrid solvers, and emit telemetry, bound and timing CSVs.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <set>

#include "rowaction/errors.hpp"
#include "rowaction/experiment.hpp"

using namespace rowaction;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct SourceFlags {
  std::string systemFile;
  std::string mpsFile;
  std::string kind = "gaussian-noise";
  std::string columns = "standard-form";
  SystemSource source;

  void add(CLI::App* sub, bool allowFiles) {
    auto& g = source.generator;
    if (allowFiles) {
      sub->add_option("--system", systemFile, "System file written by generate or netlib-prep");
      sub->add_option("--mps", mpsFile, "MPS file, stacked with the identity on load");
      sub->add_option("--columns", columns, "MPS column policy: standard-form or structural")
          ->check(CLI::IsMember({"standard-form", "structural"}))
          ->capture_default_str();
      sub->add_option("--mps-noise-std", source.transform.noiseStd, "Std of the noise added to x_LN")
          ->capture_default_str();
    }
    sub->add_option("--kind", kind, "gaussian-noise, spiky-noise, correlated or pure-noise")
        ->check(CLI::IsMember({"gaussian-noise", "spiky-noise", "correlated", "pure-noise"}))
        ->capture_default_str();
    sub->add_option("--m", g.m, "Rows")->capture_default_str();
    sub->add_option("--n", g.n, "Columns")->capture_default_str();
    sub->add_option("--noise-std", g.noiseStd, "Std of the Gaussian noise (pre-normalization)")
        ->capture_default_str();
    sub->add_option("--spike-count", g.spikeCount, "Corrupted equations (spiky-noise)")->capture_default_str();
    sub->add_option("--spike-magnitude", g.spikeMagnitude, "Spike size (spiky-noise)")->capture_default_str();
    sub->add_option("--row-mean", g.rowMean, "Entry mean (correlated)")->capture_default_str();
    sub->add_option("--row-std", g.rowStd, "Entry std (correlated)")->capture_default_str();
  }

  const SystemSource& resolve(std::uint64_t seed) {
    source.generator.kind = parseGeneratorKind(kind);
    source.generator.seed = seed;
    source.transform.seed = seed;
    source.columnPolicy = columns == "structural" ? ColumnPolicy::Structural : ColumnPolicy::StandardForm;
    if (!systemFile.empty()) source.systemFile = systemFile;
    if (!mpsFile.empty()) source.mpsFile = mpsFile;
    return source;
  }
};

// CLI11 only reads config files at the top level, and ours are flat. So
// `--config FILE` is expanded here: each `key = value` becomes `--key=value`
// ahead of the explicit flags, skipping keys those flags already give.
std::vector<std::string> expandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string file;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (file.empty()) return args;

  std::ifstream in(file);
  if (!in) throw CLI::FileError::Missing(file);
  std::set<std::string> given;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) != 0) continue;
    const std::size_t eq = a.find('=');
    given.insert(a.substr(2, eq == std::string::npos ? std::string::npos : eq - 2));
  }
  std::vector<std::string> fromFile;
  for (const auto& item : CLI::ConfigBase().from_config(in)) {
    if (item.name == "++" || item.name == "--" || given.contains(item.name)) continue;
    if (item.inputs.empty()) fromFile.push_back("--" + item.name);
    for (const auto& v : item.inputs) fromFile.push_back("--" + item.name + "=" + v);
  }
  // rest[0] is the program name and rest[1] the subcommand.
  const auto at = rest.begin() + std::min<std::ptrdiff_t>(2, static_cast<std::ptrdiff_t>(rest.size()));
  rest.insert(at, fromFile.begin(), fromFile.end());
  return rest;
}

ResidualMode parseResidualMode(const std::string& s) {
  return s == "incremental" ? ResidualMode::Incremental : ResidualMode::Direct;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row-action solvers (Motzkin, randomized Kaczmarz, hybrid) and their convergence bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("rowaction 0.1.0"));

  std::uint64_t seed = 0;

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic normalized system to a file");
  SourceFlags genFlags;
  std::string genOut;
  genFlags.add(gen, false);
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_option("--out", genOut, "Output system file")->required();
  gen->add_option("--config", "key = value file mirroring the flags; explicit flags win")->type_name("FILE");

  // netlib-prep
  auto* prep = app.add_subcommand("netlib-prep", "MPS file -> stacked, normalized system file");
  std::string prepMps, prepOut, prepColumns = "standard-form";
  TransformSpec prepSpec;
  prep->add_option("--mps", prepMps, "Input MPS file")->required();
  prep->add_option("--out", prepOut, "Output system file")->required();
  prep->add_option("--noise-std", prepSpec.noiseStd, "Std of the noise added to x_LN")->capture_default_str();
  prep->add_option("--columns", prepColumns, "standard-form (slack per inequality row) or structural")
      ->check(CLI::IsMember({"standard-form", "structural"}))
      ->capture_default_str();
  prep->add_option("--seed", seed, "RNG seed")->required();
  prep->add_option("--config", "key = value file mirroring the flags; explicit flags win")->type_name("FILE");

  // solve
  auto* solve = app.add_subcommand("solve", "Run solvers and write per-trial telemetry CSVs");
  SourceFlags solveFlags;
  solveFlags.add(solve, true);
  std::vector<std::string> solverNames{"motzkin"};
  std::size_t maxIter = 10000;
  std::optional<double> stopResidual, stopBeta, hybridThreshold;
  bool stopAtHorizon = false;
  std::string residualMode = "direct";
  ExperimentConfig solveConfig;
  solve->add_option("--solver", solverNames, "motzkin, rk, rk-uniform, rk-weighted, hybrid (repeatable)")
      ->check(CLI::IsMember({"motzkin", "rk", "rk-uniform", "rk-weighted", "hybrid"}))
      ->capture_default_str();
  solve->add_option("--max-iter", maxIter, "Iteration cap")->capture_default_str();
  solve->add_option("--stop-residual", stopResidual, "Stop once ||Ax-b||_inf <= value");
  solve->add_option("--stop-beta", stopBeta, "Known bound beta >= ||e||_inf; stop at 4*beta");
  solve->add_flag("--stop-at-horizon", stopAtHorizon, "Stop at 4||e||_inf from the reference solution");
  solve->add_option("--hybrid-threshold", hybridThreshold, "Hybrid switch level (default 4*beta or 4||e||_inf)");
  solve->add_option("--trials", solveConfig.trials, "Trials per solver (seed + t)")->capture_default_str();
  solve->add_option("--out-dir", solveConfig.outputDir, "Output directory")->capture_default_str();
  solve->add_option("--residual", residualMode, "direct or incremental")
      ->check(CLI::IsMember({"direct", "incremental"}))
      ->capture_default_str();
  solve->add_option("--seed", seed, "Base RNG seed")->required();
  solve->add_option("--config", "key = value file mirroring the flags; explicit flags win")->type_name("FILE");
  solve->footer("Residual stop flags apply to motzkin and rk; hybrid always runs to --max-iter.");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate theoretical bound curves for a system");
  SourceFlags boundsFlags;
  boundsFlags.add(bounds, true);
  BoundsConfig boundsConfig;
  std::string telemetryFile;
  bounds->add_option("--telemetry", telemetryFile, "Telemetry CSV providing gamma_k for the empirical curve");
  bounds->add_option("--iterations", boundsConfig.iterations, "Curve length K");
  bounds->add_option("--beta", boundsConfig.beta, "Use beta in place of ||e||_inf");
  bounds->add_option("--out-dir", boundsConfig.outputDir, "Output directory")->capture_default_str();
  bounds->add_option("--seed", seed, "Seed (generator / MPS transform only)");
  bounds->add_option("--config", "key = value file mirroring the flags; explicit flags win")->type_name("FILE");

  // timing
  auto* timing = app.add_subcommand("timing", "Time Motzkin vs RK to the 4||e||_inf residual threshold");
  SourceFlags timingFlags;
  timingFlags.add(timing, true);
  TimingConfig timingConfig;
  std::string timingResidual = "incremental";
  timing->add_option("--problem", timingConfig.problem, "Label for the problem column")->capture_default_str();
  timing->add_option("--trials", timingConfig.trials, "Trials per solver")->capture_default_str();
  timing->add_option("--threshold", timingConfig.threshold, "Residual threshold (default 4||e||_inf)");
  timing->add_option("--max-iter", timingConfig.maxIterations, "Iteration cap per trial")->capture_default_str();
  timing->add_option("--residual", timingResidual, "direct or incremental")
      ->check(CLI::IsMember({"direct", "incremental"}))
      ->capture_default_str();
  timing->add_option("--out", timingConfig.outputFile, "Output CSV")->capture_default_str();
  timing->add_option("--seed", seed, "Base RNG seed")->required();
  timing->add_option("--config", "key = value file mirroring the flags; explicit flags win")->type_name("FILE");

  try {
    const std::vector<std::string> expanded = expandConfig(argc, argv);
    std::vector<char*> cargs;
    for (const auto& a : expanded) cargs.push_back(const_cast<char*>(a.c_str()));
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*gen) {
      cmdGenerate(genFlags.resolve(seed).generator, genOut, std::cout);
    } else if (*prep) {
      prepSpec.seed = seed;
      cmdNetlibPrep(prepMps, prepColumns == "structural" ? ColumnPolicy::Structural : ColumnPolicy::StandardForm,
                    prepSpec, prepOut, std::cout);
    } else if (*solve) {
      solveConfig.source = solveFlags.resolve(seed);
      solveConfig.seed = seed;
      solveConfig.options.residualMode = parseResidualMode(residualMode);
      for (const auto& name : solverNames) {
        SolverSpec spec;
        spec.rule.kind = parseRuleKind(name);
        spec.stop.maxIterations = maxIter;
        if (spec.rule.kind == RuleKind::Hybrid) {
          // 0 is resolved to 4||e||_inf once the system is loaded.
          spec.rule.hybridThreshold = hybridThreshold ? *hybridThreshold : stopBeta ? 4.0 * *stopBeta : 0.0;
        } else {
          spec.stop.residualInfThreshold = stopResidual;
          spec.stop.errorBoundBeta = stopBeta;
          spec.stopAtHorizon = stopAtHorizon;
        }
        solveConfig.solvers.push_back(spec);
      }
      cmdSolve(solveConfig, std::cout);
    } else if (*bounds) {
      boundsConfig.source = boundsFlags.resolve(seed);
      if (!telemetryFile.empty()) boundsConfig.telemetryFile = telemetryFile;
      cmdBounds(boundsConfig, std::cout);
    } else if (*timing) {
      timingConfig.source = timingFlags.resolve(seed);
      timingConfig.seed = seed;
      timingConfig.options.residualMode = parseResidualMode(timingResidual);
      cmdTiming(timingConfig, std::cout);
    }
  } catch (const RankError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const DegenerateRowError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
