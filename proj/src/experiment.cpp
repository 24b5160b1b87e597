#include "rowaction/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>

#include "rowaction/errors.hpp"

namespace rowaction {

namespace fs = std::filesystem;

namespace {

void ensureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ContractError("cannot create output directory '" + dir + "'");
}

std::string joinPath(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

LinearSystem loadSource(const SystemSource& source) {
  if (source.systemFile && source.mpsFile) throw ContractError("give either a system file or an MPS file, not both");
  if (source.systemFile) return loadSystem(*source.systemFile);
  if (source.mpsFile) {
    const MpsProblem problem = readMpsFile(*source.mpsFile);
    const auto [a, b] = extractSystem(problem, source.columnPolicy);
    return overdetermine(a, b, source.transform);
  }
  return generate(source.generator);
}

SolverSpec SolverSpec::resolvedFor(const LinearSystem& sys) const {
  SolverSpec out = *this;
  if (stopAtHorizon) {
    out.stop.residualInfThreshold = 4.0 * sys.errorInf();
    out.stopAtHorizon = false;
  }
  if (rule.kind == RuleKind::Hybrid && rule.hybridThreshold == 0.0) {
    out.rule.hybridThreshold = 4.0 * (stop.errorBoundBeta ? *stop.errorBoundBeta : sys.errorInf());
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ContractError("trials must be at least 1");
  if (solvers.empty()) throw ContractError("at least one solver is required");
  for (const auto& s : solvers) {
    if (s.rule.kind != RuleKind::Hybrid) s.rule.validate();
    s.stop.validate();
  }
}

CsvTable telemetryTable(const RunResult& result) {
  CsvTable table;
  table.header = {"k", "selected_row", "residual_inf", "residual_2sq", "gamma", "error_sq", "selected_residual_sq"};
  table.rows.reserve(result.records.size());
  for (const auto& r : result.records) {
    table.rows.push_back({std::to_string(r.k), std::to_string(r.selectedRow), formatReal(r.residualInf),
                          formatReal(r.residual2Sq), formatReal(r.gamma), formatReal(r.errorSq),
                          formatReal(r.selectedResidualSq)});
  }
  return table;
}

TelemetryColumns parseTelemetry(const CsvTable& table) {
  const std::size_t errCol = table.column("error_sq");
  const std::size_t gammaCol = table.column("gamma");
  const std::size_t resCol = table.column("residual_inf");
  TelemetryColumns out;
  for (const auto& row : table.rows) {
    out.errorSq.push_back(parseOptionalReal(row[errCol]).value_or(kNaN));
    out.gamma.push_back(parseOptionalReal(row[gammaCol]).value_or(kNaN));
    out.residualInf.push_back(parseOptionalReal(row[resCol]).value_or(kNaN));
  }
  return out;
}

GenerateReport cmdGenerate(const GeneratorSpec& spec, const std::string& outPath, std::ostream& log) {
  const LinearSystem sys = generate(spec);
  saveSystem(outPath, sys);
  GenerateReport report{sys.rows(), sys.cols(), sys.errorInf(), minSingularValue(sys.matrix())};
  log << "m " << report.m << "\nn " << report.n << "\nerror_inf " << formatReal(report.errorInf)
      << "\nsigma_min " << formatReal(report.sigmaMin) << '\n';
  return report;
}

NetlibPrepReport cmdNetlibPrep(const std::string& mpsPath, ColumnPolicy policy, const TransformSpec& spec,
                               const std::string& outPath, std::ostream& log) {
  const MpsProblem problem = readMpsFile(mpsPath);
  for (const auto& w : problem.warnings) log << "warning: " << w << '\n';
  const auto [a, b] = extractSystem(problem, policy);
  const LinearSystem sys = overdetermine(a, b, spec);
  saveSystem(outPath, sys);
  NetlibPrepReport report{a.rows(), a.cols(), sys.rows(), sys.cols(), sys.errorInf()};
  log << "problem " << (problem.name.empty() ? "(unnamed)" : problem.name) << "\ncolumns "
      << toString(policy) << "\nextracted " << report.extractedRows << " x " << report.extractedCols
      << "\nstacked " << report.rows << " x " << report.cols << "\nerror_inf " << formatReal(report.errorInf)
      << '\n';
  return report;
}

std::vector<SolveRunSummary> cmdSolve(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const LinearSystem sys = loadSource(config.source);
  ensureDirectory(config.outputDir);
  const Vector x0(sys.cols(), 0.0);

  std::vector<SolveRunSummary> summaries;
  for (const auto& unresolved : config.solvers) {
    const SolverSpec solver = unresolved.resolvedFor(sys);
    for (std::size_t t = 0; t < config.trials; ++t) {
      const std::uint64_t seed = trialSeed(config.seed, t);
      const RunResult res = run(sys, solver.rule, solver.stop, x0, seed, config.options);
      const std::string file = solver.label() + "_trial" + std::to_string(t) + ".csv";
      writeCsvFile(joinPath(config.outputDir, file), telemetryTable(res));
      summaries.push_back({solver.label(), t, seed, res.state.iteration, res.terminal.errorSq,
                           res.terminal.residualInf, res.stopReason, res.switchIteration});
    }
  }

  CsvTable summary;
  summary.header = {"solver", "trial", "seed", "iterations", "final_error_sq", "final_residual_inf",
                    "stop_reason", "switch_iteration"};
  for (const auto& s : summaries) {
    summary.rows.push_back({s.solver, std::to_string(s.trial), std::to_string(s.seed),
                            std::to_string(s.iterations), formatReal(s.finalErrorSq),
                            formatReal(s.finalResidualInf), std::string(toString(s.stopReason)),
                            s.switchIteration ? std::to_string(*s.switchIteration) : std::string()});
  }
  writeCsvFile(joinPath(config.outputDir, "summary.csv"), summary);
  log << "wrote " << summaries.size() << " runs to " << config.outputDir << '\n';
  return summaries;
}

std::vector<BoundCurve> cmdBounds(const BoundsConfig& config, std::ostream& log) {
  const LinearSystem sys = loadSource(config.source);
  std::optional<TelemetryColumns> telemetry;
  if (config.telemetryFile) telemetry = parseTelemetry(readCsvFile(*config.telemetryFile));

  if (!sys.hasReference()) throw ContractError("bounds need a system with a reference solution");
  const double errorInf = config.beta ? *config.beta : sys.errorInf();
  double initialErrorSq = norm2Sq(*sys.reference());  // x_0 = 0
  if (telemetry && !telemetry->errorSq.empty() && std::isfinite(telemetry->errorSq.front())) {
    initialErrorSq = telemetry->errorSq.front();
  }
  BoundInputs in = BoundInputs::normalized(sys.rows(), sys.cols(), minSingularValue(sys.matrix()), errorInf,
                                           initialErrorSq);
  in.frobeniusSq = frobeniusNormSq(sys.matrix());
  std::size_t iterations = config.iterations.value_or(telemetry ? telemetry->errorSq.size() : 1000);

  std::vector<BoundCurve> curves;
  curves.push_back(rkBound(in, iterations));
  curves.push_back(motzkinBoundWorstCase(in, iterations));
  if (telemetry) {
    in.gammaSeq = telemetry->gamma;
    if (in.gammaSeq.size() < iterations) {
      throw ContractError("telemetry has " + std::to_string(in.gammaSeq.size()) +
                          " records, fewer than the requested " + std::to_string(iterations) + " iterations");
    }
    curves.push_back(motzkinBoundEmpiricalGamma(in, iterations));
  }
  curves.push_back(gaussianRateBound(in, iterations, false));
  curves.push_back(gaussianRateBound(in, iterations, true));

  ensureDirectory(config.outputDir);
  for (const auto& curve : curves) {
    CsvTable table;
    table.header = {"k", "value", "name"};
    for (std::size_t k = 0; k < curve.values.size(); ++k) {
      table.rows.push_back({std::to_string(k), formatReal(curve.values[k]), curve.name});
    }
    writeCsvFile(joinPath(config.outputDir, "bound_" + curve.name + ".csv"), table);
    for (const auto& w : curve.warnings) log << "warning: " << curve.name << ": " << w << '\n';
  }
  log << "sigma_min " << formatReal(in.sigmaMin) << "\nerror_inf " << formatReal(errorInf) << "\nwrote "
      << curves.size() << " curves to " << config.outputDir << '\n';
  return curves;
}

std::vector<TimingRow> cmdTiming(const TimingConfig& config, std::ostream& log) {
  if (config.trials < 1) throw ContractError("trials must be at least 1");
  const LinearSystem sys = loadSource(config.source);
  const double threshold = config.threshold ? *config.threshold : 4.0 * sys.errorInf();

  RunOptions options = config.options;
  std::optional<DenseMatrix> gram;
  if (options.residualMode == ResidualMode::Incremental && sys.rows() <= kMaxCachedGramRows) {
    gram = gramRows(sys.matrix());
    options.rowGram = &*gram;
  }

  std::vector<TimingRow> rows;
  for (const auto& rule : {SelectionRule::motzkin(), SelectionRule::rkUniform()}) {
    rows.push_back({config.problem, std::string(toString(rule.kind)),
                    timeToThreshold(sys, rule, threshold, config.trials, config.seed, config.maxIterations,
                                    options)});
  }

  CsvTable table;
  table.header = {"problem", "solver", "mean_seconds", "mean_iterations", "trials", "censored"};
  for (const auto& r : rows) {
    table.rows.push_back({r.problem, r.solver, formatReal(r.summary.meanSeconds),
                          formatReal(r.summary.meanIterations), std::to_string(r.summary.trials),
                          std::to_string(r.summary.censored)});
    log << r.problem << ' ' << r.solver << ": " << formatReal(r.summary.meanIterations) << " iterations, "
        << r.summary.meanSeconds << " s cpu";
    if (r.summary.censored) log << " (" << r.summary.censored << " censored)";
    log << '\n';
  }
  writeCsvFile(config.outputFile, table);
  log << "threshold " << formatReal(threshold) << '\n';
  return rows;
}

}  // namespace rowaction
