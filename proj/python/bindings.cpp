// Python module `rowaction`: systems, solvers, bounds and MPS ingestion over
// numpy arrays. Matrices cross the boundary as C-contiguous float64 copies.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "rowaction/bounds.hpp"
#include "rowaction/errors.hpp"
#include "rowaction/mps.hpp"
#include "rowaction/solvers.hpp"
#include "rowaction/systems.hpp"

namespace py = pybind11;
using namespace rowaction;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix toMatrix(const Array& a) {
  if (a.ndim() != 2) throw ContractError("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return DenseMatrix(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

Vector toVector(const Array& v) {
  if (v.ndim() != 1) throw ContractError("expected a 1-D array");
  return Vector(v.data(), v.data() + v.shape(0));
}

py::array_t<double> fromVector(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> fromMatrix(const DenseMatrix& a) {
  py::array_t<double> out({static_cast<py::ssize_t>(a.rows()), static_cast<py::ssize_t>(a.cols())});
  std::copy(a.data().begin(), a.data().end(), out.mutable_data());
  return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

py::dict telemetry(const RunResult& res) {
  const std::size_t n = res.records.size();
  py::array_t<std::int64_t> k(n), row(n);
  py::array_t<double> resInf(n), res2(n), gamma(n), err(n), sel(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = res.records[i];
    k.mutable_at(i) = static_cast<std::int64_t>(r.k);
    row.mutable_at(i) = static_cast<std::int64_t>(r.selectedRow);
    resInf.mutable_at(i) = r.residualInf;
    res2.mutable_at(i) = r.residual2Sq;
    gamma.mutable_at(i) = r.gamma.value_or(kNaN);
    err.mutable_at(i) = r.errorSq.value_or(kNaN);
    sel.mutable_at(i) = r.selectedResidualSq;
  }
  py::dict d;
  d["k"] = k;
  d["selected_row"] = row;
  d["residual_inf"] = resInf;
  d["residual_2sq"] = res2;
  d["gamma"] = gamma;
  d["error_sq"] = err;
  d["selected_residual_sq"] = sel;
  return d;
}

BoundInputs boundInputs(std::size_t m, std::size_t n, double sigmaMin, double errorInf, double initialErrorSq,
                        std::optional<Array> gamma, std::optional<double> beta) {
  BoundInputs in = BoundInputs::normalized(m, n, sigmaMin, errorInf, initialErrorSq);
  if (gamma) in.gammaSeq = toVector(*gamma);
  in.beta = beta;
  return in;
}

}  // namespace

PYBIND11_MODULE(rowaction, m) {
  m.doc() = "Motzkin, randomized Kaczmarz and hybrid row-action solvers with their error bounds";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<RankError>(m, "RankError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DegenerateRowError>(m, "DegenerateRowError", base.ptr());

  m.def("least_squares", [](const Array& a, const Array& b) { return fromVector(leastSquares(toMatrix(a), toVector(b))); },
        py::arg("a"), py::arg("b"));
  m.def("least_norm", [](const Array& a, const Array& b) { return fromVector(leastNorm(toMatrix(a), toVector(b))); },
        py::arg("a"), py::arg("b"));
  m.def("min_singular_value", [](const Array& a) { return minSingularValue(toMatrix(a)); }, py::arg("a"));
  m.def(
      "normalize_rows",
      [](const Array& a, const Array& b) {
        const auto [an, bn] = normalizeRows(toMatrix(a), toVector(b));
        return py::make_tuple(fromMatrix(an), fromVector(bn));
      },
      py::arg("a"), py::arg("b"));

  py::class_<LinearSystem>(m, "LinearSystem")
      .def(py::init([](const Array& a, const Array& b, std::optional<Array> reference) {
             std::optional<Vector> ref;
             if (reference) ref = toVector(*reference);
             return LinearSystem(toMatrix(a), toVector(b), std::move(ref));
           }),
           py::arg("a"), py::arg("b"), py::arg("reference") = py::none())
      .def_property_readonly("a", [](const LinearSystem& s) { return fromMatrix(s.matrix()); })
      .def_property_readonly("b", [](const LinearSystem& s) { return fromVector(s.rhs()); })
      .def_property_readonly("reference",
                             [](const LinearSystem& s) -> py::object {
                               if (!s.reference()) return py::none();
                               return fromVector(*s.reference());
                             })
      .def_property_readonly("error_vec",
                             [](const LinearSystem& s) -> py::object {
                               if (!s.errorVec()) return py::none();
                               return fromVector(*s.errorVec());
                             })
      .def_property_readonly("rows", &LinearSystem::rows)
      .def_property_readonly("cols", &LinearSystem::cols)
      .def("error_inf", &LinearSystem::errorInf)
      .def("residual", [](const LinearSystem& s, const Array& x) { return fromVector(residual(s, toVector(x))); })
      .def("save", [](const LinearSystem& s, const std::string& path) { saveSystem(path, s); })
      .def_static("load", &loadSystem)
      .def("__eq__", [](const LinearSystem& a, const LinearSystem& b) { return a == b; })
      .def("__repr__", [](const LinearSystem& s) {
        return "<LinearSystem " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + ">";
      });

  m.def(
      "generate",
      [](const std::string& kind, std::size_t rows, std::size_t cols, double noiseStd, std::size_t spikeCount,
         double spikeMagnitude, double rowMean, double rowStd, std::uint64_t seed) {
        GeneratorSpec spec;
        spec.kind = parseGeneratorKind(kind);
        spec.m = rows;
        spec.n = cols;
        spec.noiseStd = noiseStd;
        spec.spikeCount = spikeCount;
        spec.spikeMagnitude = spikeMagnitude;
        spec.rowMean = rowMean;
        spec.rowStd = rowStd;
        spec.seed = seed;
        return generate(spec);
      },
      py::arg("kind") = "gaussian-noise", py::arg("m") = 2000, py::arg("n") = 50, py::arg("noise_std") = 0.01,
      py::arg("spike_count") = 50, py::arg("spike_magnitude") = 15.0, py::arg("row_mean") = 1.0,
      py::arg("row_std") = 0.5, py::arg("seed") = 0);

  m.def(
      "run",
      [](const LinearSystem& sys, const std::string& rule, std::size_t maxIterations,
         std::optional<double> residualThreshold, std::optional<double> beta, double hybridThreshold,
         std::optional<Array> x0, std::uint64_t seed, const std::string& residualMode, bool stopAtHorizon) {
        SelectionRule r{parseRuleKind(rule), hybridThreshold};
        if (r.kind == RuleKind::Hybrid && hybridThreshold == 0.0) {
          r.hybridThreshold = 4.0 * (beta ? *beta : sys.errorInf());
        }
        StopRule stop;
        stop.maxIterations = maxIterations;
        stop.residualInfThreshold = residualThreshold;
        stop.errorBoundBeta = beta;
        if (stopAtHorizon) stop.residualInfThreshold = 4.0 * sys.errorInf();
        RunOptions options;
        if (residualMode == "incremental") options.residualMode = ResidualMode::Incremental;
        else if (residualMode != "direct") throw ContractError("residual_mode must be 'direct' or 'incremental'");
        const Vector start = x0 ? toVector(*x0) : Vector(sys.cols(), 0.0);
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run(sys, r, stop, start, seed, options);
        }
        py::dict out;
        out["x"] = fromVector(res.state.x);
        out["iterations"] = res.state.iteration;
        out["stop_reason"] = std::string(toString(res.stopReason));
        out["switch_iteration"] = res.switchIteration ? py::cast(*res.switchIteration) : py::none();
        out["telemetry"] = telemetry(res);
        py::dict term;
        term["residual_inf"] = res.terminal.residualInf;
        term["residual_2sq"] = res.terminal.residual2Sq;
        term["gamma"] = res.terminal.gamma.value_or(kNaN);
        term["error_sq"] = res.terminal.errorSq.value_or(kNaN);
        out["terminal"] = term;
        return out;
      },
      py::arg("system"), py::arg("rule") = "motzkin", py::arg("max_iterations") = 10000,
      py::arg("residual_threshold") = py::none(), py::arg("beta") = py::none(), py::arg("hybrid_threshold") = 0.0,
      py::arg("x0") = py::none(), py::arg("seed") = 0, py::arg("residual_mode") = "direct",
      py::arg("stop_at_horizon") = false,
      "Run one solver. The hybrid rule switches at hybrid_threshold (default 4*beta or 4||e||_inf).");

  m.def(
      "time_to_threshold",
      [](const LinearSystem& sys, const std::string& rule, double threshold, std::size_t trials, std::uint64_t seed,
         std::size_t maxIterations) {
        TimingSummary t;
        {
          py::gil_scoped_release release;
          t = timeToThreshold(sys, SelectionRule{parseRuleKind(rule), 0.0}, threshold, trials, seed, maxIterations);
        }
        py::dict out;
        out["mean_seconds"] = t.meanSeconds;
        out["mean_wall_seconds"] = t.meanWallSeconds;
        out["mean_iterations"] = t.meanIterations;
        out["trials"] = t.trials;
        out["censored"] = t.censored;
        out["iterations_per_trial"] = t.iterationsPerTrial;
        return out;
      },
      py::arg("system"), py::arg("rule"), py::arg("threshold"), py::arg("trials") = 10, py::arg("seed") = 0,
      py::arg("max_iterations") = 1000000);

  // Bounds take the scalar inputs directly; frobenius_sq is m (row-normalized).
  auto curve = [](const BoundCurve& c) { return fromVector(c.values); };
  m.def(
      "rk_bound",
      [curve](std::size_t m_, std::size_t n, double sigma, double errInf, double e0, std::size_t k) {
        return curve(rkBound(boundInputs(m_, n, sigma, errInf, e0, std::nullopt, std::nullopt), k));
      },
      py::arg("m"), py::arg("n"), py::arg("sigma_min"), py::arg("error_inf"), py::arg("initial_error_sq"),
      py::arg("iterations"));
  m.def(
      "motzkin_bound_worst_case",
      [curve](std::size_t m_, std::size_t n, double sigma, double errInf, double e0, std::size_t k) {
        return curve(motzkinBoundWorstCase(boundInputs(m_, n, sigma, errInf, e0, std::nullopt, std::nullopt), k));
      },
      py::arg("m"), py::arg("n"), py::arg("sigma_min"), py::arg("error_inf"), py::arg("initial_error_sq"),
      py::arg("iterations"));
  m.def(
      "motzkin_bound_empirical_gamma",
      [curve](std::size_t m_, std::size_t n, double sigma, double errInf, double e0, const Array& gamma,
              std::optional<std::size_t> k) {
        const BoundInputs in = boundInputs(m_, n, sigma, errInf, e0, gamma, std::nullopt);
        return curve(motzkinBoundEmpiricalGamma(in, k.value_or(in.gammaSeq.size())));
      },
      py::arg("m"), py::arg("n"), py::arg("sigma_min"), py::arg("error_inf"), py::arg("initial_error_sq"),
      py::arg("gamma"), py::arg("iterations") = py::none());
  m.def(
      "gaussian_rate_bound",
      [curve](std::size_t m_, std::size_t n, double sigma, double errInf, double e0, std::size_t k, bool conj) {
        return curve(gaussianRateBound(boundInputs(m_, n, sigma, errInf, e0, std::nullopt, std::nullopt), k, conj));
      },
      py::arg("m"), py::arg("n"), py::arg("sigma_min"), py::arg("error_inf"), py::arg("initial_error_sq"),
      py::arg("iterations"), py::arg("conjectured") = false);
  m.def(
      "final_error_bounds",
      [](std::size_t m_, std::size_t n, double sigma, double errInf, std::optional<double> beta) {
        const FinalErrorBounds f = finalErrorBounds(boundInputs(m_, n, sigma, errInf, 0.0, std::nullopt, beta));
        return py::make_tuple(f.atStop, f.nextStep, f.betaSquared);
      },
      py::arg("m"), py::arg("n"), py::arg("sigma_min"), py::arg("error_inf"), py::arg("beta") = py::none());
  m.def("gamma_expectation_bound",
        [](std::size_t m_, std::size_t n, std::size_t k, const Array& sampled) {
          const Vector v = toVector(sampled);
          return gammaExpectationBound(m_, n, k, v);
        },
        py::arg("m"), py::arg("n"), py::arg("k"), py::arg("sampled_norms_sq"));
  m.def("sigma_min_gaussian_estimate", &sigmaMinGaussianEstimate, py::arg("m"), py::arg("n"));

  m.def(
      "read_mps",
      [](const std::string& path, const std::string& columns) {
        const MpsProblem p = readMpsFile(path);
        const auto policy = columns == "structural" ? ColumnPolicy::Structural : ColumnPolicy::StandardForm;
        if (columns != "structural" && columns != "standard-form") {
          throw ContractError("columns must be 'standard-form' or 'structural'");
        }
        const auto [a, b] = extractSystem(p, policy);
        py::dict out;
        out["name"] = p.name;
        out["a"] = fromMatrix(a);
        out["b"] = fromVector(b);
        out["warnings"] = p.warnings;
        return out;
      },
      py::arg("path"), py::arg("columns") = "standard-form",
      "Parse an MPS file and return its dense constraint system.");
  m.def(
      "overdetermine",
      [](const Array& a, const Array& b, double noiseStd, std::uint64_t seed) {
        return overdetermine(toMatrix(a), toVector(b), TransformSpec{noiseStd, seed});
      },
      py::arg("a"), py::arg("b"), py::arg("noise_std") = 1e-6, py::arg("seed") = 0);
}
