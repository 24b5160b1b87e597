#include "rowaction/bounds.hpp"

#include <cmath>

#include "rowaction/errors.hpp"

namespace rowaction {

BoundInputs BoundInputs::normalized(std::size_t m, std::size_t n, double sigmaMin, double errorInf,
                                    double initialErrorSq) {
  BoundInputs in;
  in.m = m;
  in.n = n;
  in.sigmaMin = sigmaMin;
  in.errorInf = errorInf;
  in.initialErrorSq = initialErrorSq;
  in.frobeniusSq = static_cast<double>(m);
  return in;
}

namespace {

void validate(const BoundInputs& in) {
  if (in.m == 0 || in.n == 0) throw ContractError("bounds: m and n must be positive");
  if (!(in.sigmaMin > 0.0)) throw ContractError("bounds: sigmaMin must be positive");
  if (!(in.errorInf >= 0.0)) throw ContractError("bounds: errorInf must be nonnegative");
  if (!(in.initialErrorSq >= 0.0)) throw ContractError("bounds: initialErrorSq must be nonnegative");
}

// 1 − reduction, clamped into [0, 1]; records a warning on the curve when clamped.
double contraction(double reduction, std::size_t k, BoundCurve& curve) {
  const double c = 1.0 - reduction;
  if (c < 0.0 || c > 1.0) {
    curve.warnings.push_back("contraction factor " + std::to_string(c) + " at k=" + std::to_string(k) +
                             " clamped into [0, 1]");
    return c < 0.0 ? 0.0 : 1.0;
  }
  return c;
}

BoundCurve geometric(std::string name, double reduction, double horizon, const BoundInputs& in,
                     std::size_t iterations) {
  BoundCurve curve{std::move(name), {}, {}};
  const double c = contraction(reduction, 0, curve);
  curve.values.reserve(iterations + 1);
  double power = 1.0;
  for (std::size_t k = 0; k <= iterations; ++k) {
    curve.values.push_back(power * in.initialErrorSq + horizon);
    power *= c;
  }
  return curve;
}

}  // namespace

BoundCurve rkBound(const BoundInputs& in, std::size_t iterations) {
  validate(in);
  if (!(in.frobeniusSq > 0.0)) throw ContractError("rkBound: frobeniusSq must be positive");
  const double s2 = in.sigmaMin * in.sigmaMin;
  const double horizon = in.frobeniusSq / s2 * in.errorInf * in.errorInf;
  return geometric("rk", s2 / in.frobeniusSq, horizon, in, iterations);
}

BoundCurve motzkinBoundWorstCase(const BoundInputs& in, std::size_t iterations) {
  validate(in);
  const double s2 = in.sigmaMin * in.sigmaMin;
  const double m = static_cast<double>(in.m);
  const double horizon = 2.0 * m / s2 * in.errorInf * in.errorInf;
  return geometric("motzkin-worst-case", s2 / (4.0 * m), horizon, in, iterations);
}

BoundCurve motzkinBoundEmpiricalGamma(const BoundInputs& in, std::size_t iterations) {
  validate(in);
  if (in.gammaSeq.size() < iterations) {
    throw ContractError("motzkinBoundEmpiricalGamma: need " + std::to_string(iterations) +
                        " gamma values, have " + std::to_string(in.gammaSeq.size()));
  }
  const double s2 = in.sigmaMin * in.sigmaMin;
  const double m = static_cast<double>(in.m);
  const double horizon = 2.0 * m / s2 * in.errorInf * in.errorInf;
  BoundCurve curve{"motzkin-empirical-gamma", {}, {}};
  curve.values.reserve(iterations + 1);
  double product = 1.0;
  for (std::size_t k = 0; k <= iterations; ++k) {
    curve.values.push_back(product * in.initialErrorSq + horizon);
    if (k == iterations) break;
    const double gamma = std::isfinite(in.gammaSeq[k]) ? in.gammaSeq[k] : m;
    product *= contraction(s2 / (4.0 * gamma), k, curve);
  }
  return curve;
}

FinalErrorBounds finalErrorBounds(const BoundInputs& in) {
  validate(in);
  const double scale = 25.0 * static_cast<double>(in.m) / (in.sigmaMin * in.sigmaMin);
  const double e2 = in.errorInf * in.errorInf;
  const double beta = in.beta.value_or(in.errorInf);
  return {scale * e2, (scale + 8.0) * e2, scale * beta * beta};
}

BoundCurve gaussianRateBound(const BoundInputs& in, std::size_t iterations, bool conjectured) {
  validate(in);
  if (in.m < 2) throw ContractError("gaussianRateBound: m must be at least 2");
  const double s2 = in.sigmaMin * in.sigmaMin;
  const double m = static_cast<double>(in.m);
  const double n = static_cast<double>(in.n);
  const double step = 0.5 * in.errorInf * in.errorInf;
  BoundCurve curve{conjectured ? "gaussian-conjectured" : "gaussian", {}, {}};
  curve.values.reserve(iterations + 1);
  double value = in.initialErrorSq;
  for (std::size_t k = 0; k <= iterations; ++k) {
    curve.values.push_back(value);
    if (k == iterations) break;
    double reduction;
    if (conjectured) {
      reduction = std::log(m) * s2 / (4.0 * m);
    } else {
      const double mPrime = in.m > k + 2 ? static_cast<double>(in.m - k) : 2.0;
      reduction = std::log(mPrime) * s2 / (4.0 * n * m);
    }
    value = contraction(reduction, k, curve) * value + step;
  }
  return curve;
}

double gammaExpectationBound(std::size_t m, std::size_t n, std::size_t k,
                             std::span<const double> sampledNormsSq) {
  if (sampledNormsSq.size() > k) {
    throw ContractError("gammaExpectationBound: more sampled rows than iterations");
  }
  if (sampledNormsSq.size() > m || m - sampledNormsSq.size() < 2) {
    throw ContractError("gammaExpectationBound: fewer than two unsampled rows");
  }
  const double mPrime = static_cast<double>(m - sampledNormsSq.size());
  double sampled = 0.0;
  for (double v : sampledNormsSq) sampled += v;
  return static_cast<double>(n) * (mPrime + sampled) / std::log(mPrime);
}

double sigmaMinGaussianEstimate(std::size_t m, std::size_t n) {
  if (n == 0 || m <= n) throw ContractError("sigmaMinGaussianEstimate: need m > n >= 1");
  return std::sqrt(static_cast<double>(m) / static_cast<double>(n)) - 1.0;
}

}  // namespace rowaction
