#pragma once

// Closed-form error bounds for row-action methods on row-normalized systems,
// evaluated as per-iteration curves (value[k] bounds ‖x_k − x‖²) or scalars.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rowaction {

struct BoundInputs {
  std::size_t m = 0;
  std::size_t n = 0;
  double sigmaMin = 0.0;
  double errorInf = 0.0;        // ‖e‖∞, or a bound β when the exact value is unknown
  double initialErrorSq = 0.0;  // ‖x_0 − x‖²
  std::vector<double> gammaSeq; // empirical dynamic ranges γ_k; empty when unavailable
  double frobeniusSq = 0.0;     // ‖A‖_F², m for row-normalized systems
  std::optional<double> beta;   // for the β-form final error; defaults to errorInf

  // Convenience for a normalized system: frobeniusSq = m.
  static BoundInputs normalized(std::size_t m, std::size_t n, double sigmaMin, double errorInf,
                                double initialErrorSq);
};

struct BoundCurve {
  std::string name;
  std::vector<double> values;
  // Set when a contraction factor had to be clamped into [0, 1].
  std::vector<std::string> warnings;
};

/// Expected-error bound for randomized Kaczmarz:
/// (1 − σ²/‖A‖_F²)^k E0 + (‖A‖_F²/σ²)‖e‖∞², k = 0..K.
BoundCurve rkBound(const BoundInputs& in, std::size_t iterations);

/// Motzkin rate driven by the observed dynamic range:
/// Π_{k<K}(1 − σ²/(4γ_k)) E0 + 2mσ⁻²‖e‖∞². Needs gammaSeq.size() >= K.
/// Non-finite γ entries (x_k = x exactly) fall back to the worst case γ = m.
BoundCurve motzkinBoundEmpiricalGamma(const BoundInputs& in, std::size_t iterations);

/// The same with γ_k replaced by its worst case m.
BoundCurve motzkinBoundWorstCase(const BoundInputs& in, std::size_t iterations);

struct FinalErrorBounds {
  double atStop = 0.0;        // 25mσ⁻²‖e‖∞²: ‖x_k − x‖² once ‖Ax_k − b‖∞ <= 4‖e‖∞
  double nextStep = 0.0;      // (25mσ⁻² + 8)‖e‖∞²: one further step
  double betaSquared = 0.0;   // 25mσ⁻²β², squared so it compares with errorSq telemetry
};
FinalErrorBounds finalErrorBounds(const BoundInputs& in);

/// Gaussian-matrix rate by recursion E_{k+1} = (1 − f_k)E_k + ½‖e‖∞² with
/// f_k = log(m′)σ²/(4nm), m′ = max(2, m − k); the conjectured variant uses
/// f = log(m)σ²/(4m). Absolute constants are fixed to 1, so this curve is a
/// qualitative overlay rather than a certified bound.
BoundCurve gaussianRateBound(const BoundInputs& in, std::size_t iterations, bool conjectured);

/// n(m′ + Σ sampledNormsSq)/log(m′) with m′ = m − |sampled|, constant fixed
/// to 1. At most k rows can have been touched by iteration k.
double gammaExpectationBound(std::size_t m, std::size_t n, std::size_t k,
                             std::span<const double> sampledNormsSq);

/// √(m/n) − 1, the typical σ_min of an m×n matrix with N(0, 1/n) entries.
/// An estimate only; assertions use the exact value.
double sigmaMinGaussianEstimate(std::size_t m, std::size_t n);

}  // namespace rowaction
