#include "rowaction/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <memory>

#include "rowaction/errors.hpp"

namespace rowaction {

std::string_view toString(RuleKind kind) {
  switch (kind) {
    case RuleKind::Motzkin: return "motzkin";
    case RuleKind::RkUniform: return "rk-uniform";
    case RuleKind::RkWeighted: return "rk-weighted";
    case RuleKind::Hybrid: return "hybrid";
  }
  return "unknown";
}

RuleKind parseRuleKind(std::string_view name) {
  if (name == "rk") return RuleKind::RkUniform;
  for (auto kind : {RuleKind::Motzkin, RuleKind::RkUniform, RuleKind::RkWeighted, RuleKind::Hybrid}) {
    if (toString(kind) == name) return kind;
  }
  throw ContractError("unknown selection rule '" + std::string(name) + "'");
}

std::string_view toString(StopReason reason) {
  return reason == StopReason::ResidualThreshold ? "residual-threshold" : "max-iterations";
}

void SelectionRule::validate() const {
  if (!(hybridThreshold >= 0.0)) throw ContractError("hybrid threshold must be nonnegative");
  if (kind == RuleKind::Hybrid && !(hybridThreshold > 0.0)) {
    throw ContractError("hybrid rule needs a positive switch threshold");
  }
}

void StopRule::validate() const {
  if (residualInfThreshold && !(*residualInfThreshold >= 0.0)) {
    throw ContractError("residual threshold must be nonnegative");
  }
  if (errorBoundBeta && !(*errorBoundBeta >= 0.0)) throw ContractError("beta must be nonnegative");
}

std::optional<double> StopRule::effectiveThreshold() const {
  std::optional<double> out = residualInfThreshold;
  if (errorBoundBeta) {
    const double fromBeta = 4.0 * *errorBoundBeta;
    out = out ? std::max(*out, fromBeta) : fromBeta;
  }
  return out;
}

std::size_t selectMotzkin(std::span<const double> r) {
  if (r.empty()) throw ContractError("selectMotzkin: empty residual");
  std::size_t best = 0;
  double bestSq = r[0] * r[0];
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double sq = r[i] * r[i];
    if (sq > bestSq) {
      bestSq = sq;
      best = i;
    }
  }
  return best;
}

RowSampler::RowSampler(std::span<const double> weights) {
  if (weights.empty()) throw ContractError("RowSampler: no rows");
  cumulative_.reserve(weights.size());
  CompensatedSum total;
  uniform_ = true;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ContractError("RowSampler: weights must be positive");
    if (w != weights[0]) uniform_ = false;
    total.add(w);
    cumulative_.push_back(total.value());
  }
}

std::size_t RowSampler::operator()(Rng& rng) const {
  if (uniform_) return static_cast<std::size_t>(rng.below(cumulative_.size()));
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

std::size_t selectRK(std::span<const double> rowNormsSq, Rng& rng) { return RowSampler(rowNormsSq)(rng); }

void projectInPlace(const LinearSystem& sys, std::span<double> x, std::size_t i) {
  if (i >= sys.rows()) throw ContractError("projectStep: row index out of range");
  if (x.size() != sys.cols()) throw ContractError("projectStep: iterate length mismatch");
  const auto row = sys.matrix().row(i);
  const double delta = sys.rhs()[i] - dot(row, x);
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += delta * row[j];
}

Vector projectStep(const LinearSystem& sys, std::span<const double> x, std::size_t i) {
  Vector out(x.begin(), x.end());
  projectInPlace(sys, out, i);
  return out;
}

namespace {

// Keeps Ax − b current across projection updates.
class ResidualTracker {
 public:
  ResidualTracker(const LinearSystem& sys, std::span<const double> x, const RunOptions& options)
      : sys_(sys), mode_(options.residualMode), refreshEvery_(std::max<std::size_t>(1, options.refreshEvery)) {
    gram_ = options.rowGram;
    if (mode_ == ResidualMode::Incremental && !gram_ && sys.rows() <= kMaxCachedGramRows) {
      ownedGram_ = std::make_unique<DenseMatrix>(gramRows(sys.matrix()));
      gram_ = ownedGram_.get();
    }
    if (gram_ && (gram_->rows() != sys.rows() || gram_->cols() != sys.rows())) {
      throw ContractError("row Gram matrix does not match the system");
    }
    r_ = residual(sys_, x);
  }

  const Vector& current() const noexcept { return r_; }

  // x has just been updated by x += delta * a_i.
  void update(std::size_t i, double delta, std::span<const double> x) {
    if (mode_ == ResidualMode::Direct || ++sinceRefresh_ >= refreshEvery_) {
      r_ = residual(sys_, x);
      sinceRefresh_ = 0;
      return;
    }
    const auto& a = sys_.matrix();
    if (gram_) {
      const auto column = gram_->row(i);
      for (std::size_t j = 0; j < r_.size(); ++j) r_[j] += delta * column[j];
    } else {
      const auto ai = a.row(i);
      for (std::size_t j = 0; j < r_.size(); ++j) r_[j] += delta * dot(a.row(j), ai);
    }
  }

 private:
  const LinearSystem& sys_;
  ResidualMode mode_;
  std::size_t refreshEvery_;
  std::size_t sinceRefresh_ = 0;
  const DenseMatrix* gram_ = nullptr;
  std::unique_ptr<DenseMatrix> ownedGram_;
  Vector r_;
};

struct Snapshot {
  double residual2Sq = 0.0;
  std::optional<double> gamma;
  std::optional<double> errorSq;
};

Snapshot measure(const LinearSystem& sys, std::span<const double> x, std::span<const double> r) {
  Snapshot s;
  s.residual2Sq = norm2Sq(r);
  if (sys.hasReference()) {
    s.errorSq = norm2Sq(subtract(x, *sys.reference()));
    // A(x_k − x) = (Ax_k − b) − (Ax − b) = r − e.
    const Vector shifted = subtract(r, *sys.errorVec());
    const double inf = normInf(shifted);
    if (inf > 0.0) s.gamma = norm2Sq(shifted) / (inf * inf);
  }
  return s;
}

}  // namespace

RunResult run(const LinearSystem& sys, const SelectionRule& rule, const StopRule& stop,
              std::span<const double> x0, std::uint64_t seed, const RunOptions& options) {
  rule.validate();
  stop.validate();
  if (x0.size() != sys.cols()) throw ContractError("run: x0 length does not match columns");

  RunResult result;
  result.state.x.assign(x0.begin(), x0.end());
  Vector& x = result.state.x;

  const auto& a = sys.matrix();
  Vector weights(sys.rows(), 1.0);
  if (rule.kind == RuleKind::RkWeighted) {
    for (std::size_t i = 0; i < sys.rows(); ++i) weights[i] = norm2Sq(a.row(i));
  }
  const RowSampler sampler(weights);
  Rng rng(seed);
  const std::optional<double> threshold = stop.effectiveThreshold();
  ResidualTracker tracker(sys, x, options);
  bool switched = false;
  if (options.recordTelemetry) result.records.reserve(std::min<std::size_t>(stop.maxIterations, 1u << 16));

  for (std::size_t k = 0;; ++k) {
    const Vector& r = tracker.current();
    const double resInf = normInf(r);
    const bool hitThreshold = threshold && resInf <= *threshold;
    if (hitThreshold || k == stop.maxIterations) {
      result.stopReason = hitThreshold ? StopReason::ResidualThreshold : StopReason::MaxIterations;
      const Snapshot s = measure(sys, x, r);
      result.terminal = {k, resInf, s.residual2Sq, s.gamma, s.errorSq};
      result.state.iteration = k;
      break;
    }

    std::size_t row = 0;
    switch (rule.kind) {
      case RuleKind::Motzkin:
        row = selectMotzkin(r);
        break;
      case RuleKind::RkUniform:
      case RuleKind::RkWeighted:
        row = sampler(rng);
        break;
      case RuleKind::Hybrid:
        if (!switched && resInf > rule.hybridThreshold) {
          row = selectMotzkin(r);
        } else {
          if (!switched) {
            switched = true;
            result.switchIteration = k;
          }
          row = sampler(rng);
        }
        break;
    }

    if (options.recordTelemetry) {
      const Snapshot s = measure(sys, x, r);
      result.records.push_back({k, row, resInf, s.residual2Sq, s.gamma, s.errorSq, r[row] * r[row]});
    }

    const auto ai = a.row(row);
    const double delta = sys.rhs()[row] - dot(ai, x);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += delta * ai[j];
    tracker.update(row, delta, x);
  }
  return result;
}

TimingSummary timeToThreshold(const LinearSystem& sys, const SelectionRule& rule, double threshold,
                              std::size_t trials, std::uint64_t seed, std::size_t maxIterations,
                              const RunOptions& options) {
  if (trials == 0) throw ContractError("timeToThreshold: need at least one trial");
  RunOptions opts = options;
  std::unique_ptr<DenseMatrix> gram;
  if (opts.residualMode == ResidualMode::Incremental && !opts.rowGram && sys.rows() <= kMaxCachedGramRows) {
    gram = std::make_unique<DenseMatrix>(gramRows(sys.matrix()));
    opts.rowGram = gram.get();
  }

  StopRule stop;
  stop.maxIterations = maxIterations;
  stop.residualInfThreshold = threshold;
  const Vector x0(sys.cols(), 0.0);

  TimingSummary summary;
  summary.trials = trials;
  double cpu = 0.0;
  double wall = 0.0;
  double iters = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::clock_t c0 = std::clock();
    const auto w0 = std::chrono::steady_clock::now();
    const RunResult res = run(sys, rule, stop, x0, seed + t, opts);
    const auto w1 = std::chrono::steady_clock::now();
    const std::clock_t c1 = std::clock();
    cpu += static_cast<double>(c1 - c0) / CLOCKS_PER_SEC;
    wall += std::chrono::duration<double>(w1 - w0).count();
    iters += static_cast<double>(res.state.iteration);
    summary.iterationsPerTrial.push_back(res.state.iteration);
    if (res.stopReason == StopReason::MaxIterations) ++summary.censored;
  }
  const double n = static_cast<double>(trials);
  summary.meanSeconds = cpu / n;
  summary.meanWallSeconds = wall / n;
  summary.meanIterations = iters / n;
  return summary;
}

}  // namespace rowaction
