#include "fta/eval.hpp"

#include "fta/features.hpp"
#include "fta/parallel.hpp"
#include "fta/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fta {

namespace {

/// AUTO threshold candidates are floored here. Keeping theta strictly
/// positive preserves the zero-padding invariance (padding frames score
/// exactly 0) even when a low quantile of the pooled scores is negative.
constexpr Real kThetaFloor = 1e-12;

Real quantile_of_sorted(const std::vector<Real>& sorted, Real q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const Real pos = q * static_cast<Real>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const Real frac = pos - static_cast<Real>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Real accuracy_mean(const std::vector<Real>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<Real>(values.size());
}

Real population_std(const std::vector<Real>& values, Real mean) {
  Real sq = 0.0;
  for (Real v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<Real>(values.size()));
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.runs < 1) {
    throw std::invalid_argument("validate_config: need runs >= 1");
  }
  if (cfg.m < 1 || cfg.p < 1) {
    throw std::invalid_argument("validate_config: need m >= 1 and p >= 1");
  }
  if (cfg.mode != Mode::bow && cfg.k < 2) {
    throw std::invalid_argument("validate_config: ordered modes need k >= 2");
  }
  if (cfg.k > cfg.m) {
    throw std::invalid_argument("validate_config: k exceeds m");
  }
  if (cfg.knn_K < 1) {
    throw std::invalid_argument("validate_config: need knn_K >= 1");
  }
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) {
    throw std::invalid_argument("validate_config: sigma must be positive");
  }
  if (cfg.theta && !std::isfinite(*cfg.theta)) {
    throw std::invalid_argument("validate_config: theta must be finite");
  }
}

RunSeeds run_seeds(std::uint64_t master_seed, std::uint32_t run) {
  const std::uint64_t run_master = mix_seed(master_seed, run);
  return RunSeeds{mix_seed(run_master, 1), mix_seed(run_master, 2),
                  mix_seed(run_master, 3)};
}

const std::vector<Real>& theta_grid_quantiles() {
  static const std::vector<Real> grid = {0.50, 0.60, 0.70, 0.75,
                                         0.80, 0.85, 0.90, 0.95};
  return grid;
}

Real pooled_score_quantile(const ProjectionBank& bank,
                           const std::vector<VideoSequence>& seqs, Real q) {
  if (seqs.empty()) {
    throw std::invalid_argument("pooled_score_quantile: no sequences");
  }
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("pooled_score_quantile: q outside [0, 1]");
  }
  std::vector<Real> pooled;
  for (const VideoSequence& v : seqs) {
    const ScoreMatrix s = score(bank, v);
    pooled.insert(pooled.end(), s.data(), s.data() + s.size());
  }
  std::sort(pooled.begin(), pooled.end());
  return quantile_of_sorted(pooled, q);
}

Real select_theta(const ProjectionBank& bank,
                  const std::vector<VideoSequence>& train,
                  const std::vector<std::int32_t>& labels,
                  const ExperimentConfig& cfg, const RunSeeds& seeds) {
  constexpr std::size_t kFolds = 5;
  if (train.size() < kFolds) {
    throw std::invalid_argument(
        "select_theta: 5-fold cross-validation needs at least 5 training "
        "sequences");
  }
  if (labels.size() != train.size()) {
    throw std::invalid_argument("select_theta: labels not parallel to train");
  }

  // Score once; only the threshold changes between candidates.
  std::vector<ScoreMatrix> scores;
  scores.reserve(train.size());
  std::vector<Real> pooled;
  for (const VideoSequence& v : train) {
    scores.push_back(score(bank, v));
    const ScoreMatrix& s = scores.back();
    pooled.insert(pooled.end(), s.data(), s.data() + s.size());
  }
  std::sort(pooled.begin(), pooled.end());

  std::vector<Real> candidates;
  for (Real q : theta_grid_quantiles()) {
    const Real theta = std::max(quantile_of_sorted(pooled, q), kThetaFloor);
    if (candidates.empty() || candidates.back() != theta) {
      candidates.push_back(theta);
    }
  }

  // Fixed fold assignment for the whole grid: a seeded shuffle dealt
  // round-robin into 5 folds.
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  DetRng rng(mix_seed(seeds.cv, kStreamFolds));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<std::size_t> fold_of(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    fold_of[order[i]] = i % kFolds;
  }

  Real best_theta = candidates.front();
  Real best_accuracy = -1.0;
  for (Real theta : candidates) {
    const HashSpec spec = make_hash_spec(bank, cfg.k, cfg.p, theta, cfg.mode,
                                         seeds.selection);
    std::vector<FtaCode> codes(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      codes[i] = hash_scores(spec, scores[i]);
    }
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t f = 0; f < kFolds; ++f) {
      std::vector<FtaCode> db_codes;
      std::vector<std::int32_t> db_labels;
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (fold_of[i] != f) {
          db_codes.push_back(codes[i]);
          db_labels.push_back(labels[i]);
        }
      }
      const CodeDatabase db =
          make_code_database(spec, std::move(db_codes), std::move(db_labels));
      for (std::size_t i = 0; i < train.size(); ++i) {
        if (fold_of[i] != f) continue;
        correct += knn_classify(db, codes[i], cfg.knn_K) == labels[i];
        ++total;
      }
    }
    const Real accuracy =
        static_cast<Real>(correct) / static_cast<Real>(total);
    // Strict > with candidates in ascending order: ties keep the smaller
    // threshold.
    if (accuracy > best_accuracy) {
      best_accuracy = accuracy;
      best_theta = theta;
    }
  }
  return best_theta;
}

EvalReport run_experiment(const Dataset& data, const ExperimentConfig& cfg) {
  validate_config(cfg);
  validate_dataset(data);
  const std::vector<std::size_t> train_idx = data.indices_of(Split::train);
  const std::vector<std::size_t> test_idx = data.indices_of(Split::test);
  if (train_idx.empty()) {
    throw std::invalid_argument("run_experiment: empty training split");
  }
  if (test_idx.empty()) {
    throw std::invalid_argument("run_experiment: empty test split");
  }
  for (std::size_t idx : train_idx) {
    if (!data.sequences[idx].label) {
      throw std::invalid_argument("run_experiment: unlabeled train sequence");
    }
  }
  for (std::size_t idx : test_idx) {
    if (!data.sequences[idx].label) {
      throw std::invalid_argument("run_experiment: unlabeled test sequence");
    }
  }

  // The standardizer sees the training split only; test statistics never
  // leak into the transform. It is seed-independent, hence shared by runs.
  const Standardizer st = fit_standardizer(subset(data, Split::train));
  std::vector<VideoSequence> train;
  std::vector<std::int32_t> train_labels;
  for (std::size_t idx : train_idx) {
    train.push_back(apply_standardizer(st, data.sequences[idx]));
    train_labels.push_back(*data.sequences[idx].label);
  }
  std::vector<VideoSequence> test;
  std::vector<std::int32_t> test_labels;
  for (std::size_t idx : test_idx) {
    test.push_back(apply_standardizer(st, data.sequences[idx]));
    test_labels.push_back(*data.sequences[idx].label);
  }

  const Index d = data.dim();
  EvalReport report;
  report.config = cfg;
  report.per_run_accuracy.resize(cfg.runs);
  report.per_run_theta.resize(cfg.runs);
  parallel_for(cfg.runs, cfg.threads, [&](std::size_t r) {
    const RunSeeds seeds =
        run_seeds(cfg.master_seed, static_cast<std::uint32_t>(r));
    const ProjectionBank bank = make_bank(seeds.bank, cfg.m, d, cfg.sigma);
    const Real theta =
        cfg.theta ? *cfg.theta
                  : select_theta(bank, train, train_labels, cfg, seeds);
    const HashSpec spec =
        make_hash_spec(bank, cfg.k, cfg.p, theta, cfg.mode, seeds.selection);
    std::vector<FtaCode> train_codes(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      train_codes[i] = hash(spec, train[i]);
    }
    const CodeDatabase db = make_code_database(
        spec, std::move(train_codes), train_labels, data.class_names);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      correct += knn_classify(db, hash(spec, test[i]), cfg.knn_K) ==
                 test_labels[i];
    }
    report.per_run_accuracy[r] =
        static_cast<Real>(correct) / static_cast<Real>(test.size());
    report.per_run_theta[r] = theta;
  });

  report.mean = accuracy_mean(report.per_run_accuracy);
  report.std_dev = population_std(report.per_run_accuracy, report.mean);
  report.chosen_theta = accuracy_mean(report.per_run_theta);
  return report;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "k") return SweepAxis::k;
  if (name == "p") return SweepAxis::p;
  if (name == "theta") return SweepAxis::theta;
  throw std::invalid_argument("sweep_axis_from_string: unknown axis '" + name +
                              "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::k: return "k";
    case SweepAxis::p: return "p";
    case SweepAxis::theta: return "theta";
  }
  throw std::invalid_argument("to_string: bad axis value");
}

std::vector<EvalReport> sweep(const Dataset& data, const ExperimentConfig& cfg,
                              SweepAxis axis,
                              const std::vector<Real>& values) {
  if (values.empty()) {
    throw std::invalid_argument("sweep: no values");
  }
  std::vector<EvalReport> reports;
  reports.reserve(values.size());
  for (Real value : values) {
    ExperimentConfig point = cfg;
    switch (axis) {
      case SweepAxis::k:
      case SweepAxis::p: {
        if (value < 1.0 || value != std::floor(value)) {
          throw std::invalid_argument("sweep: " + to_string(axis) +
                                      " values must be positive integers");
        }
        const auto v = static_cast<std::uint32_t>(value);
        (axis == SweepAxis::k ? point.k : point.p) = v;
        break;
      }
      case SweepAxis::theta:
        point.theta = value;
        break;
    }
    reports.push_back(run_experiment(data, point));
  }
  return reports;
}

}  // namespace fta
