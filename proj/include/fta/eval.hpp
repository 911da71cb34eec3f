#pragma once

#include "fta/hash.hpp"
#include "fta/search.hpp"
#include "fta/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fta {

/// Everything one experiment needs besides the dataset itself. theta unset
/// means AUTO: each run picks its own threshold by cross-validation on the
/// training split.
struct ExperimentConfig {
  Mode mode = Mode::peak;
  std::uint32_t m = 500;
  std::uint32_t k = 2;
  std::uint32_t p = 1000;
  std::optional<Real> theta;  // nullopt = AUTO
  Real sigma = 1.0;
  std::uint32_t runs = 50;
  std::uint32_t knn_K = 1;
  std::uint64_t master_seed = 0;
  std::uint32_t threads = 0;  // 0 = hardware default
  std::string feature = "none";  // recorded in reports; extraction is upstream
};

void validate_config(const ExperimentConfig& cfg);

/// Per-run seeds derived from the master seed: every run draws a fresh bank
/// and fresh groups, so the spread over runs measures the randomness of the
/// hash family itself.
struct RunSeeds {
  std::uint64_t bank = 0;
  std::uint64_t selection = 0;
  std::uint64_t cv = 0;  // fold shuffling during theta selection
};

RunSeeds run_seeds(std::uint64_t master_seed, std::uint32_t run);

/// Evenly spaced probabilities whose pooled-score quantiles form the AUTO
/// threshold grid.
const std::vector<Real>& theta_grid_quantiles();

/// The q-quantile (linear interpolation) of all m*n scores pooled over the
/// given sequences.
Real pooled_score_quantile(const ProjectionBank& bank,
                           const std::vector<VideoSequence>& seqs, Real q);

/// Picks theta by 5-fold cross-validation on the training sequences: builds
/// the candidate grid from pooled-score quantiles, scores each candidate by
/// CV accuracy under this run's bank/groups, returns the best (ties -> the
/// smaller theta). Candidates are floored at a tiny positive value so the
/// zero-padding invariance (theta > 0) always holds. Throws when fewer than
/// 5 training sequences are available.
Real select_theta(const ProjectionBank& bank,
                  const std::vector<VideoSequence>& train,
                  const std::vector<std::int32_t>& labels,
                  const ExperimentConfig& cfg, const RunSeeds& seeds);

/// Aggregated outcome of `runs` independent repetitions.
struct EvalReport {
  ExperimentConfig config;
  std::vector<Real> per_run_accuracy;
  std::vector<Real> per_run_theta;
  Real mean = 0.0;
  Real std_dev = 0.0;      // population std over runs
  Real chosen_theta = 0.0; // mean of per-run thetas
};

/// Full protocol, once per run: derive seeds; fit the standardizer on train
/// only; select theta if AUTO; hash train into a database; classify test by
/// Hamming KNN; accuracy = fraction of test sequences whose predicted label
/// matches. Deterministic for fixed (data, cfg): runs may execute on a
/// thread pool but are aggregated by run index.
EvalReport run_experiment(const Dataset& data, const ExperimentConfig& cfg);

/// run_experiment once per value along one axis, sharing the master seed so
/// reports differ only in the swept parameter.
enum class SweepAxis : std::uint8_t { k, p, theta };
SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

std::vector<EvalReport> sweep(const Dataset& data, const ExperimentConfig& cfg,
                              SweepAxis axis, const std::vector<Real>& values);

}  // namespace fta
