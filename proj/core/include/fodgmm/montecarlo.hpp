#pragma once

#include "fodgmm/dgp.hpp"
#include "fodgmm/estimator.hpp"
#include "fodgmm/instruments.hpp"
#include "fodgmm/layout.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fodgmm {

struct EstimatorSpec {
  EstimatorTag tag = EstimatorTag::FOD;
  /// Ignored for Efficient, which always uses every available instrument.
  InstrumentPlan plan;

  bool operator==(const EstimatorSpec&) const = default;
};

struct ExperimentSpec {
  std::vector<DesignConfig> designs;
  std::vector<EstimatorSpec> estimators;
  ModelLayout layout;
  Index reps = 1000;
  std::vector<double> levels{0.95, 0.90, 0.50};
  std::uint64_t seed = 20240601;
  /// 0 means one worker per hardware thread.
  unsigned threads = 0;
  /// Also record A^{-1} b draws from the true errors (FOD-type estimators).
  bool diagnostics = true;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

/// The coefficient vector the layout estimates under a given design: y(-1)
/// maps to beta1, x1 to beta2 and anything else to zero.
Eigen::VectorXd layout_truth(const DesignConfig& cfg, const ModelLayout& layout);

/// Seed for all replications of one design cell, mixed from the master seed,
/// the design id (or position) and the sample size.
std::uint64_t cell_seed(std::uint64_t master, const DesignConfig& cfg, std::size_t position);

struct CoefficientSummary {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double rmse = 0.0;
  double mean_mc_se = 0.0;
  /// Mean of sqrt(nT)(beta_hat - beta) and its MC standard error.
  double mean_scaled_dev = 0.0;
  double scaled_dev_mc_se = 0.0;
  /// Mean of the A^{-1} b draws, when recorded.
  std::optional<double> mean_theta;
  std::optional<double> theta_mc_se;
  /// Indexed like McSummary::levels.
  std::vector<double> coverage;
  std::vector<double> coverage_mc_se;
};

struct CellSummary {
  /// Design id, or 1-based position when the design has none.
  int design = 0;
  DesignConfig config;
  EstimatorSpec estimator;
  Index n = 0;
  Index T = 0;
  Index reps = 0;
  Index failures = 0;
  Index q_star = 0;
  bool infeasible = false;
  std::string note;
  std::vector<CoefficientSummary> coefficients;

  Index effective_reps() const noexcept { return reps - failures; }
};

struct McSummary {
  std::vector<double> levels;
  std::vector<CellSummary> cells;

  const CellSummary* find(int design, EstimatorTag tag, Index T) const;
};

McSummary run(const ExperimentSpec& spec);

struct RatioRow {
  int design = 0;
  EstimatorTag tag = EstimatorTag::FOD;
  Index n = 0;
  Index T = 0;
  Index coefficient = 0;
  double ratio = 0.0;
};

/// rmse(estimator) / rmse(baseline) for every cell whose (design, n, T) also
/// has a feasible baseline cell. Throws MissingBaseline when none does.
std::vector<RatioRow> relative_precision(const McSummary& summary,
                                         EstimatorTag baseline = EstimatorTag::Efficient);

struct SweepRow {
  double alpha = 0.0;
  Index n = 0;
  Index T = 0;
  Index reps = 0;
  Index failures = 0;
  Index q_star = 0;
  bool infeasible = false;
  std::vector<double> mean_scaled_dev;
  std::vector<double> mc_se;
};

/// Mean of sqrt(nT)(beta_hat - beta) for FOD with power-law plans over an
/// (alpha, n, T) grid. Infeasible grid points are reported and skipped.
std::vector<SweepRow> theta_sweep(const DesignConfig& base, const std::vector<double>& alphas,
                                  const std::vector<Index>& n_grid,
                                  const std::vector<Index>& T_grid, Index reps,
                                  std::uint64_t seed = 20240601, unsigned threads = 0,
                                  const ModelLayout& layout = ModelLayout(), int base_count = 5);

}  // namespace fodgmm
