#pragma once

#include "fodgmm/instruments.hpp"
#include "fodgmm/layout.hpp"
#include "fodgmm/panel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

namespace fodgmm {

struct SimulatedPanel;

enum class EstimatorTag { FOD, FD, Efficient };

std::string_view to_string(EstimatorTag tag);
std::optional<EstimatorTag> parse_estimator(std::string_view text);

struct GmmFit {
  Eigen::VectorXd beta_hat;
  /// Estimated variance of beta_hat itself (not of sqrt(nT) * beta_hat).
  Eigen::MatrixXd vcov;
  Eigen::VectorXd se;
  double sigma2_hat = 0.0;
  EstimatorTag tag = EstimatorTag::FOD;
  Index q_star = 0;
  Index n = 0;
  /// Equation periods; the number of transformed equations is T - 1.
  Index T = 0;
  /// The K x K matrix whose inverse, times sigma2_hat, is vcov. For FOD this
  /// is sum_t X_t' P_t X_t.
  Eigen::MatrixXd information;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

/// Finite-sample pieces of sqrt(nT)(beta_hat - beta) = A^{-1} b. Needs the
/// true errors, so only simulated panels qualify.
struct BiasDiagnostics {
  Eigen::MatrixXd A_nT;
  Eigen::VectorXd b_nT;
  Eigen::VectorXd theta_nT;
};

/// One-step GMM after forward orthogonal deviations, accumulated period by
/// period:
///   beta_hat = (sum_t X_t' P_t X_t)^{-1} sum_t X_t' P_t y_t
/// with sigma2_hat = sum_t |y_t - X_t beta_hat|^2 / (n (T-1)).
GmmFit fit_fod(const PanelDataset& p, const InstrumentPlan& plan,
               const ModelLayout& layout = ModelLayout());
GmmFit fit_fod(const PanelDataset& p, const InstrumentMatrices& instruments,
               const ModelLayout& layout = ModelLayout());

/// One-step GMM after first differences with weight (sum_i Z_i' G Z_i)^{-1}.
/// The weight is block tridiagonal in the per-period instrument blocks and is
/// factored blockwise; sigma2_tilde uses the divisor 2 n (T-1).
GmmFit fit_fd(const PanelDataset& p, const InstrumentPlan& plan,
              const ModelLayout& layout = ModelLayout());
GmmFit fit_fd(const PanelDataset& p, const InstrumentMatrices& instruments,
              const ModelLayout& layout = ModelLayout());

/// FOD GMM with every available instrument. Throws InfeasiblePlan when some
/// q_t exceeds n.
GmmFit fit_efficient(const PanelDataset& p, const ModelLayout& layout = ModelLayout());
GmmFit fit_efficient(const PanelDataset& p, const InstrumentMatrices& all_available,
                     const ModelLayout& layout = ModelLayout());

/// beta_k -/+ z * se_k with z the normal quantile at (1 + level) / 2.
std::vector<Interval> confidence_interval(const GmmFit& fit, double level);

/// `errors` is n x T_obs, aligned with the panel's observed periods.
BiasDiagnostics bias_diagnostics(const PanelDataset& p,
                                 const Eigen::Ref<const Eigen::MatrixXd>& errors,
                                 const InstrumentMatrices& instruments,
                                 const ModelLayout& layout = ModelLayout());
BiasDiagnostics bias_diagnostics(const SimulatedPanel& sim, const InstrumentPlan& plan,
                                 const ModelLayout& layout = ModelLayout());

}  // namespace fodgmm
