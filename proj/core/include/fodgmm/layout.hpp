#pragma once

#include "fodgmm/panel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fodgmm {

enum class Variable { Y, X };

/// A variable observed `lag` periods before the current equation's period.
/// For Variable::X, `column` selects the regressor column of the panel.
struct Term {
  Variable var = Variable::Y;
  Index column = 0;
  int lag = 0;

  bool operator==(const Term&) const = default;
};

/// Which lags of y and which x columns enter the regression. The default
/// layout regresses y(t) on y(t-1) and x1(t).
class ModelLayout {
 public:
  ModelLayout();
  explicit ModelLayout(std::vector<Term> regressors);

  /// (y(t-1), x1(t)): one lag of y plus one predetermined regressor.
  static ModelLayout lag_plus_regressor();
  /// (y(t-1), ..., y(t-p)) with no x terms.
  static ModelLayout autoregressive(int order);

  const std::vector<Term>& regressors() const noexcept { return regressors_; }
  Index size() const noexcept { return static_cast<Index>(regressors_.size()); }

  /// First observed period that can serve as an equation (the largest lag).
  int first_period() const noexcept { return first_period_; }

  /// X columns that appear among the regressors, ascending.
  std::vector<Index> x_columns() const;

  std::string term_name(Index j) const;

  /// Throws Error(InvalidConfig) when the panel lacks a referenced x column
  /// or TooFewPeriods when fewer than two equation periods remain.
  void check(const PanelDataset& p) const;

  bool operator==(const ModelLayout&) const = default;

 private:
  std::vector<Term> regressors_;
  int first_period_ = 0;
};

/// Outcome and regressors restricted to equation periods
/// first_period()..T_obs-1, each an n x Tm matrix.
struct ModelSeries {
  Eigen::MatrixXd y;
  std::vector<Eigen::MatrixXd> x;
  int first_period = 0;

  Index model_periods() const noexcept { return y.cols(); }
};

ModelSeries model_series(const PanelDataset& p, const ModelLayout& layout);

/// Same column window applied to an arbitrary n x T_obs matrix (used for
/// the simulated errors).
Eigen::MatrixXd equation_window(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                const ModelLayout& layout);

}  // namespace fodgmm
