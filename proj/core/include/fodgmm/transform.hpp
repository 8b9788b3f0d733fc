#pragma once

#include "fodgmm/panel.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fodgmm {

/// Forward-orthogonal-deviation transform of a panel observed over T periods.
/// Column j (0-based) holds transformed equation t = j + 1.
struct FodPanel {
  Eigen::MatrixXd y;               // n x (T-1)
  std::vector<Eigen::MatrixXd> x;  // K matrices, n x (T-1)
  Eigen::VectorXd c;               // c_t = sqrt((T-t)/(T-t+1)), t = 1..T-1
  Index T = 0;
};

/// First-difference transform: column j holds period j+1 minus period j.
/// The error covariance of the differenced equations is sigma^2 * G with
/// G = fd_error_covariance(T - 1).
struct FdPanel {
  Eigen::MatrixXd y;
  std::vector<Eigen::MatrixXd> x;
  Index T = 0;

  Index equations() const noexcept { return T - 1; }
};

/// Scale factors c_t for t = 1..T-1.
Eigen::VectorXd fod_scale(Index T);

/// Rows are units, columns are consecutive periods. Uses running sums over
/// future periods, O(nT).
Eigen::MatrixXd fod(const Eigen::Ref<const Eigen::MatrixXd>& series);
Eigen::VectorXd fod_vector(const Eigen::Ref<const Eigen::VectorXd>& series);
FodPanel fod(const PanelDataset& p);

/// Dense (T-1) x T forward-orthogonal-deviation operator. Only used to check
/// the recursive transform.
Eigen::MatrixXd build_fod_matrix(Index T);

Eigen::MatrixXd fd(const Eigen::Ref<const Eigen::MatrixXd>& series);
Eigen::VectorXd fd_vector(const Eigen::Ref<const Eigen::VectorXd>& series);
FdPanel fd(const PanelDataset& p);

/// Dense (T-1) x T first-difference operator.
Eigen::MatrixXd build_fd_matrix(Index T);

/// The m x m tridiagonal matrix with 2 on the diagonal and -1 beside it.
Eigen::MatrixXd fd_error_covariance(Index m);

}  // namespace fodgmm
