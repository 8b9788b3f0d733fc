#include "fodgmm/transform.hpp"

#include "fodgmm/error.hpp"

#include <cmath>
#include <string>

namespace fodgmm {

namespace {

void require_periods(Index T) {
  if (T < 2) {
    throw Error(ErrorCode::TooFewPeriods,
                "transform needs at least 2 periods, have " + std::to_string(T));
  }
}

}  // namespace

Eigen::VectorXd fod_scale(Index T) {
  require_periods(T);
  Eigen::VectorXd c(T - 1);
  for (Index t = 1; t < T; ++t) {
    const double ahead = static_cast<double>(T - t);
    c(t - 1) = std::sqrt(ahead / (ahead + 1.0));
  }
  return c;
}

Eigen::MatrixXd fod(const Eigen::Ref<const Eigen::MatrixXd>& series) {
  const Index T = series.cols();
  require_periods(T);
  const Eigen::VectorXd c = fod_scale(T);
  Eigen::MatrixXd out(series.rows(), T - 1);
  // future holds the sum of columns j+1..T-1 while column j is processed.
  Eigen::VectorXd future = series.col(T - 1);
  for (Index j = T - 2; j >= 0; --j) {
    const double ahead = static_cast<double>(T - 1 - j);
    out.col(j) = c(j) * (series.col(j) - future / ahead);
    future += series.col(j);
  }
  return out;
}

Eigen::VectorXd fod_vector(const Eigen::Ref<const Eigen::VectorXd>& series) {
  Eigen::MatrixXd row = series.transpose();
  return fod(row).transpose();
}

FodPanel fod(const PanelDataset& p) {
  FodPanel out;
  out.T = p.periods();
  out.c = fod_scale(out.T);
  out.y = fod(p.y());
  out.x.reserve(p.xs().size());
  for (const auto& xk : p.xs()) out.x.push_back(fod(xk));
  return out;
}

Eigen::MatrixXd build_fod_matrix(Index T) {
  require_periods(T);
  const Eigen::VectorXd c = fod_scale(T);
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(T - 1, T);
  for (Index t = 1; t < T; ++t) {
    const double ahead = static_cast<double>(T - t);
    F(t - 1, t - 1) = c(t - 1);
    for (Index s = t; s < T; ++s) F(t - 1, s) = -c(t - 1) / ahead;
  }
  return F;
}

Eigen::MatrixXd fd(const Eigen::Ref<const Eigen::MatrixXd>& series) {
  const Index T = series.cols();
  require_periods(T);
  return series.rightCols(T - 1) - series.leftCols(T - 1);
}

Eigen::VectorXd fd_vector(const Eigen::Ref<const Eigen::VectorXd>& series) {
  const Index T = series.size();
  require_periods(T);
  return series.tail(T - 1) - series.head(T - 1);
}

FdPanel fd(const PanelDataset& p) {
  FdPanel out;
  out.T = p.periods();
  out.y = fd(p.y());
  out.x.reserve(p.xs().size());
  for (const auto& xk : p.xs()) out.x.push_back(fd(xk));
  return out;
}

Eigen::MatrixXd build_fd_matrix(Index T) {
  require_periods(T);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(T - 1, T);
  for (Index t = 0; t + 1 < T; ++t) {
    D(t, t) = -1.0;
    D(t, t + 1) = 1.0;
  }
  return D;
}

Eigen::MatrixXd fd_error_covariance(Index m) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  for (Index t = 0; t < m; ++t) {
    G(t, t) = 2.0;
    if (t + 1 < m) {
      G(t, t + 1) = -1.0;
      G(t + 1, t) = -1.0;
    }
  }
  return G;
}

}  // namespace fodgmm
