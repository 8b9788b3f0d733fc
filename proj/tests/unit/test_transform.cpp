#include "fodgmm/error.hpp"
#include "fodgmm/transform.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace fodgmm;

TEST(Transform, FodMatrixIsSemiOrthogonalAndAnnihilatesConstants) {
  for (Index T = 2; T <= 50; ++T) {
    const Eigen::MatrixXd F = build_fod_matrix(T);
    EXPECT_LT((F * F.transpose() - Eigen::MatrixXd::Identity(T - 1, T - 1)).cwiseAbs().maxCoeff(),
              1e-12)
        << "T = " << T;
    EXPECT_LT((F * Eigen::VectorXd::Ones(T)).cwiseAbs().maxCoeff(), 1e-12) << "T = " << T;
  }
}

TEST(Transform, RecursiveFodMatchesDefinitionAndMatrix) {
  const Eigen::MatrixXd W = Eigen::MatrixXd::Random(7, 12);
  const Eigen::MatrixXd fast = fod(W);
  const Eigen::MatrixXd dense = W * build_fod_matrix(12).transpose();
  EXPECT_LT((fast - dense).cwiseAbs().maxCoeff(), 1e-13);
  for (Index i = 0; i < W.rows(); ++i) {
    const Eigen::VectorXd ref = oracle::fod_by_definition(W.row(i).transpose());
    EXPECT_LT((fast.row(i).transpose() - ref).cwiseAbs().maxCoeff(), 1e-13);
  }
  const Eigen::VectorXd v = W.row(0).transpose();
  EXPECT_LT((fod_vector(v) - fast.row(0).transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transform, FodScale) {
  const Eigen::VectorXd c = fod_scale(4);
  ASSERT_EQ(c.size(), 3);
  EXPECT_DOUBLE_EQ(c(0), std::sqrt(3.0 / 4.0));
  EXPECT_DOUBLE_EQ(c(2), std::sqrt(1.0 / 2.0));
}

TEST(Transform, DifferenceMatrixReproducesG) {
  for (Index T = 2; T <= 50; ++T) {
    const Eigen::MatrixXd D = build_fd_matrix(T);
    EXPECT_LT((D * D.transpose() - fd_error_covariance(T - 1)).cwiseAbs().maxCoeff(), 1e-12);
  }
  Eigen::MatrixXd G3(3, 3);
  G3 << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_EQ(fd_error_covariance(3), G3);
}

TEST(Transform, DifferencesAndPanelForms) {
  const PanelDataset p = oracle::random_panel(5, 6, 3);
  const FdPanel d = fd(p);
  EXPECT_EQ(d.equations(), 5);
  EXPECT_DOUBLE_EQ(d.y(2, 0), p.y(2, 1) - p.y(2, 0));
  const FodPanel f = fod(p);
  EXPECT_EQ(f.y.cols(), 5);
  EXPECT_EQ(f.x[0], fod(p.x(0)));
  EXPECT_DOUBLE_EQ(fd_vector(Eigen::Vector3d(1, 4, 9))(1), 5.0);
}

TEST(Transform, FodRemovesFixedEffects) {
  Eigen::MatrixXd W = Eigen::MatrixXd::Random(4, 9);
  const Eigen::MatrixXd shifted = W.colwise() + Eigen::Vector4d(1, -2, 3, 100);
  EXPECT_LT((fod(shifted) - fod(W)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transform, TooFewPeriods) {
  try {
    fod(Eigen::MatrixXd::Zero(3, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewPeriods);
  }
  EXPECT_THROW(fd(Eigen::MatrixXd::Zero(3, 1)), Error);
}
