#include "fodgmm/dgp.hpp"
#include "fodgmm/error.hpp"
#include "fodgmm/rng.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace fodgmm;

TEST(Designs, GridMatchesCatalog) {
  const auto all = design_catalog();
  ASSERT_EQ(all.size(), 36u);
  const DesignConfig d5 = catalog_design(5);
  EXPECT_EQ(d5.beta1, 0.25);
  EXPECT_EQ(d5.beta2, 0.75);
  EXPECT_EQ(d5.rho, 0.5);
  EXPECT_EQ(d5.phi1, 0.0);
  EXPECT_EQ(d5.kappa1, 0.0);
  const DesignConfig d27 = catalog_design(27);
  EXPECT_EQ(d27.beta1, 0.75);
  EXPECT_EQ(d27.rho, 0.5);
  EXPECT_EQ(d27.phi1, 1.0);
  EXPECT_EQ(d27.kappa1, 1.0);
  const DesignConfig d10 = catalog_design(10);
  EXPECT_EQ(d10.rho, 0.95);
  EXPECT_EQ(d10.phi1, -1.0);
  EXPECT_EQ(d10.kappa1, -1.0);
  for (int id = 1; id <= 36; ++id) {
    const DesignConfig& d = all[static_cast<std::size_t>(id - 1)];
    EXPECT_EQ(d.design_id, id);
    EXPECT_DOUBLE_EQ(d.beta1 + d.beta2, 1.0);
  }
  EXPECT_THROW(catalog_design(37), Error);
  EXPECT_THROW(catalog_design(0), Error);

  std::ostringstream out;
  write_design_catalog(out);
  EXPECT_NE(out.str().find("27,0.75,0.25,0.5,1,1\n"), std::string::npos);
}

TEST(Designs, Validation) {
  DesignConfig cfg;
  cfg.beta1 = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = DesignConfig();
  cfg.rho = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = DesignConfig();
  cfg.T = 1;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Generate, ShapesAndDeterminism) {
  const DesignConfig cfg = catalog_design(5, 200, 20);
  const SimulatedPanel a = generate(cfg, 42);
  const SimulatedPanel b = generate(cfg, 42);
  EXPECT_EQ(a.panel.n(), 200);
  EXPECT_EQ(a.panel.periods(), 21);
  EXPECT_EQ(a.v.cols(), 71);
  EXPECT_TRUE(a.panel == b.panel);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.eta, b.eta);
  EXPECT_TRUE(a.v.allFinite());
  const SimulatedPanel c = generate(cfg, 42, 1);
  EXPECT_FALSE(a.panel == c.panel);
  const SimulatedPanel d = generate(cfg, 43);
  EXPECT_FALSE(a.panel == d.panel);
}

TEST(Generate, ZeroInputsGiveZeroOutcome) {
  DesignConfig cfg = catalog_design(5, 20, 10);
  cfg.beta2 = 0.0;
  cfg.sigma_v = 0.0;
  cfg.sigma_eta = 0.0;
  const SimulatedPanel sim = generate(cfg, 1);
  EXPECT_EQ(sim.panel.y(), Eigen::MatrixXd::Zero(20, 11));
}

TEST(Generate, ReproducesRecursionFromStoredErrors) {
  // Rebuild y from x, eta and v with the model equation itself.
  const DesignConfig cfg = catalog_design(32, 10, 6);
  const SimulatedPanel sim = generate(cfg, 8);
  const Eigen::MatrixXd v = sim.observed_errors();
  for (Index i = 0; i < 10; ++i) {
    for (Index t = 1; t <= 6; ++t) {
      const double rhs = cfg.beta1 * sim.panel.y(i, t - 1) + cfg.beta2 * sim.panel.x(i, t, 0) +
                         sim.eta(i) + v(i, t);
      EXPECT_NEAR(sim.panel.y(i, t), rhs, 1e-12);
    }
  }
}

TEST(Generate, PredeterminedRegressorLoadsOnLaggedError) {
  // x(t) - rho x(t-1) = (1-rho) kappa eta + eps(t) + phi (v(t-1) - rho v(t-2))
  DesignConfig cfg = catalog_design(9, 5, 6);  // rho 0.5, phi 1, kappa 1
  const SimulatedPanel sim = generate(cfg, 3);
  const SimulatedPanel quiet = [&] {
    DesignConfig c = cfg;
    c.phi1 = 0.0;
    return generate(c, 3);
  }();
  const Eigen::MatrixXd v = sim.v.rightCols(8);  // dates -1..6
  for (Index i = 0; i < 5; ++i) {
    for (Index t = 0; t <= 6; ++t) {
      EXPECT_NEAR(sim.panel.x(i, t, 0) - quiet.panel.x(i, t, 0), v(i, t), 1e-12);
    }
  }
  DesignConfig filtered = cfg;
  filtered.filtered_phi = true;
  const SimulatedPanel f = generate(filtered, 3);
  EXPECT_FALSE(f.panel.x(0) == sim.panel.x(0));
  EXPECT_EQ(f.v, sim.v);
}

TEST(Generate, StationaryRegressorVariance) {
  for (double rho : {0.5, 0.95}) {
    DesignConfig cfg = catalog_design(rho == 0.5 ? 5 : 14, 4000, 2);
    const SimulatedPanel sim = generate(cfg, 77);
    const Eigen::VectorXd x0 = sim.panel.x(0).col(2);
    const double mean = x0.mean();
    const double var = (x0.array() - mean).square().mean();
    const double target = 1.0 / (1.0 - rho * rho);
    // var(x^2) = kurtosis-based; use a generous 3 sigma with kurtosis <= 3.
    const double se = target * std::sqrt(2.0 / 4000.0);
    EXPECT_NEAR(var, target, 3.0 * se + 0.01 * target) << "rho = " << rho;
  }
}

TEST(ArTools, GeometricWeights) {
  const ArPolynomial ar{{0.5}, 1.0};
  const Eigen::VectorXd psi = moment_weights(ar, 10);
  for (Index j = 0; j <= 10; ++j) EXPECT_DOUBLE_EQ(psi(j), std::pow(0.5, static_cast<double>(j)));
  EXPECT_DOUBLE_EQ(conditional_cov_oracle(ar, 1), 1.0);
  EXPECT_DOUBLE_EQ(conditional_cov_oracle(ar, 3), 0.25);
  EXPECT_DOUBLE_EQ(implied_mean(ar, 2.0), 4.0);
}

TEST(ArTools, Ar2MatchesLongDivision) {
  const ArPolynomial ar{{0.5, 0.24}, 2.0};
  const Eigen::VectorXd psi = moment_weights(ar, 20);
  const auto ref = oracle::long_division({0.5, 0.24}, 21);
  EXPECT_DOUBLE_EQ(psi(1), 0.5);
  EXPECT_DOUBLE_EQ(psi(2), 0.49);
  EXPECT_DOUBLE_EQ(psi(3), 0.365);
  for (Index j = 0; j <= 20; ++j) EXPECT_NEAR(psi(j), ref[static_cast<std::size_t>(j)], 1e-14);
  EXPECT_DOUBLE_EQ(conditional_cov_oracle(ar, 3), 2.0 * 0.49);
}

TEST(ArTools, NonStationary) {
  try {
    moment_weights({{1.0}, 1.0}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonStationary);
  }
  EXPECT_FALSE((ArPolynomial{{0.6, 0.5}, 1.0}).is_stationary());
  EXPECT_TRUE((ArPolynomial{{0.5, 0.24}, 1.0}).is_stationary());
  EXPECT_THROW(conditional_cov_oracle({{1.2}, 1.0}, 1), Error);
}

TEST(ArTools, PartialSumsBoundedAndConverging) {
  for (const ArPolynomial& ar : {ArPolynomial{{0.5, 0.24}, 1.0}, ArPolynomial{{-0.7}, 2.0},
                                 ArPolynomial{{1.2, -0.5}, 1.0}}) {
    const Eigen::VectorXd psi = moment_weights(ar, 400);
    const double total = psi.cwiseAbs().sum();
    double partial = 0.0;
    for (Index s = 0; s <= 400; ++s) {
      partial += ar.sigma2 * psi(s);
      EXPECT_LE(std::abs(partial), ar.sigma2 * total + 1e-12);
    }
    EXPECT_LT(psi.tail(200).cwiseAbs().sum(), 1e-8);
  }
}
