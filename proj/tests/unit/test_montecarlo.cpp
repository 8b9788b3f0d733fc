#include "fodgmm/error.hpp"
#include "fodgmm/montecarlo.hpp"
#include "fodgmm/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace fodgmm;

namespace {

ExperimentSpec small_spec(std::vector<int> ids, Index n, Index T, Index reps) {
  ExperimentSpec spec;
  for (int id : ids) spec.designs.push_back(catalog_design(id, n, T));
  spec.estimators = {{EstimatorTag::FOD, InstrumentPlan::limited()},
                     {EstimatorTag::FD, InstrumentPlan::limited()},
                     {EstimatorTag::Efficient, InstrumentPlan::all_available()}};
  spec.reps = reps;
  spec.seed = 7;
  spec.threads = 1;
  return spec;
}

std::string csv(const McSummary& s) {
  std::ostringstream out;
  write_summary_csv(s, out);
  return out.str();
}

}  // namespace

TEST(MonteCarlo, SpecValidation) {
  ExperimentSpec spec = small_spec({5}, 50, 6, 0);
  EXPECT_THROW(spec.validate(), Error);
  EXPECT_THROW(run(spec), Error);
  spec.reps = 2;
  spec.levels = {0.95, 1.0};
  EXPECT_THROW(spec.validate(), Error);
  spec.levels = {0.95};
  EXPECT_NO_THROW(spec.validate());
}

TEST(MonteCarlo, NoiseFreeCellIsExact) {
  ExperimentSpec spec = small_spec({5, 14}, 40, 6, 1);
  for (DesignConfig& d : spec.designs) d.sigma_v = 0.0;
  const McSummary s = run(spec);
  for (const CellSummary& cell : s.cells) {
    ASSERT_FALSE(cell.infeasible);
    if (cell.estimator.tag == EstimatorTag::Efficient) {
      // Without errors the full lag set is collinear given the fixed effect.
      EXPECT_EQ(cell.failures, 1);
      continue;
    }
    EXPECT_EQ(cell.failures, 0);
    for (const CoefficientSummary& c : cell.coefficients) {
      EXPECT_LT(c.rmse, 1e-10) << to_string(cell.estimator.tag);
      EXPECT_EQ(c.coverage, std::vector<double>(3, 1.0));
    }
  }
}

TEST(MonteCarlo, SummaryIdentities) {
  const McSummary s = run(small_spec({5, 21}, 60, 6, 40));
  ASSERT_EQ(s.cells.size(), 6u);
  for (const CellSummary& cell : s.cells) {
    EXPECT_EQ(cell.reps, 40);
    for (const CoefficientSummary& c : cell.coefficients) {
      EXPECT_NEAR(c.rmse * c.rmse, c.bias * c.bias + c.variance, 1e-10);
      EXPECT_NEAR(c.bias, c.mean - c.truth, 1e-15);
      ASSERT_EQ(c.coverage.size(), 3u);
      for (std::size_t l = 0; l < 3; ++l) {
        const double p = c.coverage[l];
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        EXPECT_DOUBLE_EQ(c.coverage_mc_se[l], std::sqrt(p * (1.0 - p) / 40.0));
        // Exact fraction of 40 replications.
        EXPECT_NEAR(p * 40.0, std::round(p * 40.0), 1e-9);
      }
      // Wider intervals cover at least as often.
      EXPECT_GE(c.coverage[0], c.coverage[1]);
      EXPECT_GE(c.coverage[1], c.coverage[2]);
      EXPECT_NEAR(c.mean_scaled_dev, std::sqrt(60.0 * 6.0) * c.bias, 1e-9);
    }
  }
  EXPECT_NE(s.find(21, EstimatorTag::FD, 6), nullptr);
  EXPECT_EQ(s.find(22, EstimatorTag::FD, 6), nullptr);
  // Diagnostics draws reproduce the scaled deviations for FOD-type estimators.
  for (EstimatorTag tag : {EstimatorTag::FOD, EstimatorTag::Efficient}) {
    const CellSummary* cell = s.find(5, tag, 6);
    ASSERT_NE(cell, nullptr);
    for (const CoefficientSummary& c : cell->coefficients) {
      ASSERT_TRUE(c.mean_theta.has_value());
      EXPECT_NEAR(*c.mean_theta, c.mean_scaled_dev, 1e-8);
    }
  }
  EXPECT_FALSE(s.find(5, EstimatorTag::FD, 6)->coefficients[0].mean_theta.has_value());
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  ExperimentSpec spec = small_spec({10, 27}, 80, 8, 24);
  const std::string one = csv(run(spec));
  spec.threads = 4;
  EXPECT_EQ(csv(run(spec)), one);
  spec.threads = 3;
  spec.seed = 8;
  EXPECT_NE(csv(run(spec)), one);
}

TEST(MonteCarlo, FodAndFdAllInstrumentsAgree) {
  ExperimentSpec spec = small_spec({9, 30}, 50, 6, 30);
  spec.estimators = {{EstimatorTag::FOD, InstrumentPlan::all_available()},
                     {EstimatorTag::FD, InstrumentPlan::all_available()}};
  const McSummary s = run(spec);
  for (int id : {9, 30}) {
    const CellSummary* a = s.find(id, EstimatorTag::FOD, 6);
    const CellSummary* b = s.find(id, EstimatorTag::FD, 6);
    ASSERT_TRUE(a && b);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(a->coefficients[k].mean, b->coefficients[k].mean,
                  1e-8 * std::abs(a->coefficients[k].mean));
      EXPECT_NEAR(a->coefficients[k].rmse, b->coefficients[k].rmse,
                  1e-8 * a->coefficients[k].rmse);
      // The two residual variance estimators differ, so an interval on the
      // boundary can flip.
      for (std::size_t l = 0; l < 3; ++l) {
        EXPECT_LE(std::abs(a->coefficients[k].coverage[l] - b->coefficients[k].coverage[l]),
                  2.0 / 30.0 + 1e-12);
      }
    }
  }
}

TEST(MonteCarlo, InfeasibleCellsAreMarked) {
  ExperimentSpec spec = small_spec({5}, 30, 20, 3);
  const McSummary s = run(spec);
  const CellSummary* eff = s.find(5, EstimatorTag::Efficient, 20);
  ASSERT_NE(eff, nullptr);
  EXPECT_TRUE(eff->infeasible);
  EXPECT_EQ(eff->q_star, 39);
  EXPECT_FALSE(eff->note.empty());
  EXPECT_FALSE(s.find(5, EstimatorTag::FOD, 20)->infeasible);
  const std::string text = csv(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), kSummaryCsvHeader);
  EXPECT_NE(text.find("5,Efficient,20,30,NA,0.95,NA,NA,NA,NA,NA,NA\n"), std::string::npos);
}

TEST(MonteCarlo, RelativePrecision) {
  const McSummary s = run(small_spec({5}, 60, 6, 20));
  const auto rows = relative_precision(s);
  ASSERT_EQ(rows.size(), 6u);  // three estimators, two coefficients
  for (const RatioRow& r : rows) {
    const double expect = s.find(5, r.tag, 6)->coefficients[static_cast<std::size_t>(r.coefficient)].rmse /
                          s.find(5, EstimatorTag::Efficient, 6)
                              ->coefficients[static_cast<std::size_t>(r.coefficient)]
                              .rmse;
    EXPECT_DOUBLE_EQ(r.ratio, expect);
  }
  for (const RatioRow& r : rows) {
    if (r.tag == EstimatorTag::Efficient) {
      EXPECT_EQ(r.ratio, 1.0);
    }
  }
  for (const RatioRow& r : relative_precision(s, EstimatorTag::FOD)) {
    if (r.tag == EstimatorTag::FOD) {
      EXPECT_EQ(r.ratio, 1.0);
    }
  }

  ExperimentSpec no_base = small_spec({5}, 60, 6, 5);
  no_base.estimators.pop_back();
  try {
    relative_precision(run(no_base));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingBaseline);
  }
}

TEST(MonteCarlo, CellSeedsDiffer) {
  const DesignConfig a = catalog_design(5, 200, 20);
  const DesignConfig b = catalog_design(5, 200, 40);
  const DesignConfig c = catalog_design(6, 200, 20);
  EXPECT_NE(cell_seed(1, a, 0), cell_seed(1, b, 0));
  EXPECT_NE(cell_seed(1, a, 0), cell_seed(1, c, 0));
  EXPECT_NE(cell_seed(1, a, 0), cell_seed(2, a, 0));
  EXPECT_EQ(cell_seed(1, a, 0), cell_seed(1, a, 3));  // position only matters without an id
}

TEST(MonteCarlo, LayoutTruth) {
  DesignConfig cfg = catalog_design(27);
  EXPECT_EQ(layout_truth(cfg, ModelLayout()), Eigen::Vector2d(0.75, 0.25));
  EXPECT_EQ(layout_truth(cfg, ModelLayout::autoregressive(2)), Eigen::Vector2d(0.75, 0.0));
}

TEST(MonteCarlo, ThetaSweep) {
  DesignConfig base = catalog_design(5);
  base.beta2 = 0.0;
  const auto rows =
      theta_sweep(base, {0.0, 1.0}, {40, 8}, {10}, 20, 3, 1, ModelLayout::autoregressive(1));
  ASSERT_EQ(rows.size(), 4u);
  std::size_t infeasible = 0;
  for (const SweepRow& r : rows) {
    if (r.infeasible) {
      ++infeasible;
      EXPECT_EQ(r.alpha, 1.0);
      EXPECT_EQ(r.n, 8);
      continue;
    }
    EXPECT_EQ(r.reps, 20);
    ASSERT_EQ(r.mean_scaled_dev.size(), 1u);
    EXPECT_GT(r.mc_se[0], 0.0);
  }
  EXPECT_EQ(infeasible, 1u);
  EXPECT_THROW(theta_sweep(base, {0.0}, {40}, {10}, 0), Error);
}
