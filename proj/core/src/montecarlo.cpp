#include "fodgmm/montecarlo.hpp"

#include "fodgmm/error.hpp"
#include "fodgmm/normal.hpp"
#include "fodgmm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace fodgmm {

namespace {

/// Estimates within this distance of an interval end count as covered, so
/// the degenerate intervals of an error-free design still contain the truth
/// despite rounding.
constexpr double kContainmentSlack = 1e-10;

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Draw {
  bool ok = false;
  Eigen::VectorXd beta;
  Eigen::VectorXd scaled;
  Eigen::VectorXd theta;
  /// hits[level * K + k]
  std::vector<unsigned char> hits;
};

InstrumentPlan effective_plan(const EstimatorSpec& e) {
  return e.tag == EstimatorTag::Efficient ? InstrumentPlan::all_available() : e.plan;
}

int design_number(const DesignConfig& cfg, std::size_t position) {
  return cfg.design_id ? *cfg.design_id : static_cast<int>(position) + 1;
}

struct MeanSe {
  double mean = 0.0;
  double variance = 0.0;
  double se = 0.0;
};

/// Population mean and variance in replication order.
MeanSe mean_and_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const double m = static_cast<double>(xs.size());
  CompensatedSum s;
  for (double x : xs) s.add(x);
  out.mean = s.value() / m;
  CompensatedSum dev;
  for (double x : xs) dev.add((x - out.mean) * (x - out.mean));
  out.variance = dev.value() / m;
  out.se = std::sqrt(out.variance / m);
  return out;
}

void run_parallel(Index count, unsigned threads, const std::function<void(Index)>& body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<Index>(workers, std::max<Index>(count, 1)));
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (Index r = next++; r < count; r = next++) {
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (reps < 1) fail("reps must be at least 1");
  if (designs.empty()) fail("no designs selected");
  if (estimators.empty()) fail("no estimators selected");
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) fail("confidence levels must lie in (0, 1)");
  }
  for (const auto& d : designs) d.validate();
}

Eigen::VectorXd layout_truth(const DesignConfig& cfg, const ModelLayout& layout) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(layout.size());
  for (Index j = 0; j < layout.size(); ++j) {
    const Term& term = layout.regressors()[static_cast<std::size_t>(j)];
    if (term.var == Variable::Y && term.lag == 1) beta(j) = cfg.beta1;
    if (term.var == Variable::X && term.column == 0 && term.lag == 0) beta(j) = cfg.beta2;
  }
  return beta;
}

std::uint64_t cell_seed(std::uint64_t master, const DesignConfig& cfg, std::size_t position) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(design_number(cfg, position)));
  h = mix64(h ^ static_cast<std::uint64_t>(cfg.n));
  return mix64(h ^ static_cast<std::uint64_t>(cfg.T));
}

const CellSummary* McSummary::find(int design, EstimatorTag tag, Index T) const {
  for (const auto& c : cells) {
    if (c.design == design && c.estimator.tag == tag && c.T == T) return &c;
  }
  return nullptr;
}

McSummary run(const ExperimentSpec& spec) {
  spec.validate();
  const ModelLayout& layout = spec.layout;
  const Index K = layout.size();
  const auto L = static_cast<Index>(spec.levels.size());
  const auto E = spec.estimators.size();

  std::vector<double> z(spec.levels.size());
  for (std::size_t l = 0; l < z.size(); ++l) z[l] = normal_critical_value(spec.levels[l]);

  // Estimators sharing a plan share the instrument matrices of a replication.
  std::vector<InstrumentPlan> plans;
  std::vector<std::size_t> plan_of(E);
  for (std::size_t e = 0; e < E; ++e) {
    const InstrumentPlan plan = effective_plan(spec.estimators[e]);
    auto it = std::find(plans.begin(), plans.end(), plan);
    plan_of[e] = static_cast<std::size_t>(it - plans.begin());
    if (it == plans.end()) plans.push_back(plan);
  }

  McSummary summary;
  summary.levels = spec.levels;

  for (std::size_t d = 0; d < spec.designs.size(); ++d) {
    const DesignConfig& cfg = spec.designs[d];
    const Index T_obs = cfg.T + 1;
    const Eigen::VectorXd truth = layout_truth(cfg, layout);
    const std::uint64_t seed = cell_seed(spec.seed, cfg, d);
    const double root_nT = std::sqrt(static_cast<double>(cfg.n) *
                                     static_cast<double>(T_obs - layout.first_period()));

    std::vector<CellSummary> cells(E);
    std::vector<bool> active(E, true);
    for (std::size_t e = 0; e < E; ++e) {
      CellSummary& cell = cells[e];
      cell.design = design_number(cfg, d);
      cell.config = cfg;
      cell.estimator = spec.estimators[e];
      cell.n = cfg.n;
      cell.T = cfg.T;
      cell.reps = spec.reps;
      try {
        const auto q = instrument_counts(plans[plan_of[e]], layout, T_obs);
        cell.q_star = *std::max_element(q.begin(), q.end());
        check_feasible(plans[plan_of[e]], layout, cfg.n, T_obs);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::InfeasiblePlan && err.code() != ErrorCode::TooFewPeriods) {
          throw;
        }
        cell.infeasible = true;
        cell.note = std::string(to_string(ErrorCode::InfeasibleCell)) + ": " + err.detail();
        active[e] = false;
      }
    }

    std::vector<Draw> draws(static_cast<std::size_t>(spec.reps) * E);
    run_parallel(spec.reps, spec.threads, [&](Index r) {
      const SimulatedPanel sim = generate(cfg, seed, static_cast<std::uint64_t>(r));
      const Eigen::MatrixXd errors = sim.observed_errors();
      std::vector<std::optional<InstrumentMatrices>> cache(plans.size());
      std::vector<bool> broken(plans.size(), false);
      for (std::size_t e = 0; e < E; ++e) {
        if (!active[e]) continue;
        Draw& draw = draws[static_cast<std::size_t>(r) * E + e];
        const std::size_t pi = plan_of[e];
        if (broken[pi]) continue;
        try {
          if (!cache[pi]) cache[pi] = build_instruments(sim.panel, plans[pi], layout);
        } catch (const Error&) {
          broken[pi] = true;
          continue;
        }
        const EstimatorSpec& est = spec.estimators[e];
        try {
          GmmFit fit;
          switch (est.tag) {
            case EstimatorTag::FOD: fit = fit_fod(sim.panel, *cache[pi], layout); break;
            case EstimatorTag::FD: fit = fit_fd(sim.panel, *cache[pi], layout); break;
            case EstimatorTag::Efficient:
              fit = fit_efficient(sim.panel, *cache[pi], layout);
              break;
          }
          draw.beta = fit.beta_hat;
          draw.scaled = root_nT * (fit.beta_hat - truth);
          draw.hits.assign(static_cast<std::size_t>(L * K), 0);
          for (Index l = 0; l < L; ++l) {
            for (Index k = 0; k < K; ++k) {
              const double half = z[static_cast<std::size_t>(l)] * fit.se(k) + kContainmentSlack;
              const bool hit = std::abs(fit.beta_hat(k) - truth(k)) <= half;
              draw.hits[static_cast<std::size_t>(l * K + k)] = hit ? 1 : 0;
            }
          }
          if (spec.diagnostics && est.tag != EstimatorTag::FD) {
            draw.theta = bias_diagnostics(sim.panel, errors, *cache[pi], layout).theta_nT;
          }
          draw.ok = true;
        } catch (const Error&) {
          draw.ok = false;
        }
      }
    });

    for (std::size_t e = 0; e < E; ++e) {
      CellSummary& cell = cells[e];
      if (!active[e]) {
        summary.cells.push_back(std::move(cell));
        continue;
      }
      std::vector<const Draw*> ok;
      for (Index r = 0; r < spec.reps; ++r) {
        const Draw& draw = draws[static_cast<std::size_t>(r) * E + e];
        if (draw.ok) ok.push_back(&draw);
      }
      cell.failures = spec.reps - static_cast<Index>(ok.size());
      const auto m = static_cast<double>(ok.size());
      for (Index k = 0; k < K; ++k) {
        CoefficientSummary cs;
        cs.name = layout.term_name(k);
        cs.truth = truth(k);
        if (ok.empty()) {
          cs.mean = cs.bias = cs.variance = cs.rmse = std::nan("");
          cell.coefficients.push_back(std::move(cs));
          continue;
        }
        std::vector<double> beta;
        std::vector<double> scaled;
        std::vector<double> theta;
        CompensatedSum sq;
        for (const Draw* draw : ok) {
          beta.push_back(draw->beta(k));
          scaled.push_back(draw->scaled(k));
          if (draw->theta.size() == K) theta.push_back(draw->theta(k));
          const double err = draw->beta(k) - truth(k);
          sq.add(err * err);
        }
        const MeanSe b = mean_and_se(beta);
        cs.mean = b.mean;
        cs.bias = b.mean - truth(k);
        cs.variance = b.variance;
        cs.rmse = std::sqrt(sq.value() / m);
        cs.mean_mc_se = b.se;
        const MeanSe s = mean_and_se(scaled);
        cs.mean_scaled_dev = s.mean;
        cs.scaled_dev_mc_se = s.se;
        if (!theta.empty() && theta.size() == ok.size()) {
          const MeanSe th = mean_and_se(theta);
          cs.mean_theta = th.mean;
          cs.theta_mc_se = th.se;
        }
        for (Index l = 0; l < L; ++l) {
          Index hits = 0;
          for (const Draw* draw : ok) hits += draw->hits[static_cast<std::size_t>(l * K + k)];
          const double p = static_cast<double>(hits) / m;
          cs.coverage.push_back(p);
          cs.coverage_mc_se.push_back(std::sqrt(p * (1.0 - p) / m));
        }
        cell.coefficients.push_back(std::move(cs));
      }
      summary.cells.push_back(std::move(cell));
    }
  }
  return summary;
}

std::vector<RatioRow> relative_precision(const McSummary& summary, EstimatorTag baseline) {
  std::vector<RatioRow> rows;
  bool any_baseline = false;
  for (const auto& cell : summary.cells) {
    if (cell.infeasible) continue;
    const CellSummary* base = nullptr;
    for (const auto& c : summary.cells) {
      if (c.design == cell.design && c.n == cell.n && c.T == cell.T &&
          c.estimator.tag == baseline && !c.infeasible) {
        base = &c;
        break;
      }
    }
    if (!base) continue;
    any_baseline = true;
    for (std::size_t k = 0; k < cell.coefficients.size() && k < base->coefficients.size(); ++k) {
      RatioRow row;
      row.design = cell.design;
      row.tag = cell.estimator.tag;
      row.n = cell.n;
      row.T = cell.T;
      row.coefficient = static_cast<Index>(k);
      row.ratio = cell.coefficients[k].rmse / base->coefficients[k].rmse;
      rows.push_back(row);
    }
  }
  if (!any_baseline) {
    throw Error(ErrorCode::MissingBaseline,
                "no feasible " + std::string(to_string(baseline)) + " cell to compare against");
  }
  return rows;
}

std::vector<SweepRow> theta_sweep(const DesignConfig& base, const std::vector<double>& alphas,
                                  const std::vector<Index>& n_grid,
                                  const std::vector<Index>& T_grid, Index reps,
                                  std::uint64_t seed, unsigned threads,
                                  const ModelLayout& layout, int base_count) {
  if (reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be at least 1");
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    for (Index n : n_grid) {
      for (Index T : T_grid) {
        ExperimentSpec spec;
        DesignConfig cfg = base;
        cfg.n = n;
        cfg.T = T;
        spec.designs = {cfg};
        spec.estimators = {{EstimatorTag::FOD, InstrumentPlan::power_law(alpha, base_count)}};
        spec.layout = layout;
        spec.reps = reps;
        spec.levels = {0.95};
        spec.seed = seed;
        spec.threads = threads;
        spec.diagnostics = false;
        const CellSummary& cell = run(spec).cells.front();
        SweepRow row;
        row.alpha = alpha;
        row.n = n;
        row.T = T;
        row.reps = reps;
        row.failures = cell.failures;
        row.q_star = cell.q_star;
        row.infeasible = cell.infeasible;
        for (const auto& cs : cell.coefficients) {
          row.mean_scaled_dev.push_back(cs.mean_scaled_dev);
          row.mc_se.push_back(cs.scaled_dev_mc_se);
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace fodgmm
