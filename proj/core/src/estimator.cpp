#include "fodgmm/estimator.hpp"

#include "fodgmm/dgp.hpp"
#include "fodgmm/error.hpp"
#include "fodgmm/normal.hpp"
#include "fodgmm/transform.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace fodgmm {

std::string_view to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::FOD: return "FOD";
    case EstimatorTag::FD: return "FD";
    case EstimatorTag::Efficient: return "Efficient";
  }
  return "unknown";
}

std::optional<EstimatorTag> parse_estimator(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "fod") return EstimatorTag::FOD;
  if (lower == "fd") return EstimatorTag::FD;
  if (lower == "efficient" || lower == "fd/fod") return EstimatorTag::Efficient;
  return std::nullopt;
}

namespace {

/// [X_j y_j] for transformed equation j, one row per unit.
Eigen::MatrixXd stacked(const std::vector<Eigen::MatrixXd>& x, const Eigen::MatrixXd& y,
                        Index j) {
  const auto K = static_cast<Index>(x.size());
  Eigen::MatrixXd V(y.rows(), K + 1);
  for (Index k = 0; k < K; ++k) V.col(k) = x[static_cast<std::size_t>(k)].col(j);
  V.col(K) = y.col(j);
  return V;
}

/// Cholesky of a moment matrix; SingularMoment when it is not numerically
/// positive definite.
Eigen::LLT<Eigen::MatrixXd> factor_moment(const Eigen::MatrixXd& S) {
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success ||
      !(llt.rcond() > std::numeric_limits<double>::epsilon())) {
    throw Error(ErrorCode::SingularMoment, "regressor moment matrix is not positive definite");
  }
  return llt;
}

struct TransformedSeries {
  std::vector<Eigen::MatrixXd> x;
  Eigen::MatrixXd y;
  Index model_periods = 0;
};

TransformedSeries fod_series(const PanelDataset& p, const ModelLayout& layout) {
  const ModelSeries ms = model_series(p, layout);
  TransformedSeries out;
  out.model_periods = ms.model_periods();
  out.y = fod(ms.y);
  for (const auto& xk : ms.x) out.x.push_back(fod(xk));
  return out;
}

void check_equations(const InstrumentMatrices& z, Index equations) {
  if (z.equations() != equations) {
    throw Error(ErrorCode::InvalidConfig,
                "instrument set has " + std::to_string(z.equations()) +
                    " equations, model has " + std::to_string(equations));
  }
}

/// Solves the accumulated [X y]'M[X y] system for beta and fills the
/// variance once the residual variance is known.
GmmFit solve_moments(const Eigen::MatrixXd& S, EstimatorTag tag, const InstrumentMatrices& z,
                     Index n, Index Tm) {
  const Index K = S.rows() - 1;
  GmmFit fit;
  fit.information = S.topLeftCorner(K, K);
  fit.beta_hat = factor_moment(fit.information).solve(S.topRightCorner(K, 1));
  fit.tag = tag;
  fit.q_star = z.q_star;
  fit.n = n;
  fit.T = Tm;
  return fit;
}

double residual_ss(const std::vector<Eigen::MatrixXd>& x, const Eigen::MatrixXd& y,
                   const Eigen::VectorXd& beta) {
  Eigen::MatrixXd resid = y;
  for (Index k = 0; k < beta.size(); ++k) resid -= beta(k) * x[static_cast<std::size_t>(k)];
  return resid.squaredNorm();
}

void set_variance(GmmFit& fit, double sigma2) {
  const Index K = fit.information.rows();
  fit.sigma2_hat = sigma2;
  const Eigen::MatrixXd inv =
      factor_moment(fit.information).solve(Eigen::MatrixXd::Identity(K, K));
  fit.vcov = sigma2 * 0.5 * (inv + inv.transpose());
  fit.se = fit.vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

GmmFit fit_fod(const PanelDataset& p, const InstrumentMatrices& instruments,
               const ModelLayout& layout) {
  const TransformedSeries tr = fod_series(p, layout);
  const Index eqs = tr.y.cols();
  check_equations(instruments, eqs);
  const Index K = layout.size();

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(K + 1, K + 1);
  for (Index j = 0; j < eqs; ++j) {
    const Eigen::MatrixXd W =
        instruments.projectors[static_cast<std::size_t>(j)].reduce(stacked(tr.x, tr.y, j));
    S.noalias() += W.transpose() * W;
  }
  GmmFit fit = solve_moments(S, EstimatorTag::FOD, instruments, p.n(), tr.model_periods);
  const double ssr = residual_ss(tr.x, tr.y, fit.beta_hat);
  set_variance(fit, ssr / (static_cast<double>(p.n()) * static_cast<double>(eqs)));
  return fit;
}

GmmFit fit_fod(const PanelDataset& p, const InstrumentPlan& plan, const ModelLayout& layout) {
  return fit_fod(p, build_instruments(p, plan, layout), layout);
}

GmmFit fit_fd(const PanelDataset& p, const InstrumentMatrices& instruments,
              const ModelLayout& layout) {
  const ModelSeries ms = model_series(p, layout);
  const Index Tm = ms.model_periods();
  const Index eqs = Tm - 1;
  check_equations(instruments, eqs);
  const Index K = layout.size();

  std::vector<Eigen::MatrixXd> dx;
  for (const auto& xk : ms.x) dx.push_back(fd(xk));
  const Eigen::MatrixXd dy = fd(ms.y);

  // Block Cholesky of the block-tridiagonal weight sum_i Z_d,i' G Z_d,i, with
  // diagonal blocks 2 Z_t'Z_t and off-diagonal blocks -Z_t'Z_{t+1}. Only the
  // forward substitution u = L^{-1} g is needed since H = u'u.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(K + 1, K + 1);
  Eigen::MatrixXd L_prev;
  Eigen::MatrixXd u_prev;
  for (Index j = 0; j < eqs; ++j) {
    const auto& Z = instruments.Z[static_cast<std::size_t>(j)];
    Eigen::MatrixXd D = 2.0 * Z.transpose() * Z;
    Eigen::MatrixXd g = Z.transpose() * stacked(dx, dy, j);
    Eigen::MatrixXd B;
    if (j > 0) {
      const auto& Zp = instruments.Z[static_cast<std::size_t>(j - 1)];
      B = -(Zp.transpose() * Z);
      L_prev.triangularView<Eigen::Lower>().solveInPlace(B);
      D.noalias() -= B.transpose() * B;
      g.noalias() -= B.transpose() * u_prev;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(D);
    if (llt.info() != Eigen::Success) {
      const int t = static_cast<int>(j) + 1;
      throw Error(ErrorCode::SingularWeight,
                  "FD weight block for equation " + std::to_string(t) +
                      " is not positive definite",
                  t);
    }
    Eigen::MatrixXd L = llt.matrixL();
    L.triangularView<Eigen::Lower>().solveInPlace(g);
    S.noalias() += g.transpose() * g;
    L_prev = std::move(L);
    u_prev = std::move(g);
  }

  GmmFit fit = solve_moments(S, EstimatorTag::FD, instruments, p.n(), Tm);
  const double ssr = residual_ss(dx, dy, fit.beta_hat);
  set_variance(fit, ssr / (2.0 * static_cast<double>(p.n()) * static_cast<double>(eqs)));
  return fit;
}

GmmFit fit_fd(const PanelDataset& p, const InstrumentPlan& plan, const ModelLayout& layout) {
  return fit_fd(p, build_instruments(p, plan, layout), layout);
}

GmmFit fit_efficient(const PanelDataset& p, const InstrumentMatrices& all_available,
                     const ModelLayout& layout) {
  GmmFit fit = fit_fod(p, all_available, layout);
  fit.tag = EstimatorTag::Efficient;
  return fit;
}

GmmFit fit_efficient(const PanelDataset& p, const ModelLayout& layout) {
  return fit_efficient(p, build_instruments(p, InstrumentPlan::all_available(), layout), layout);
}

std::vector<Interval> confidence_interval(const GmmFit& fit, double level) {
  const double z = normal_critical_value(level);
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(fit.beta_hat.size()));
  for (Index k = 0; k < fit.beta_hat.size(); ++k) {
    const double half = z * fit.se(k);
    out.push_back({fit.beta_hat(k) - half, fit.beta_hat(k) + half});
  }
  return out;
}

BiasDiagnostics bias_diagnostics(const PanelDataset& p,
                                 const Eigen::Ref<const Eigen::MatrixXd>& errors,
                                 const InstrumentMatrices& instruments,
                                 const ModelLayout& layout) {
  if (errors.rows() != p.n() || errors.cols() != p.periods()) {
    throw Error(ErrorCode::InvalidConfig, "error matrix must be n x T_obs");
  }
  const TransformedSeries tr = fod_series(p, layout);
  const Eigen::MatrixXd vdd = fod(equation_window(errors, layout));
  const Index eqs = tr.y.cols();
  check_equations(instruments, eqs);
  const Index K = layout.size();

  // Reuse the stacked layout with v in place of y: the last column of W'W
  // then carries X'P v.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(K + 1, K + 1);
  for (Index j = 0; j < eqs; ++j) {
    const Eigen::MatrixXd W =
        instruments.projectors[static_cast<std::size_t>(j)].reduce(stacked(tr.x, vdd, j));
    S.noalias() += W.transpose() * W;
  }
  const double nT = static_cast<double>(p.n()) * static_cast<double>(tr.model_periods);
  BiasDiagnostics out;
  out.A_nT = S.topLeftCorner(K, K) / nT;
  out.b_nT = S.topRightCorner(K, 1) / std::sqrt(nT);
  out.theta_nT = factor_moment(out.A_nT).solve(out.b_nT);
  return out;
}

BiasDiagnostics bias_diagnostics(const SimulatedPanel& sim, const InstrumentPlan& plan,
                                 const ModelLayout& layout) {
  return bias_diagnostics(sim.panel, sim.observed_errors(),
                          build_instruments(sim.panel, plan, layout), layout);
}

}  // namespace fodgmm
