#include "fodgmm/dgp.hpp"

#include "fodgmm/error.hpp"
#include "fodgmm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <string>

namespace fodgmm {

void DesignConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(std::abs(beta1) < 1.0)) fail("|beta1| must be below 1");
  if (!(std::abs(rho) < 1.0)) fail("|rho| must be below 1");
  if (n < 1) fail("n must be positive");
  if (T < 2) fail("T must be at least 2");
  if (burn_in < 1) fail("burn_in must be positive");
  if (sigma_v < 0.0 || sigma_eta < 0.0) fail("error scales must be non-negative");
  if (design_id && (*design_id < 1 || *design_id > 36)) fail("design id must be in 1..36");
}

Eigen::VectorXd DesignConfig::true_beta() const { return Eigen::Vector2d(beta1, beta2); }

DesignConfig catalog_design(int id, Index n, Index T) {
  if (id < 1 || id > 36) {
    throw Error(ErrorCode::InvalidConfig, "design id " + std::to_string(id) + " outside 1..36");
  }
  const int k = (id - 1) % 18;
  DesignConfig cfg;
  cfg.beta1 = id <= 18 ? 0.25 : 0.75;
  cfg.beta2 = 1.0 - cfg.beta1;
  cfg.rho = k < 9 ? 0.5 : 0.95;
  cfg.phi1 = static_cast<double>((k % 9) / 3 - 1);
  cfg.kappa1 = static_cast<double>(k % 3 - 1);
  cfg.n = n;
  cfg.T = T;
  cfg.design_id = id;
  return cfg;
}

std::vector<DesignConfig> design_catalog(Index n, Index T) {
  std::vector<DesignConfig> out;
  for (int id = 1; id <= 36; ++id) out.push_back(catalog_design(id, n, T));
  return out;
}

void write_design_catalog(std::ostream& out) {
  out << "design,beta1,beta2,rho,phi1,kappa1\n";
  for (const auto& d : design_catalog()) {
    out << *d.design_id << ',' << d.beta1 << ',' << d.beta2 << ',' << d.rho << ','
        << d.phi1 << ',' << d.kappa1 << '\n';
  }
}

Eigen::MatrixXd SimulatedPanel::observed_errors() const {
  return v.rightCols(panel.periods());
}

SimulatedPanel generate(const DesignConfig& cfg, std::uint64_t seed,
                        std::uint64_t replication) {
  cfg.validate();
  const Index n = cfg.n;
  const Index B = cfg.burn_in;
  const Index span = cfg.T + 1 + B;  // dates -B..T
  const double half_width = std::sqrt(12.0) / 2.0;

  SimulatedPanel sim;
  sim.truth = cfg;
  sim.eta.resize(n);
  sim.v.resize(n, span);
  Eigen::MatrixXd y(n, cfg.T + 1);
  Eigen::MatrixXd x(n, cfg.T + 1);

  for (Index i = 0; i < n; ++i) {
    RandomStream rs(seed, replication, static_cast<std::uint32_t>(i));
    const double eta = cfg.sigma_eta * rs.normal();
    sim.eta(i) = eta;

    double y_prev = 0.0;  // y(i, -B)
    double w = 0.0;
    double v_prev = 0.0;
    for (Index j = 0; j < span; ++j) {
      const double v = cfg.sigma_v * rs.normal();
      const double eps = rs.uniform(-half_width, half_width);
      sim.v(i, j) = v;

      double x_now = 0.0;
      double y_now = 0.0;
      if (j == 0) {
        w = eps;
        x_now = cfg.kappa1 * eta + w;
        y_now = 0.0;
      } else if (j == 1 || cfg.filtered_phi) {
        w = cfg.rho * w + eps + cfg.phi1 * v_prev;
        x_now = cfg.kappa1 * eta + w;
        y_now = cfg.beta1 * y_prev + cfg.beta2 * x_now + eta + v;
      } else {
        w = cfg.rho * w + eps;
        x_now = cfg.kappa1 * eta + w + cfg.phi1 * v_prev;
        y_now = cfg.beta1 * y_prev + cfg.beta2 * x_now + eta + v;
      }
      if (j >= B) {
        y(i, j - B) = y_now;
        x(i, j - B) = x_now;
      }
      y_prev = y_now;
      v_prev = v;
    }
  }

  std::vector<std::int64_t> labels(static_cast<std::size_t>(cfg.T + 1));
  for (std::size_t t = 0; t < labels.size(); ++t) labels[t] = static_cast<std::int64_t>(t);
  sim.panel = PanelDataset(std::move(y), {std::move(x)}, {}, std::move(labels));
  return sim;
}

double ArPolynomial::spectral_radius() const {
  const auto K = static_cast<Index>(coeffs.size());
  if (K == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(K, K);
  for (Index k = 0; k < K; ++k) companion(0, k) = coeffs[static_cast<std::size_t>(k)];
  if (K > 1) companion.bottomLeftCorner(K - 1, K - 1).setIdentity();
  return Eigen::EigenSolver<Eigen::MatrixXd>(companion, false).eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::VectorXd moment_weights(const ArPolynomial& ar, Index horizon) {
  if (!ar.is_stationary()) {
    throw Error(ErrorCode::NonStationary,
                "lag polynomial has a root on or inside the unit circle");
  }
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(horizon + 1);
  psi(0) = 1.0;
  const auto K = static_cast<Index>(ar.coeffs.size());
  for (Index j = 1; j <= horizon; ++j) {
    for (Index m = 1; m <= std::min(j, K); ++m) {
      psi(j) += ar.coeffs[static_cast<std::size_t>(m - 1)] * psi(j - m);
    }
  }
  return psi;
}

double conditional_cov_oracle(const ArPolynomial& ar, Index s) {
  if (s < 1) throw Error(ErrorCode::InvalidConfig, "horizon s must be >= 1");
  return ar.sigma2 * moment_weights(ar, s - 1)(s - 1);
}

double implied_mean(const ArPolynomial& ar, double eta) {
  double sum = 0.0;
  for (double b : ar.coeffs) sum += b;
  return eta / (1.0 - sum);
}

}  // namespace fodgmm
