#pragma once

#include "fodgmm/panel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace fodgmm {

/// Parameters of the simulated dynamic panel
///
///   y(i,t) = beta1 y(i,t-1) + beta2 x(i,t) + eta_i + v(i,t),  t = -burn_in+1..T
///
/// with y(i,-burn_in) = 0 and x(i,t) = kappa1 eta_i + w(i,t) + phi1 v(i,t-1),
/// w an AR(1) in rho driven by uniform(-sqrt(3), sqrt(3)) shocks. Only
/// periods 0..T are kept.
struct DesignConfig {
  double beta1 = 0.25;
  double beta2 = 0.75;
  double rho = 0.5;
  double phi1 = 0.0;
  double kappa1 = 0.0;
  Index n = 200;
  Index T = 20;
  int burn_in = 50;
  std::optional<int> design_id;
  /// Feed phi1 v(i,t-1) through the AR(1) filter at every date instead of
  /// only at the first post-start date.
  bool filtered_phi = false;
  /// Scale of v and eta; zero switches the component off.
  double sigma_v = 1.0;
  double sigma_eta = 1.0;

  /// Throws Error(InvalidConfig) on |beta1| >= 1, |rho| >= 1, n < 1, T < 2,
  /// burn_in < 1 or negative scales.
  void validate() const;

  Eigen::VectorXd true_beta() const;

  bool operator==(const DesignConfig&) const = default;
};

/// Designs 1..36: ids 1-18 use beta1 = 0.25, 19-36 use 0.75; within each
/// block rho is 0.5 for the first nine and 0.95 for the rest, phi1 steps
/// through -1, 0, 1 every three ids and kappa1 cycles -1, 0, 1.
DesignConfig catalog_design(int id, Index n = 200, Index T = 20);
std::vector<DesignConfig> design_catalog(Index n = 200, Index T = 20);
void write_design_catalog(std::ostream& out);

struct SimulatedPanel {
  PanelDataset panel;
  Eigen::VectorXd eta;
  /// Errors for t = -burn_in..T, i.e. n x (T + 1 + burn_in).
  Eigen::MatrixXd v;
  DesignConfig truth;

  /// Errors aligned with the kept periods 0..T.
  Eigen::MatrixXd observed_errors() const;
};

/// Deterministic in (cfg, seed, replication). Unit i of replication r draws
/// from its own stream, so the panel does not depend on thread scheduling.
SimulatedPanel generate(const DesignConfig& cfg, std::uint64_t seed,
                        std::uint64_t replication = 0);

/// Lag polynomial 1 - b1 L - ... - bK L^K with innovation variance sigma2.
struct ArPolynomial {
  std::vector<double> coeffs;
  double sigma2 = 1.0;

  /// Largest modulus among the companion-matrix eigenvalues; the process is
  /// stationary iff this is below one.
  double spectral_radius() const;
  bool is_stationary() const { return spectral_radius() < 1.0; }
};

/// psi_0..psi_J of the inverted polynomial. Throws NonStationary.
Eigen::VectorXd moment_weights(const ArPolynomial& ar, Index horizon);

/// cov(v_t, y_{t+s-1} | past) = sigma2 * psi_{s-1}, s >= 1.
double conditional_cov_oracle(const ArPolynomial& ar, Index s);

/// Long-run mean eta / (1 - b1 - ... - bK).
double implied_mean(const ArPolynomial& ar, double eta);

}  // namespace fodgmm
