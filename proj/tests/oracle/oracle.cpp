#include "oracle.hpp"

#include <cmath>
#include <random>

namespace fodgmm::oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::MatrixXd instrument_matrix(const PanelDataset& p, Instruments kind, int t) {
  const Index n = p.n();
  std::vector<VectorXd> cols;
  auto y = [&](int s) { return VectorXd(p.y().col(s)); };
  auto x = [&](int s) { return VectorXd(p.x(0).col(s)); };
  if (kind == Instruments::Limited) {
    if (t == 1) {
      cols = {y(0), x(0), x(1)};
    } else {
      cols = {y(t - 2), y(t - 1), x(t - 2), x(t - 1), x(t)};
    }
  } else {
    cols = {y(0), x(0), x(1)};
    for (int s = 2; s <= t; ++s) {
      cols.push_back(y(s - 1));
      cols.push_back(x(s));
    }
  }
  MatrixXd Z(n, static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) Z.col(static_cast<Index>(c)) = cols[c];
  return Z;
}

Eigen::VectorXd fod_by_definition(const Eigen::VectorXd& w) {
  const Index T = w.size();
  VectorXd out(T - 1);
  for (Index t = 1; t < T; ++t) {
    double mean = 0.0;
    for (Index s = t; s < T; ++s) mean += w(s);
    mean /= static_cast<double>(T - t);
    const double c = std::sqrt(static_cast<double>(T - t) / static_cast<double>(T - t + 1));
    out(t - 1) = c * (w(t - 1) - mean);
  }
  return out;
}

DenseFit fod_gmm(const PanelDataset& p, Instruments kind) {
  const Index n = p.n();
  const Index T = p.periods() - 1;  // model periods 1..T
  // Transformed y and regressors per equation t = 1..T-1, units in rows.
  MatrixXd yd(n, T - 1);
  MatrixXd lagd(n, T - 1);
  MatrixXd xd(n, T - 1);
  for (Index i = 0; i < n; ++i) {
    VectorXd yi(T);
    VectorXd li(T);
    VectorXd xi(T);
    for (Index s = 1; s <= T; ++s) {
      yi(s - 1) = p.y(i, s);
      li(s - 1) = p.y(i, s - 1);
      xi(s - 1) = p.x(i, s, 0);
    }
    yd.row(i) = fod_by_definition(yi).transpose();
    lagd.row(i) = fod_by_definition(li).transpose();
    xd.row(i) = fod_by_definition(xi).transpose();
  }
  MatrixXd H = MatrixXd::Zero(2, 2);
  VectorXd h = VectorXd::Zero(2);
  for (Index t = 1; t <= T - 1; ++t) {
    const MatrixXd Z = instrument_matrix(p, kind, static_cast<int>(t));
    const MatrixXd P = Z * (Z.transpose() * Z).inverse() * Z.transpose();
    MatrixXd X(n, 2);
    X.col(0) = lagd.col(t - 1);
    X.col(1) = xd.col(t - 1);
    H += X.transpose() * P * X;
    h += X.transpose() * P * yd.col(t - 1);
  }
  DenseFit fit;
  fit.beta = H.inverse() * h;
  double ssr = 0.0;
  for (Index t = 0; t < T - 1; ++t) {
    const VectorXd r = yd.col(t) - fit.beta(0) * lagd.col(t) - fit.beta(1) * xd.col(t);
    ssr += r.squaredNorm();
  }
  fit.sigma2 = ssr / static_cast<double>(n * (T - 1));
  fit.vcov = fit.sigma2 * H.inverse();
  return fit;
}

DenseFit fd_gmm(const PanelDataset& p, Instruments kind) {
  const Index n = p.n();
  const Index T = p.periods() - 1;
  const Index m = T - 1;  // differenced equations t = 1..T-1

  std::vector<MatrixXd> Zt;
  Index total_q = 0;
  for (Index t = 1; t <= m; ++t) {
    Zt.push_back(instrument_matrix(p, kind, static_cast<int>(t)));
    total_q += Zt.back().cols();
  }
  MatrixXd G = MatrixXd::Zero(m, m);
  for (Index r = 0; r < m; ++r) {
    G(r, r) = 2.0;
    if (r + 1 < m) G(r, r + 1) = G(r + 1, r) = -1.0;
  }

  MatrixXd ZGZ = MatrixXd::Zero(total_q, total_q);
  MatrixXd ZX = MatrixXd::Zero(total_q, 2);
  VectorXd Zy = VectorXd::Zero(total_q);
  std::vector<MatrixXd> Xi(static_cast<std::size_t>(n));
  std::vector<VectorXd> yi(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    MatrixXd Zd = MatrixXd::Zero(m, total_q);
    Index offset = 0;
    for (Index t = 1; t <= m; ++t) {
      const MatrixXd& Z = Zt[static_cast<std::size_t>(t - 1)];
      Zd.block(t - 1, offset, 1, Z.cols()) = Z.row(i);
      offset += Z.cols();
    }
    MatrixXd X(m, 2);
    VectorXd y(m);
    for (Index t = 1; t <= m; ++t) {
      y(t - 1) = p.y(i, t + 1) - p.y(i, t);
      X(t - 1, 0) = p.y(i, t) - p.y(i, t - 1);
      X(t - 1, 1) = p.x(i, t + 1, 0) - p.x(i, t, 0);
    }
    ZGZ += Zd.transpose() * G * Zd;
    ZX += Zd.transpose() * X;
    Zy += Zd.transpose() * y;
    Xi[static_cast<std::size_t>(i)] = X;
    yi[static_cast<std::size_t>(i)] = y;
  }
  const MatrixXd W = ZGZ.inverse();
  const MatrixXd H = ZX.transpose() * W * ZX;
  DenseFit fit;
  fit.beta = H.inverse() * (ZX.transpose() * W * Zy);
  double ssr = 0.0;
  for (Index i = 0; i < n; ++i) {
    ssr += (yi[static_cast<std::size_t>(i)] - Xi[static_cast<std::size_t>(i)] * fit.beta)
               .squaredNorm();
  }
  fit.sigma2 = ssr / static_cast<double>(2 * n * m);
  fit.vcov = fit.sigma2 * H.inverse();
  return fit;
}

double normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    if (cdf < p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> long_division(const std::vector<double>& b, int terms) {
  // Divide 1 by a(z) = 1 - b1 z - ... : the remainder starts as 1 and each
  // quotient term cancels the remainder's leading coefficient.
  std::vector<double> a(b.size() + 1);
  a[0] = 1.0;
  for (std::size_t k = 0; k < b.size(); ++k) a[k + 1] = -b[k];
  std::vector<double> remainder(static_cast<std::size_t>(terms) + a.size(), 0.0);
  remainder[0] = 1.0;
  std::vector<double> quotient;
  for (int j = 0; j < terms; ++j) {
    const double q = remainder[static_cast<std::size_t>(j)] / a[0];
    quotient.push_back(q);
    for (std::size_t k = 0; k < a.size(); ++k) {
      remainder[static_cast<std::size_t>(j) + k] -= q * a[k];
    }
  }
  return quotient;
}

PanelDataset random_panel(Eigen::Index n, Eigen::Index T_obs, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  MatrixXd y(n, T_obs);
  MatrixXd x(n, T_obs);
  for (Index i = 0; i < n; ++i) {
    const double eta = N(gen);
    double xp = N(gen);
    double yp = eta + N(gen);
    for (Index t = 0; t < T_obs; ++t) {
      const double xt = 0.6 * xp + 0.5 * eta + N(gen);
      const double yt = 0.4 * yp + 0.8 * xt + eta + N(gen);
      x(i, t) = xt;
      y(i, t) = yt;
      xp = xt;
      yp = yt;
    }
  }
  return PanelDataset(std::move(y), {std::move(x)});
}

}  // namespace fodgmm::oracle
