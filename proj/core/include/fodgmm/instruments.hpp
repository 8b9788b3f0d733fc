#pragma once

#include "fodgmm/layout.hpp"
#include "fodgmm/panel.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace fodgmm {

/// Relative singular-value threshold below which an instrument matrix is
/// treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Instruments drawn from one variable at lags min_lag..max_lag relative to
/// the equation's period. No max_lag means every lag back to period 0.
struct InstrumentRule {
  Variable var = Variable::Y;
  Index column = 0;
  int min_lag = 1;
  std::optional<int> max_lag;

  bool operator==(const InstrumentRule&) const = default;
};

/// Per-period instrument recipe.
///
///  - Limited: y at lags 1..2 and each layout x column at lags 0..2. For the
///    (y(t-1), x(t)) layout this gives q = 3 in the first equation and 5
///    afterwards.
///  - AllAvailable: every y lag >= 1 and every x lag >= 0 back to period 0,
///    so q_t = 3 + 2(t-1) for the default layout.
///  - PowerLaw: the q_t most recent AllAvailable candidates, with
///    q_t = min(available, ceil((t+1)^alpha) * base), optionally capped.
///  - Custom: an explicit rule list.
struct InstrumentPlan {
  enum class Kind { Limited, AllAvailable, PowerLaw, Custom };

  Kind kind = Kind::Limited;
  double alpha = 0.0;
  int base = 5;
  std::optional<int> cap;
  std::vector<InstrumentRule> rules;

  static InstrumentPlan limited();
  static InstrumentPlan all_available();
  static InstrumentPlan power_law(double alpha, int base, std::optional<int> cap = std::nullopt);
  static InstrumentPlan custom(std::vector<InstrumentRule> rules);

  bool operator==(const InstrumentPlan&) const = default;
};

std::string to_string(const InstrumentPlan& plan);
/// Accepts "limited", "all" / "allavailable", "powerlaw:<alpha>[:<base>[:<cap>]]".
std::optional<InstrumentPlan> parse_plan(const std::string& text);

/// Householder QR of one period's instrument matrix Z_t. Applies the
/// orthogonal projection P_t = Z_t (Z_t'Z_t)^{-1} Z_t' without forming it.
class Projector {
 public:
  /// Throws Error(RankDeficient) when sigma_min <= kRankTolerance * sigma_max.
  explicit Projector(const Eigen::Ref<const Eigen::MatrixXd>& Z);

  Index rows() const noexcept { return rows_; }
  Index rank() const noexcept { return q_; }

  /// First q rows of Q'V. For any V, W: V' P W = reduce(V)' reduce(W).
  Eigen::MatrixXd reduce(const Eigen::Ref<const Eigen::MatrixXd>& V) const;

  Eigen::MatrixXd project(const Eigen::Ref<const Eigen::MatrixXd>& V) const;

  /// n * diag(P_t).
  Eigen::VectorXd leverage() const;

  double singular_ratio() const noexcept { return singular_ratio_; }

 private:
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Index rows_ = 0;
  Index q_ = 0;
  double singular_ratio_ = 0.0;
};

/// Realized instruments for transformed equations t = 1..T-1 (stored 0-based).
struct InstrumentMatrices {
  std::vector<Eigen::MatrixXd> Z;
  std::vector<Index> q;
  Index q_star = 0;
  std::vector<Projector> projectors;

  Index equations() const noexcept { return static_cast<Index>(Z.size()); }
};

/// Instrument counts q_t for an n-free feasibility check, given the number of
/// observed periods.
std::vector<Index> instrument_counts(const InstrumentPlan& plan, const ModelLayout& layout,
                                     Index observed_periods);

/// Throws Error(InfeasiblePlan, t) at the first equation whose q_t exceeds n
/// or falls below the regressor count.
void check_feasible(const InstrumentPlan& plan, const ModelLayout& layout, Index n,
                    Index observed_periods);

InstrumentMatrices build_instruments(const PanelDataset& p, const InstrumentPlan& plan,
                                     const ModelLayout& layout = ModelLayout());

/// P_t V via a least-squares (QR) solve.
Eigen::MatrixXd project(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                        const Eigen::Ref<const Eigen::MatrixXd>& V);

Eigen::VectorXd leverage(const Eigen::Ref<const Eigen::MatrixXd>& Z);

}  // namespace fodgmm
