#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fodgmm {

using Index = Eigen::Index;

/// Balanced panel of an outcome y(i,t) and K regressors x(i,t,k), with units
/// in rows and periods 0..T_obs-1 in columns. Immutable once built.
class PanelDataset {
 public:
  PanelDataset() = default;

  /// Shapes must agree (every regressor matrix sized like y); values are not
  /// checked here, see validate().
  PanelDataset(Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> x,
               std::vector<std::string> unit_ids = {},
               std::vector<std::int64_t> period_labels = {});

  Index n() const noexcept { return y_.rows(); }
  Index periods() const noexcept { return y_.cols(); }
  Index regressors() const noexcept { return static_cast<Index>(x_.size()); }

  const Eigen::MatrixXd& y() const noexcept { return y_; }
  const Eigen::MatrixXd& x(Index k) const { return x_.at(static_cast<std::size_t>(k)); }
  const std::vector<Eigen::MatrixXd>& xs() const noexcept { return x_; }

  double y(Index i, Index t) const { return y_(i, t); }
  double x(Index i, Index t, Index k) const { return x(k)(i, t); }

  const std::vector<std::string>& unit_ids() const noexcept { return unit_ids_; }
  const std::vector<std::int64_t>& period_labels() const noexcept { return period_labels_; }

  bool operator==(const PanelDataset&) const;

 private:
  Eigen::MatrixXd y_;
  std::vector<Eigen::MatrixXd> x_;
  std::vector<std::string> unit_ids_;
  std::vector<std::int64_t> period_labels_;
};

enum class ViolationKind { NoUnits, TooFewPeriods, NoRegressors, NonFiniteValue };

struct Violation {
  ViolationKind kind;
  std::optional<Index> unit;
  std::optional<Index> period;
  /// Regressor column, or empty when the offending value is the outcome.
  std::optional<Index> regressor;
  std::string message;
};

/// Lists every broken invariant; an empty result means the panel is usable.
std::vector<Violation> validate(const PanelDataset& p);

/// Column names for the flat-file format. An empty regressor list means
/// "every column that is not unit, period or y, in header order".
struct PanelSchema {
  std::string unit = "unit";
  std::string period = "period";
  std::string y = "y";
  std::vector<std::string> x;
  char delimiter = ',';
};

PanelDataset load_panel(const std::filesystem::path& path,
                        const PanelSchema& schema = {});
PanelDataset read_panel(std::istream& in, const PanelSchema& schema = {});

/// Writes with 17 significant digits so doubles survive a round trip.
void write_panel(const PanelDataset& p, std::ostream& out,
                 const PanelSchema& schema = {});
void write_panel(const PanelDataset& p, const std::filesystem::path& path,
                 const PanelSchema& schema = {});

}  // namespace fodgmm
