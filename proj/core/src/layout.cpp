#include "fodgmm/layout.hpp"

#include "fodgmm/error.hpp"

#include <algorithm>

namespace fodgmm {

ModelLayout::ModelLayout() : ModelLayout(lag_plus_regressor()) {}

ModelLayout::ModelLayout(std::vector<Term> regressors)
    : regressors_(std::move(regressors)) {
  if (regressors_.empty()) {
    throw Error(ErrorCode::InvalidConfig, "layout needs at least one regressor");
  }
  for (const auto& term : regressors_) {
    if (term.lag < 0) throw Error(ErrorCode::InvalidConfig, "negative lag in layout");
    if (term.var == Variable::Y && term.lag == 0) {
      throw Error(ErrorCode::InvalidConfig, "current y cannot be a regressor");
    }
    first_period_ = std::max(first_period_, term.lag);
  }
}

ModelLayout ModelLayout::lag_plus_regressor() {
  return ModelLayout(std::vector<Term>{{Variable::Y, 0, 1}, {Variable::X, 0, 0}});
}

ModelLayout ModelLayout::autoregressive(int order) {
  if (order < 1) throw Error(ErrorCode::InvalidConfig, "AR order must be >= 1");
  std::vector<Term> terms;
  for (int l = 1; l <= order; ++l) terms.push_back({Variable::Y, 0, l});
  return ModelLayout(std::move(terms));
}

std::vector<Index> ModelLayout::x_columns() const {
  std::vector<Index> cols;
  for (const auto& term : regressors_) {
    if (term.var == Variable::X) cols.push_back(term.column);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  return cols;
}

std::string ModelLayout::term_name(Index j) const {
  const auto& term = regressors_.at(static_cast<std::size_t>(j));
  std::string name = term.var == Variable::Y ? "y" : "x" + std::to_string(term.column + 1);
  if (term.lag > 0) name += "(-" + std::to_string(term.lag) + ")";
  return name;
}

void ModelLayout::check(const PanelDataset& p) const {
  for (const auto& term : regressors_) {
    if (term.var == Variable::X && term.column >= p.regressors()) {
      throw Error(ErrorCode::InvalidConfig,
                  "layout references x" + std::to_string(term.column + 1) +
                      " but panel has " + std::to_string(p.regressors()) + " regressors");
    }
  }
  if (p.periods() - first_period_ < 2) {
    throw Error(ErrorCode::TooFewPeriods,
                "layout leaves fewer than 2 equation periods");
  }
}

ModelSeries model_series(const PanelDataset& p, const ModelLayout& layout) {
  layout.check(p);
  const int s0 = layout.first_period();
  const Index Tm = p.periods() - s0;
  ModelSeries out;
  out.first_period = s0;
  out.y = p.y().middleCols(s0, Tm);
  out.x.reserve(layout.regressors().size());
  for (const auto& term : layout.regressors()) {
    const Eigen::MatrixXd& src = term.var == Variable::Y ? p.y() : p.x(term.column);
    out.x.emplace_back(src.middleCols(s0 - term.lag, Tm));
  }
  return out;
}

Eigen::MatrixXd equation_window(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                const ModelLayout& layout) {
  const int s0 = layout.first_period();
  return m.middleCols(s0, m.cols() - s0);
}

}  // namespace fodgmm
