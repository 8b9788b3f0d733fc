#include "fodgmm/instruments.hpp"

#include "fodgmm/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fodgmm {

InstrumentPlan InstrumentPlan::limited() { return {}; }

InstrumentPlan InstrumentPlan::all_available() {
  InstrumentPlan plan;
  plan.kind = Kind::AllAvailable;
  return plan;
}

InstrumentPlan InstrumentPlan::power_law(double alpha, int base, std::optional<int> cap) {
  if (alpha < 0.0 || base < 1 || (cap && *cap < 1)) {
    throw Error(ErrorCode::InvalidConfig, "power-law plan needs alpha >= 0, base >= 1, cap >= 1");
  }
  InstrumentPlan plan;
  plan.kind = Kind::PowerLaw;
  plan.alpha = alpha;
  plan.base = base;
  plan.cap = cap;
  return plan;
}

InstrumentPlan InstrumentPlan::custom(std::vector<InstrumentRule> rules) {
  if (rules.empty()) throw Error(ErrorCode::InvalidConfig, "custom plan has no rules");
  for (const auto& r : rules) {
    if (r.min_lag < 0 || (r.max_lag && *r.max_lag < r.min_lag)) {
      throw Error(ErrorCode::InvalidConfig, "bad lag range in instrument rule");
    }
    if (r.var == Variable::Y && r.min_lag < 1) {
      throw Error(ErrorCode::InvalidConfig, "current y is not a valid instrument");
    }
  }
  InstrumentPlan plan;
  plan.kind = Kind::Custom;
  plan.rules = std::move(rules);
  return plan;
}

std::string to_string(const InstrumentPlan& plan) {
  std::ostringstream out;
  switch (plan.kind) {
    case InstrumentPlan::Kind::Limited: return "limited";
    case InstrumentPlan::Kind::AllAvailable: return "all";
    case InstrumentPlan::Kind::PowerLaw:
      out << "powerlaw:" << plan.alpha << ':' << plan.base;
      if (plan.cap) out << ':' << *plan.cap;
      return out.str();
    case InstrumentPlan::Kind::Custom:
      out << "custom";
      for (const auto& r : plan.rules) {
        out << ':' << (r.var == Variable::Y ? std::string("y") : "x" + std::to_string(r.column + 1))
            << '[' << r.min_lag << ',';
        if (r.max_lag) {
          out << *r.max_lag;
        } else {
          out << '*';
        }
        out << ']';
      }
      return out.str();
  }
  return "unknown";
}

std::optional<InstrumentPlan> parse_plan(const std::string& text) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "limited") return InstrumentPlan::limited();
  if (lower == "all" || lower == "allavailable" || lower == "all_available") {
    return InstrumentPlan::all_available();
  }
  if (lower.rfind("powerlaw:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(lower.substr(9));
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.empty() || parts.size() > 3) return std::nullopt;
    try {
      const double alpha = std::stod(parts[0]);
      const int base = parts.size() > 1 ? std::stoi(parts[1]) : 5;
      std::optional<int> cap;
      if (parts.size() > 2) cap = std::stoi(parts[2]);
      return InstrumentPlan::power_law(alpha, base, cap);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

std::vector<InstrumentRule> base_rules(const InstrumentPlan& plan, const ModelLayout& layout) {
  if (plan.kind == InstrumentPlan::Kind::Custom) return plan.rules;
  const bool limited = plan.kind == InstrumentPlan::Kind::Limited;
  const std::optional<int> y_max = limited ? std::optional<int>(2) : std::nullopt;
  std::vector<InstrumentRule> rules{{Variable::Y, 0, 1, y_max}};
  for (Index c : layout.x_columns()) rules.push_back({Variable::X, c, 0, y_max});
  return rules;
}

/// Instruments for the equation at observed period s, most recent first.
std::vector<Term> candidates(const std::vector<InstrumentRule>& rules, int s) {
  std::vector<Term> out;
  for (int lag = 0; lag <= s; ++lag) {
    for (const auto& r : rules) {
      if (lag < r.min_lag || (r.max_lag && lag > *r.max_lag)) continue;
      Term term{r.var, r.var == Variable::Y ? 0 : r.column, lag};
      if (std::find(out.begin(), out.end(), term) == out.end()) out.push_back(term);
    }
  }
  return out;
}

Index power_law_count(const InstrumentPlan& plan, Index t, Index available) {
  const double grow = std::ceil(std::pow(static_cast<double>(t + 1), plan.alpha) - 1e-12);
  auto q = std::min<double>(static_cast<double>(available), grow * plan.base);
  if (plan.cap) q = std::min<double>(q, *plan.cap);
  return static_cast<Index>(q);
}

/// Instrument terms for each equation t = 1..Tm-1.
std::vector<std::vector<Term>> plan_terms(const InstrumentPlan& plan, const ModelLayout& layout,
                                          Index observed_periods) {
  const int s0 = layout.first_period();
  const Index equations = observed_periods - s0 - 1;
  if (equations < 1) {
    throw Error(ErrorCode::TooFewPeriods, "no transformed equations for this layout");
  }
  const auto rules = base_rules(plan, layout);
  std::vector<std::vector<Term>> out;
  out.reserve(static_cast<std::size_t>(equations));
  for (Index t = 1; t <= equations; ++t) {
    const int s = s0 + static_cast<int>(t) - 1;
    auto terms = candidates(rules, s);
    if (plan.kind == InstrumentPlan::Kind::PowerLaw) {
      terms.resize(static_cast<std::size_t>(
          power_law_count(plan, t, static_cast<Index>(terms.size()))));
    }
    out.push_back(std::move(terms));
  }
  return out;
}

}  // namespace

std::vector<Index> instrument_counts(const InstrumentPlan& plan, const ModelLayout& layout,
                                     Index observed_periods) {
  std::vector<Index> q;
  for (const auto& terms : plan_terms(plan, layout, observed_periods)) {
    q.push_back(static_cast<Index>(terms.size()));
  }
  return q;
}

void check_feasible(const InstrumentPlan& plan, const ModelLayout& layout, Index n,
                    Index observed_periods) {
  const auto q = instrument_counts(plan, layout, observed_periods);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const int t = static_cast<int>(j) + 1;
    if (q[j] > n) {
      throw Error(ErrorCode::InfeasiblePlan,
                  "equation " + std::to_string(t) + " needs " + std::to_string(q[j]) +
                      " instruments but n = " + std::to_string(n),
                  t);
    }
    if (q[j] < layout.size()) {
      throw Error(ErrorCode::InfeasiblePlan,
                  "equation " + std::to_string(t) + " has " + std::to_string(q[j]) +
                      " instruments for " + std::to_string(layout.size()) + " regressors",
                  t);
    }
  }
}

Projector::Projector(const Eigen::Ref<const Eigen::MatrixXd>& Z)
    : qr_(Z), rows_(Z.rows()), q_(Z.cols()) {
  if (q_ == 0 || q_ > rows_) {
    throw Error(ErrorCode::RankDeficient,
                std::to_string(rows_) + "x" + std::to_string(q_) +
                    " instrument matrix cannot have full column rank");
  }
  // Z = QR with Q orthonormal, so R carries the singular values of Z.
  const Eigen::MatrixXd R = qr_.matrixQR().topRows(q_).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
  singular_ratio_ = sv(0) > 0.0 ? sv(q_ - 1) / sv(0) : 0.0;
  if (!(singular_ratio_ > kRankTolerance)) {
    throw Error(ErrorCode::RankDeficient,
                "smallest/largest singular value ratio " + std::to_string(singular_ratio_));
  }
}

Eigen::MatrixXd Projector::reduce(const Eigen::Ref<const Eigen::MatrixXd>& V) const {
  Eigen::MatrixXd work = V;
  work.applyOnTheLeft(qr_.householderQ().adjoint());
  return work.topRows(q_);
}

Eigen::MatrixXd Projector::project(const Eigen::Ref<const Eigen::MatrixXd>& V) const {
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(rows_, V.cols());
  full.topRows(q_) = reduce(V);
  full.applyOnTheLeft(qr_.householderQ());
  return full;
}

Eigen::VectorXd Projector::leverage() const {
  Eigen::MatrixXd thin = Eigen::MatrixXd::Identity(rows_, q_);
  thin.applyOnTheLeft(qr_.householderQ());
  return static_cast<double>(rows_) * thin.rowwise().squaredNorm();
}

InstrumentMatrices build_instruments(const PanelDataset& p, const InstrumentPlan& plan,
                                     const ModelLayout& layout) {
  layout.check(p);
  check_feasible(plan, layout, p.n(), p.periods());
  const int s0 = layout.first_period();
  const auto terms = plan_terms(plan, layout, p.periods());

  InstrumentMatrices out;
  out.Z.reserve(terms.size());
  out.projectors.reserve(terms.size());
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const int s = s0 + static_cast<int>(j);
    const auto& row = terms[j];
    Eigen::MatrixXd Z(p.n(), static_cast<Index>(row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Term& term = row[c];
      if (term.var == Variable::X && term.column >= p.regressors()) {
        throw Error(ErrorCode::InvalidConfig,
                    "instrument references missing column x" + std::to_string(term.column + 1));
      }
      const Eigen::MatrixXd& src = term.var == Variable::Y ? p.y() : p.x(term.column);
      Z.col(static_cast<Index>(c)) = src.col(s - term.lag);
    }
    const int t = static_cast<int>(j) + 1;
    try {
      out.projectors.emplace_back(Z);
    } catch (const Error& e) {
      throw Error(e.code(), "equation " + std::to_string(t) + ": " + e.detail(), t);
    }
    out.q.push_back(Z.cols());
    out.q_star = std::max(out.q_star, Z.cols());
    out.Z.push_back(std::move(Z));
  }
  return out;
}

Eigen::MatrixXd project(const Eigen::Ref<const Eigen::MatrixXd>& Z,
                        const Eigen::Ref<const Eigen::MatrixXd>& V) {
  return Projector(Z).project(V);
}

Eigen::VectorXd leverage(const Eigen::Ref<const Eigen::MatrixXd>& Z) {
  return Projector(Z).leverage();
}

}  // namespace fodgmm
