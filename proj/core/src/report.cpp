#include "fodgmm/report.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

namespace fodgmm {

namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

std::string estimator_label(EstimatorTag tag) { return std::string(to_string(tag)); }

const CellSummary* baseline_for(const McSummary& s, const CellSummary& cell) {
  for (const auto& c : s.cells) {
    if (c.design == cell.design && c.n == cell.n && c.T == cell.T &&
        c.estimator.tag == EstimatorTag::Efficient && !c.infeasible) {
      return &c;
    }
  }
  return nullptr;
}

std::string coefficient_label(Index k) { return "beta" + std::to_string(k + 1); }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_summary_csv(const McSummary& summary, std::ostream& out) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& cell : summary.cells) {
    const CellSummary* base = baseline_for(summary, cell);
    const std::string prefix = std::to_string(cell.design) + ',' +
                               estimator_label(cell.estimator.tag) + ',' +
                               std::to_string(cell.T) + ',' + std::to_string(cell.n) + ',';
    if (cell.infeasible) {
      for (double level : summary.levels) {
        out << prefix << "NA," << format_number(level) << ",NA,NA,NA,NA,NA,NA\n";
      }
      continue;
    }
    for (std::size_t k = 0; k < cell.coefficients.size(); ++k) {
      const auto& cs = cell.coefficients[k];
      std::string ratio;
      if (base && k < base->coefficients.size()) {
        ratio = format_number(cs.rmse / base->coefficients[k].rmse);
      }
      for (std::size_t l = 0; l < summary.levels.size(); ++l) {
        const bool have = l < cs.coverage.size();
        out << prefix << coefficient_label(static_cast<Index>(k)) << ','
            << format_number(summary.levels[l]) << ','
            << (have ? format_number(cs.coverage[l]) : "NA") << ','
            << (have ? format_number(cs.coverage_mc_se[l]) : "NA") << ','
            << format_number(cs.bias) << ',' << format_number(cs.rmse) << ',' << ratio << ','
            << cell.failures << '\n';
      }
    }
  }
}

void write_summary_json(const McSummary& summary, std::ostream& out) {
  ordered_json doc;
  doc["levels"] = summary.levels;
  ordered_json cells = ordered_json::array();
  for (const auto& cell : summary.cells) {
    ordered_json c;
    c["design"] = cell.design;
    c["estimator"] = estimator_label(cell.estimator.tag);
    c["plan"] = to_string(cell.estimator.tag == EstimatorTag::Efficient
                              ? InstrumentPlan::all_available()
                              : cell.estimator.plan);
    c["n"] = cell.n;
    c["T"] = cell.T;
    c["reps"] = cell.reps;
    c["failures"] = cell.failures;
    c["q_star"] = cell.q_star;
    c["status"] = cell.infeasible ? "infeasible" : "ok";
    if (!cell.note.empty()) c["note"] = cell.note;
    c["parameters"] = {{"beta1", cell.config.beta1}, {"beta2", cell.config.beta2},
                       {"rho", cell.config.rho},     {"phi1", cell.config.phi1},
                       {"kappa1", cell.config.kappa1}};
    const CellSummary* base = baseline_for(summary, cell);
    ordered_json coefs = ordered_json::array();
    for (std::size_t k = 0; k < cell.coefficients.size(); ++k) {
      const auto& cs = cell.coefficients[k];
      ordered_json j;
      j["coefficient"] = coefficient_label(static_cast<Index>(k));
      j["term"] = cs.name;
      j["truth"] = cs.truth;
      j["mean"] = number(cs.mean);
      j["mean_mc_se"] = number(cs.mean_mc_se);
      j["bias"] = number(cs.bias);
      j["variance"] = number(cs.variance);
      j["rmse"] = number(cs.rmse);
      j["mean_scaled_dev"] = number(cs.mean_scaled_dev);
      j["scaled_dev_mc_se"] = number(cs.scaled_dev_mc_se);
      j["mean_theta"] = cs.mean_theta ? number(*cs.mean_theta) : ordered_json(nullptr);
      j["theta_mc_se"] = cs.theta_mc_se ? number(*cs.theta_mc_se) : ordered_json(nullptr);
      j["rel_precision"] = base && k < base->coefficients.size()
                               ? number(cs.rmse / base->coefficients[k].rmse)
                               : ordered_json(nullptr);
      ordered_json cov = ordered_json::array();
      for (std::size_t l = 0; l < cs.coverage.size(); ++l) {
        cov.push_back({{"level", summary.levels[l]},
                       {"coverage", cs.coverage[l]},
                       {"mc_se", cs.coverage_mc_se[l]}});
      }
      j["coverage"] = std::move(cov);
      coefs.push_back(std::move(j));
    }
    c["coefficients"] = std::move(coefs);
    cells.push_back(std::move(c));
  }
  doc["cells"] = std::move(cells);
  out << doc.dump(2) << '\n';
}

void write_coverage_table(const McSummary& summary, Index coefficient, double level,
                          int first_design, int last_design, std::ostream& out) {
  std::size_t level_index = summary.levels.size();
  for (std::size_t l = 0; l < summary.levels.size(); ++l) {
    if (std::abs(summary.levels[l] - level) < 1e-12) level_index = l;
  }
  out << "estimator,T";
  for (int d = first_design; d <= last_design; ++d) out << ',' << d;
  out << '\n';
  // Efficient first, then FD, then FOD, each by ascending T.
  std::map<std::pair<int, Index>, std::map<int, std::string>> rows;
  for (const auto& cell : summary.cells) {
    if (cell.design < first_design || cell.design > last_design || cell.infeasible) continue;
    if (coefficient >= static_cast<Index>(cell.coefficients.size())) continue;
    const auto& cs = cell.coefficients[static_cast<std::size_t>(coefficient)];
    if (level_index >= cs.coverage.size()) continue;
    const int order = cell.estimator.tag == EstimatorTag::Efficient ? 0
                      : cell.estimator.tag == EstimatorTag::FD      ? 1
                                                                    : 2;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * cs.coverage[level_index]);
    rows[{order, cell.T}][cell.design] = buf;
  }
  static const char* names[] = {"FD/FOD", "FD", "FOD"};
  for (const auto& [key, values] : rows) {
    out << names[key.first] << ',' << key.second;
    for (int d = first_design; d <= last_design; ++d) {
      auto it = values.find(d);
      out << ',' << (it == values.end() ? std::string() : it->second);
    }
    out << '\n';
  }
}

void write_ratio_series(const McSummary& summary, Index coefficient, Index T, std::ostream& out) {
  std::set<EstimatorTag> tags;
  std::map<int, std::map<EstimatorTag, double>> series;
  for (const auto& row : relative_precision(summary, EstimatorTag::Efficient)) {
    if (row.T != T || row.coefficient != coefficient || row.tag == EstimatorTag::Efficient) {
      continue;
    }
    tags.insert(row.tag);
    series[row.design][row.tag] = row.ratio;
  }
  out << "design";
  for (auto tag : tags) out << ',' << to_string(tag);
  out << '\n';
  for (const auto& [design, values] : series) {
    out << design;
    for (auto tag : tags) {
      auto it = values.find(tag);
      out << ',' << (it == values.end() ? std::string() : format_number(it->second));
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "alpha,n,T,reps,failures,q_star,coefficient,mean_scaled_dev,mc_se\n";
  for (const auto& row : rows) {
    const std::string prefix = format_number(row.alpha) + ',' + std::to_string(row.n) + ',' +
                               std::to_string(row.T) + ',' + std::to_string(row.reps) + ',' +
                               std::to_string(row.failures) + ',' + std::to_string(row.q_star) +
                               ',';
    if (row.infeasible) {
      out << prefix << "NA,NA,NA\n";
      continue;
    }
    for (std::size_t k = 0; k < row.mean_scaled_dev.size(); ++k) {
      out << prefix << coefficient_label(static_cast<Index>(k)) << ','
          << format_number(row.mean_scaled_dev[k]) << ',' << format_number(row.mc_se[k]) << '\n';
    }
  }
}

void write_fit_json(const GmmFit& fit, const ModelLayout& layout,
                    const std::vector<double>& levels, std::ostream& out) {
  ordered_json doc;
  doc["estimator"] = estimator_label(fit.tag);
  doc["n"] = fit.n;
  doc["T"] = fit.T;
  doc["q_star"] = fit.q_star;
  doc["sigma2_hat"] = fit.sigma2_hat;
  ordered_json terms = ordered_json::array();
  for (Index k = 0; k < layout.size(); ++k) terms.push_back(layout.term_name(k));
  doc["terms"] = terms;
  doc["beta_hat"] = std::vector<double>(fit.beta_hat.data(), fit.beta_hat.data() + fit.beta_hat.size());
  doc["se"] = std::vector<double>(fit.se.data(), fit.se.data() + fit.se.size());
  ordered_json vcov = ordered_json::array();
  for (Index r = 0; r < fit.vcov.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Index c = 0; c < fit.vcov.cols(); ++c) row.push_back(fit.vcov(r, c));
    vcov.push_back(row);
  }
  doc["vcov"] = vcov;
  ordered_json intervals = ordered_json::array();
  for (double level : levels) {
    ordered_json bounds = ordered_json::array();
    for (const auto& iv : confidence_interval(fit, level)) bounds.push_back({iv.lower, iv.upper});
    intervals.push_back({{"level", level}, {"bounds", bounds}});
  }
  doc["intervals"] = intervals;
  out << doc.dump(2) << '\n';
}

void write_fit_text(const GmmFit& fit, const ModelLayout& layout,
                    const std::vector<double>& levels, std::ostream& out) {
  char buf[160];
  out << to_string(fit.tag) << " GMM  n = " << fit.n << "  T = " << fit.T
      << "  q* = " << fit.q_star << '\n';
  std::snprintf(buf, sizeof buf, "%-10s %14s %14s", "term", "estimate", "std.err");
  out << buf;
  for (double level : levels) {
    std::snprintf(buf, sizeof buf, " %27s", (format_number(100.0 * level) + "% interval").c_str());
    out << buf;
  }
  out << '\n';
  std::vector<std::vector<Interval>> ivs;
  for (double level : levels) ivs.push_back(confidence_interval(fit, level));
  for (Index k = 0; k < fit.beta_hat.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%-10s %14.8f %14.8f", layout.term_name(k).c_str(),
                  fit.beta_hat(k), fit.se(k));
    out << buf;
    for (const auto& iv : ivs) {
      const auto& i = iv[static_cast<std::size_t>(k)];
      std::snprintf(buf, sizeof buf, "  [%11.6f, %11.6f]", i.lower, i.upper);
      out << buf;
    }
    out << '\n';
  }
  std::snprintf(buf, sizeof buf, "sigma2 = %.8f\n", fit.sigma2_hat);
  out << buf;
}

}  // namespace fodgmm
