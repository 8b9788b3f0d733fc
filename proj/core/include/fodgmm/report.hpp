#pragma once

#include "fodgmm/estimator.hpp"
#include "fodgmm/layout.hpp"
#include "fodgmm/montecarlo.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fodgmm {

/// Shortest round-trippable-enough text for a double ("%.10g"), "NA" for NaN.
std::string format_number(double value);

/// One row per (design, estimator, T, coefficient, level) with the columns
///   design,estimator,T,n,coefficient,level,coverage,mc_se,bias,rmse,rel_precision,failures
/// rel_precision is relative to the Efficient cell of the same design and
/// sample size and left empty when there is none.
void write_summary_csv(const McSummary& summary, std::ostream& out);
inline constexpr const char* kSummaryCsvHeader =
    "design,estimator,T,n,coefficient,level,coverage,mc_se,bias,rmse,rel_precision,failures";

/// Full summary including MC standard errors, theta estimates and notes.
void write_summary_json(const McSummary& summary, std::ostream& out);

/// Coverage (percent, one decimal) at `level` for one coefficient: rows are
/// estimator x T, columns are the designs in [first_design, last_design].
void write_coverage_table(const McSummary& summary, Index coefficient, double level,
                          int first_design, int last_design, std::ostream& out);

/// rmse / rmse(Efficient) per design for one coefficient and T; one column
/// per non-baseline estimator.
void write_ratio_series(const McSummary& summary, Index coefficient, Index T, std::ostream& out);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Coefficients, standard errors, intervals at each level, sigma2 and q*.
void write_fit_json(const GmmFit& fit, const ModelLayout& layout,
                    const std::vector<double>& levels, std::ostream& out);
void write_fit_text(const GmmFit& fit, const ModelLayout& layout,
                    const std::vector<double>& levels, std::ostream& out);

}  // namespace fodgmm
