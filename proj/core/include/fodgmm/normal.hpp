#pragma once

namespace fodgmm {

double normal_cdf(double x);

/// Standard normal quantile. Acklam's rational approximation (relative error
/// below 1.2e-9) followed by one Halley correction step. p must be in (0,1).
double inverse_normal_cdf(double p);

/// Two-sided critical value for a central interval of the given coverage,
/// e.g. 1.959963985 for 0.95.
double normal_critical_value(double level);

}  // namespace fodgmm
