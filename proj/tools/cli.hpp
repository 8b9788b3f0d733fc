#pragma once

#include "fodgmm/estimator.hpp"
#include "fodgmm/montecarlo.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fodgmm::cli {

enum class Mode { Estimate, Simulate, Tables, Sweep, Generate };

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

/// Everything one invocation needs. Loaded from a JSON document and then
/// overridden field by field from the command line.
struct RunConfig {
  Mode mode = Mode::Simulate;
  std::string input;
  std::string out;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  Index reps = 1000;
  std::vector<int> designs{5};
  std::vector<Index> T{20};
  std::vector<Index> n{200};
  std::vector<std::string> estimators{"fod", "fd", "efficient"};
  std::string estimator = "fod";
  std::string plan = "limited";
  std::optional<double> alpha;
  std::vector<double> levels{0.95, 0.90, 0.50};
  /// "dynamic" for (y(t-1), x(t)) or "ar<p>" for a pure autoregression.
  std::string layout = "dynamic";
  /// Parameter overrides applied to every selected design (beta1, beta2,
  /// rho, phi1, kappa1, sigma_v, sigma_eta, burn_in, filtered_phi).
  std::map<std::string, double> overrides;
  std::vector<double> alphas{0.0, 0.5, 1.0};
  /// T values at which the all-instrument estimator is run in tables mode.
  std::vector<Index> efficient_T{20, 40};
  std::vector<std::string> formats{"csv", "json"};

  bool operator==(const RunConfig&) const = default;
};

/// Throws Error(InvalidConfig) naming the first bad field.
void validate(const RunConfig& config);

RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& config);

InstrumentPlan resolve_plan(const RunConfig& config);
ModelLayout resolve_layout(const RunConfig& config);
std::vector<DesignConfig> resolve_designs(const RunConfig& config);
std::vector<EstimatorSpec> resolve_estimators(const RunConfig& config);
ExperimentSpec resolve_experiment(const RunConfig& config);

/// Output directory: explicit flag, then FODGMM_OUT_DIR, then the config
/// file, then "fodgmm-out".
std::string output_dir(const RunConfig& config, const std::optional<std::string>& flag);

int cmd_estimate(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_tables(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_generate(const RunConfig& config, std::ostream& out);

/// Full entry point: parses argv, dispatches, reports errors as a JSON
/// object on `err` and returns the process exit status.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fodgmm::cli
