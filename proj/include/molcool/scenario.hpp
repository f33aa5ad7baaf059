#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "molcool/schedule.hpp"

namespace molcool {

// A full simulation scenario: engine parameters plus decay-ladder spec and
// output selection. The model is deterministic; no randomness enters anywhere,
// so identical configs produce identical outputs.
struct ScenarioConfig {
  CoolingConfig<double> engine;

  int acc_states = 10;
  std::vector<double> fc_factors;  // empty -> logarithmic ladder
  double gamma = 1e7;              // per-channel decay rate, 1/s
  double k_a = 1.0;                // emitted-photon wavenumber, units of k

  std::filesystem::path output_dir = "out";
  bool emit_fig3 = true;   // per-step population snapshots
  bool emit_fig4 = false;  // companion single-acc entropy trace
  bool emit_fig5 = true;   // entropy time series
  bool emit_fig6 = true;   // initial/final momentum distributions
  bool emit_plot_script = false;

  // builds the decay ladder from acc_states/fc_factors/gamma/k_a and
  // validates everything; must run before the config is used
  void finalize();

  // effective scenario as sorted `key = value` lines; output_dir is where,
  // not what, and is excluded
  std::string canonical_text() const;
  std::string config_hash() const;
};

ScenarioConfig default_scenario();

// Flat `key = value` file, `#` comments, blank lines ignored. Unset
// sigma_vsel defaults to dp_vs/2 and unset tau3 to 10/gamma.
ScenarioConfig parse_config(const std::filesystem::path& path);

}  // namespace molcool
