#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "molcool/engine.hpp"
#include "molcool/entropy.hpp"
#include "molcool/scenario.hpp"

namespace molcool {

inline constexpr const char* output_dir_env = "MOLCOOL_OUTPUT_DIR";

// output_dir from the config unless the environment overrides it
std::filesystem::path resolved_output_dir(const ScenarioConfig& sc);

struct SampleRecord {
  SnapshotMeta meta;
  EntropyRecord entropy;
  ArakiLiebResult al;
  double trace = 0.0;
  double overdraft = 0.0;
};

// full in-memory trace of a run, for tests and the invariant suite
struct RunCapture {
  std::vector<SampleRecord> records;
  ArrayX<double> p_axis;
  ArrayX<double> f_initial;
  ArrayX<double> f_final;
  double s_radiation = 0.0;
};

struct RunSummary {
  int cycles = 0;
  std::int64_t samples = 0;
  double initial_fwhm_hk = 0.0;
  double final_fwhm_hk = 0.0;
  double final_mean_hk = 0.0;
  double min_al_lower = 0.0;
  double min_al_upper = 0.0;
  bool al_all_pass = true;
  double max_overdraft = 0.0;
  double max_trace_excess = 0.0;  // max |trace - 1| - overdraft over all samples
  double duration_seconds = 0.0;
  std::vector<std::string> warnings;
  std::filesystem::path output_dir;
};

double distribution_mean(const ArrayX<double>& p, const ArrayX<double>& f);
// full width at half maximum from the outermost half-height crossings,
// linearly interpolated
double distribution_fwhm(const ArrayX<double>& p, const ArrayX<double>& f);

// Runs the scenario; writes CSVs, manifest.json and the optional plot script
// into outdir when write_files is set. capture, if given, receives every
// sample. The caller resolves outdir (see resolved_output_dir).
RunSummary execute_scenario(const ScenarioConfig& sc, const std::filesystem::path& outdir,
                            bool write_files, RunCapture* capture = nullptr);

}  // namespace molcool
