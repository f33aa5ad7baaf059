#include <glob.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "molcool/engine.hpp"
#include "molcool/entropy.hpp"
#include "molcool/errors.hpp"
#include "molcool/estimates.hpp"
#include "molcool/io.hpp"
#include "molcool/run_scenario.hpp"
#include "molcool/scenario.hpp"

namespace {

using namespace molcool;

// ---------------------------------------------------------------- estimate

PhysicalInputs apply_overrides(const std::vector<std::string>& tokens) {
  PhysicalInputs in;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw ConfigError("estimate override '" + token + "' is not key=value");
    const std::string key = token.substr(0, eq);
    const std::string text = token.substr(eq + 1);
    double value = 0.0;
    try {
      std::size_t pos = 0;
      value = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw ConfigError("estimate override '" + key + "': invalid number '" + text + "'");
    }
    if (key == "mass") in.mass_amu = value;
    else if (key == "T_i") in.temperature_K = value;
    else if (key == "lambda") in.wavelength_m = value;
    else if (key == "B") in.rot_const_cm = value;
    else if (key == "v") in.vib_const_cm = value;
    else if (key == "Gamma_e") in.gamma_e = value;
    else if (key == "delta") in.detuning = value;
    else if (key == "dP_vs") in.dp_vs_hk = value;
    else if (key == "tau2") in.tau2 = value;
    else if (key == "eps") in.efficiency = value;
    else if (key == "tau3_mult") in.tau3_multiplier = value;
    else if (key == "Omega0_step2") in.rabi_step2 = value;
    else
      throw ConfigError("estimate override: unknown key '" + key + "'");
  }
  return in;
}

void print_quantity(const std::string& name, double value, const char* unit) {
  std::cout << "  " << std::left << std::setw(16) << name << format_number(value);
  if (*unit) std::cout << ' ' << unit;
  std::cout << '\n';
}

void print_quantity(const std::string& name, std::int64_t value, const char* unit) {
  std::cout << "  " << std::left << std::setw(16) << name << value;
  if (*unit) std::cout << ' ' << unit;
  std::cout << '\n';
}

void print_estimate_table(const EstimateReport& r) {
  std::cout << "inputs\n";
  print_quantity("mass", r.inputs.mass_amu, "amu");
  print_quantity("T_i", r.inputs.temperature_K, "K");
  print_quantity("lambda", r.inputs.wavelength_m, "m");
  print_quantity("B", r.inputs.rot_const_cm, "cm^-1");
  print_quantity("v", r.inputs.vib_const_cm, "cm^-1");
  print_quantity("Gamma_e", r.inputs.gamma_e, "1/s");
  print_quantity("delta", r.inputs.detuning, "1/s");
  print_quantity("dP_vs", r.inputs.dp_vs_hk, "hbar*k");
  print_quantity("tau2", r.inputs.tau2, "s");
  print_quantity("eps", r.inputs.efficiency, "");
  print_quantity("tau3_mult", r.inputs.tau3_multiplier, "");
  print_quantity("Omega0_step2", r.inputs.rabi_step2, "1/s");

  std::cout << "selection\n";
  print_quantity("omega_r", r.selection.omega_r, "1/s");
  print_quantity("T_vs", r.selection.t_vs, "K");
  print_quantity("tau1", r.selection.tau1, "s");
  print_quantity("Omega0", r.selection.omega0, "1/s");
  print_quantity("P_max", r.selection.p_max_si, "kg m/s");
  print_quantity("P_max_hk", r.selection.p_max_hk, "hbar*k");
  print_quantity("N_max", r.selection.n_max, "");
  print_quantity("N_max_round", r.selection.n_max_round, "");
  print_quantity("t1", r.selection.t1, "s");

  std::cout << "deceleration\n";
  print_quantity("t2", r.deceleration.t2, "s");
  print_quantity("eps_N", r.deceleration.eps_n, "");
  print_quantity("adiabaticity", r.deceleration.adiabaticity, "");
  std::cout << "  " << std::left << std::setw(16) << "adiabatic"
            << (r.deceleration.adiabatic ? "true" : "false") << '\n';

  std::cout << "accumulation\n";
  print_quantity("tau3", r.accumulation.tau3, "s");
  print_quantity("t3", r.accumulation.t3, "s");
  print_quantity("t_cool", r.accumulation.t_cool, "s");

  std::cout << "rotational band\n";
  print_quantity("J_max", r.j_max.continuous, "");
  print_quantity("J_max_lower", static_cast<std::int64_t>(r.j_max.lower), "");
  print_quantity("J_max_upper", static_cast<std::int64_t>(r.j_max.upper), "");

  std::cout << "drift\n";
  print_quantity("argmax_N", r.drift.argmax, "");
  print_quantity("L_max", r.drift.l_max, "m");
  std::cout << "  N, L_N [m]:\n";
  for (const auto& row : r.drift_table)
    std::cout << "    " << std::left << std::setw(8) << row.n << format_number(row.length_m)
              << '\n';

  std::cout << "paper_check\n";
  std::cout << "  " << std::left << std::setw(10) << "name" << std::setw(18) << "value"
            << std::setw(18) << "reference" << "rel_deviation\n";
  for (const auto& row : r.paper_check)
    std::cout << "  " << std::left << std::setw(10) << row.name << std::setw(18)
              << format_number(row.value) << std::setw(18) << format_number(row.reference)
              << format_number(row.deviation) << '\n';
}

nlohmann::json quantity(double value, const char* unit) {
  return {{"value", value}, {"unit", unit}};
}

nlohmann::json estimate_json(const EstimateReport& r) {
  nlohmann::json j;
  j["inputs"] = {{"mass", quantity(r.inputs.mass_amu, "amu")},
                 {"T_i", quantity(r.inputs.temperature_K, "K")},
                 {"lambda", quantity(r.inputs.wavelength_m, "m")},
                 {"B", quantity(r.inputs.rot_const_cm, "cm^-1")},
                 {"v", quantity(r.inputs.vib_const_cm, "cm^-1")},
                 {"Gamma_e", quantity(r.inputs.gamma_e, "1/s")},
                 {"delta", quantity(r.inputs.detuning, "1/s")},
                 {"dP_vs", quantity(r.inputs.dp_vs_hk, "hbar*k")},
                 {"tau2", quantity(r.inputs.tau2, "s")},
                 {"eps", r.inputs.efficiency},
                 {"tau3_mult", r.inputs.tau3_multiplier},
                 {"Omega0_step2", quantity(r.inputs.rabi_step2, "1/s")}};
  j["selection"] = {{"omega_r", quantity(r.selection.omega_r, "1/s")},
                    {"T_vs", quantity(r.selection.t_vs, "K")},
                    {"tau1", quantity(r.selection.tau1, "s")},
                    {"Omega0", quantity(r.selection.omega0, "1/s")},
                    {"P_max", quantity(r.selection.p_max_si, "kg m/s")},
                    {"P_max_hk", quantity(r.selection.p_max_hk, "hbar*k")},
                    {"N_max", r.selection.n_max},
                    {"N_max_round", r.selection.n_max_round},
                    {"t1", quantity(r.selection.t1, "s")}};
  j["deceleration"] = {{"t2", quantity(r.deceleration.t2, "s")},
                       {"eps_N", r.deceleration.eps_n},
                       {"adiabaticity", r.deceleration.adiabaticity},
                       {"adiabatic", r.deceleration.adiabatic}};
  j["accumulation"] = {{"tau3", quantity(r.accumulation.tau3, "s")},
                       {"t3", quantity(r.accumulation.t3, "s")},
                       {"t_cool", quantity(r.accumulation.t_cool, "s")}};
  j["j_max"] = {{"continuous", r.j_max.continuous},
                {"lower", r.j_max.lower},
                {"upper", r.j_max.upper}};
  j["drift"] = {{"argmax_N", r.drift.argmax}, {"L_max", quantity(r.drift.l_max, "m")}};
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : r.drift_table)
    table.push_back({{"N", row.n}, {"L", quantity(row.length_m, "m")}});
  j["drift_table"] = table;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& row : r.paper_check)
    checks.push_back({{"name", row.name},
                      {"value", row.value},
                      {"reference", row.reference},
                      {"deviation", row.deviation}});
  j["paper_check"] = checks;
  return j;
}

int do_estimate(bool as_json, const std::vector<std::string>& overrides) {
  const EstimateReport report = make_report(apply_overrides(overrides));
  if (as_json)
    std::cout << estimate_json(report).dump(2) << '\n';
  else
    print_estimate_table(report);
  return 0;
}

// --------------------------------------------------------------------- run

void print_run_summary(const RunSummary& s) {
  std::cout << "cycles          " << s.cycles << '\n'
            << "samples         " << s.samples << '\n'
            << "initial FWHM    " << format_number(s.initial_fwhm_hk) << " hbar*k\n"
            << "final FWHM      " << format_number(s.final_fwhm_hk) << " hbar*k\n"
            << "final mean      " << format_number(s.final_mean_hk) << " hbar*k\n"
            << "min AL margins  lower " << format_number(s.min_al_lower) << ", upper "
            << format_number(s.min_al_upper) << (s.al_all_pass ? "" : "  [VIOLATED]")
            << '\n'
            << "max overdraft   " << format_number(s.max_overdraft) << '\n'
            << "trace excess    " << format_number(s.max_trace_excess) << '\n'
            << "output          " << s.output_dir.string() << '\n'
            << "duration        " << format_number(s.duration_seconds) << " s\n";
  for (const auto& w : s.warnings) std::cout << "warning: " << w << '\n';
}

int do_run(const std::filesystem::path& config_path) {
  const ScenarioConfig sc = parse_config(config_path);
  const RunSummary summary = execute_scenario(sc, resolved_output_dir(sc), true);
  print_run_summary(summary);
  return 0;
}

// ------------------------------------------------------------------- sweep

int severity_of(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const IoError*>(&e)) return 3;
  return 2;
}

int do_sweep(const std::string& pattern) {
  glob_t matches{};
  const int rc = glob(pattern.c_str(), 0, nullptr, &matches);
  if (rc == GLOB_NOMATCH) {
    globfree(&matches);
    throw ConfigError("sweep: no config matches '" + pattern + "'");
  }
  if (rc != 0) {
    globfree(&matches);
    throw IoError("sweep: glob failed on '" + pattern + "'");
  }
  std::vector<std::filesystem::path> configs;
  for (std::size_t i = 0; i < matches.gl_pathc; ++i) configs.emplace_back(matches.gl_pathv[i]);
  globfree(&matches);

  int worst = 0;
  for (const auto& config : configs) {
    std::cout << "== " << config.string() << '\n';
    try {
      const ScenarioConfig sc = parse_config(config);
      const auto outdir = resolved_output_dir(sc) / config.stem();
      print_run_summary(execute_scenario(sc, outdir, true));
    } catch (const std::exception& e) {
      std::cerr << "failed: " << e.what() << '\n';
      worst = std::max(worst, severity_of(e));
    }
  }
  return worst;
}

// ------------------------------------------------------------------- check

int do_check() {
  const ScenarioConfig sc = default_scenario();
  RunCapture cap;
  const RunSummary s = execute_scenario(sc, ".", false, &cap);

  int failures = 0;
  auto report = [&failures](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << ": " << detail << '\n';
    if (!ok) ++failures;
  };

  report("normalization", std::abs(cap.f_initial.sum() - 1.0) <= 1e-12,
         "|sum f0 - 1| = " + format_number(std::abs(cap.f_initial.sum() - 1.0)));
  report("trace", s.max_trace_excess <= sc.engine.trace_tol,
         "max |trace-1|-overdraft = " + format_number(s.max_trace_excess));
  report("overdraft", s.max_overdraft < 0.02,
         "max clamped mass = " + format_number(s.max_overdraft));
  report("araki_lieb", s.al_all_pass,
         "min margins " + format_number(s.min_al_lower) + " / " +
             format_number(s.min_al_upper));

  // S_cm never rises across a completed cycle
  bool cm_monotone = true;
  double prev_cm = cap.records.front().entropy.s_cm;
  double worst_rise = 0.0;
  for (const auto& r : cap.records)
    if (r.meta.cycle_end) {
      worst_rise = std::max(worst_rise, r.entropy.s_cm - prev_cm);
      cm_monotone = cm_monotone && r.entropy.s_cm <= prev_cm + 1e-12;
      prev_cm = r.entropy.s_cm;
    }
  report("S_cm boundaries", cm_monotone, "worst rise = " + format_number(worst_rise));

  // S_I repeats at consecutive inversion boundaries
  double si_dev = 0.0;
  double prev_si = 0.0;
  bool have_prev = false;
  for (const auto& r : cap.records) {
    if (!r.meta.step_end) continue;
    if (r.meta.step == 1) {
      prev_si = r.entropy.s_internal;
      have_prev = true;
    } else if (r.meta.step == 2 && have_prev) {
      si_dev = std::max(si_dev, std::abs(r.entropy.s_internal - prev_si));
      prev_si = r.entropy.s_internal;
    } else {
      have_prev = false;
    }
  }
  report("S_I inversions", si_dev <= 1e-12, "max boundary dev = " + format_number(si_dev));

  // S_tot holds still outside the decay step
  bool tot_frozen = true;
  double frozen = cap.records.front().entropy.s_total;
  for (const auto& r : cap.records) {
    if (r.meta.step == 3)
      frozen = r.entropy.s_total;
    else if (r.meta.cycle > 0)
      tot_frozen = tot_frozen && r.entropy.s_total == frozen;
  }
  report("S_tot freeze", tot_frozen, "exact equality outside step 3");

  // kick oracle: one inversion shifts the slice by exactly 2 hbar*k
  CoolingEngine<double> probe(sc.engine);
  const auto f1 = probe.at_step1(1, sc.engine.tau1);
  const auto f2 = probe.at_step2(1, 1, sc.engine.tau2);
  const Index shift = static_cast<Index>(2 * sc.engine.resolution);
  double kick_dev = 0.0;
  const auto& src = f1.pop[StateSet::g_plus];
  const auto& dst = f2.pop[StateSet::g_minus];
  for (Index i = 0; i + shift < src.size(); ++i)
    kick_dev = std::max(kick_dev, std::abs(dst[i] - src[i + shift]));
  report("kick oracle", kick_dev <= 1e-12, "max shift dev = " + format_number(kick_dev));

  // decay conserves slice mass between d and the acc channels
  const int n_max1 = probe.schedule().cycles.front().n_max;
  const auto f2e = probe.at_step2(1, n_max1, sc.engine.tau2);
  const double slice_mass = f2e.pop[n_max1 % 2 == 1 ? StateSet::g_minus : StateSet::g_plus].sum();
  const auto f3 = probe.at_step3(1, sc.engine.tau3 / 3.0);
  double decay_mass = f3.pop[StateSet::decaying].sum();
  for (int jj = 0; jj < f3.states.n_acc; ++jj)
    decay_mass += f3.pop[static_cast<std::size_t>(f3.states.acc(jj))].sum();
  report("mass balance", std::abs(decay_mass - slice_mass) <= 1e-12,
         "|d+acc-slice| = " + format_number(std::abs(decay_mass - slice_mass)));

  report("final width", s.final_fwhm_hk >= 1.5 && s.final_fwhm_hk <= 3.0 &&
                            std::abs(s.final_mean_hk) <= 0.25,
         "FWHM " + format_number(s.final_fwhm_hk) + " hbar*k, mean " +
             format_number(s.final_mean_hk) + " (initial FWHM " +
             format_number(s.initial_fwhm_hk) + ")");

  std::cout << (failures == 0 ? "all checks passed" : "checks FAILED") << " ("
            << format_number(s.duration_seconds) << " s, " << s.samples << " samples)\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-step molecular momentum cooling: simulator and estimator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario config and write data files");
  run_cmd->add_option("config", config_path, "scenario config file")->required();

  bool as_json = false;
  std::vector<std::string> overrides;
  auto* est_cmd = app.add_subcommand("estimate", "print the engineering-estimate report");
  est_cmd->add_flag("--json", as_json, "emit JSON instead of a table");
  est_cmd->add_option("overrides", overrides, "key=value input overrides");

  std::string pattern;
  auto* sweep_cmd = app.add_subcommand("sweep", "run every config matching a glob pattern");
  sweep_cmd->add_option("pattern", pattern, "config file glob")->required();

  auto* check_cmd = app.add_subcommand("check", "run the invariant suite on the default scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return do_run(config_path);
    if (est_cmd->parsed()) return do_estimate(as_json, overrides);
    if (sweep_cmd->parsed()) return do_sweep(pattern);
    if (check_cmd->parsed()) return do_check();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n'
              << "warning: output may be incomplete\n";
    return 3;
  } catch (const ModelError& e) {
    std::cerr << "model violation: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
