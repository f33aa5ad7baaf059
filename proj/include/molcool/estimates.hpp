#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace molcool {

// Inputs for the engineering estimates. SI except where noted.
struct PhysicalInputs {
  double mass_amu = 100.0;
  double temperature_K = 1.0;
  double wavelength_m = 300e-9;
  double rot_const_cm = 0.1;     // rotational constant B, cm^-1
  double vib_const_cm = 1000.0;  // vibrational constant, cm^-1
  double gamma_e = 1e7;          // excited-state decay rate, 1/s
  double detuning = -5e8;        // optical detuning, 1/s, signed
  double dp_vs_hk = 2.0;         // velocity-selection pitch, hbar*k
  double tau2 = 1e-8;            // s
  double efficiency = 0.9995;    // per-inversion STIRAP efficiency
  double tau3_multiplier = 10.0;
  double rabi_step2 = 5e9;       // STIRAP peak Rabi frequency, 1/s

  void validate() const;
};

struct SelectionEstimates {
  double omega_r = 0.0;  // recoil frequency, 1/s
  double t_vs = 0.0;     // selection temperature, K
  double tau1 = 0.0;     // s
  double omega0 = 0.0;   // Blackman peak Rabi, 1/s
  double p_max_si = 0.0;
  double p_max_hk = 0.0;
  std::int64_t n_max = 0;        // round(2 P_max / dP_vs)
  std::int64_t n_max_round = 0;  // same, rounded to one significant figure
  double t1 = 0.0;               // n_max_round * tau1, s
};

struct DecelerationEstimates {
  double t2 = 0.0;     // s
  double eps_n = 0.0;  // efficiency^n_max
  double adiabaticity = 0.0;  // tau2 * rabi_step2
  bool adiabatic = false;     // >= 50
};

struct AccumulationEstimates {
  double tau3 = 0.0;    // s
  double t3 = 0.0;      // s
  double t_cool = 0.0;  // t1 + t2 + t3, s
};

struct JmaxEstimate {
  double continuous = 0.0;
  int lower = 0;
  int upper = 0;
};

struct DriftScan {
  std::int64_t argmax = 0;
  double l_max = 0.0;  // m
};

double rovib_weight(int n, int j, const PhysicalInputs& in);
JmaxEstimate jmax(const PhysicalInputs& in);
SelectionEstimates selection_estimates(const PhysicalInputs& in);
DecelerationEstimates deceleration_estimates(const PhysicalInputs& in, std::int64_t n_max);
AccumulationEstimates accumulation_estimates(const PhysicalInputs& in, std::int64_t n_max,
                                             double t1, double t2);
// drift length before cycle N gets its turn, meters
double drift_distance(std::int64_t n, const PhysicalInputs& in, std::int64_t n_max);
DriftScan drift_argmax(const PhysicalInputs& in, std::int64_t n_max);

// closed-form t2 cross-check
double deceleration_time_summed(double tau2, std::int64_t n_max);

struct PaperCheckRow {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double deviation = 0.0;  // relative
};

struct DriftRow {
  std::int64_t n = 0;
  double length_m = 0.0;
};

struct EstimateReport {
  PhysicalInputs inputs;
  SelectionEstimates selection;
  DecelerationEstimates deceleration;
  AccumulationEstimates accumulation;
  JmaxEstimate j_max;
  DriftScan drift;
  std::vector<DriftRow> drift_table;
  std::vector<PaperCheckRow> paper_check;
};

EstimateReport make_report(const PhysicalInputs& in);

}  // namespace molcool
