#include "molcool/estimates.hpp"

#include <cmath>

#include "molcool/constants.hpp"
#include "molcool/errors.hpp"

namespace molcool {

namespace {

constexpr double pi = 3.14159265358979323846;

double wavenumber(const PhysicalInputs& in) { return 2.0 * pi / in.wavelength_m; }
double mass_kg(const PhysicalInputs& in) { return in.mass_amu * constants::amu; }
double hk(const PhysicalInputs& in) { return constants::hbar * wavenumber(in); }

// cm^-1 to Joule
double cm_energy(double value_cm) {
  return constants::planck * constants::c_light * 100.0 * value_cm;
}

std::int64_t round_to_one_sig_fig(double x) {
  if (x <= 0.0) return 0;
  const double mag = std::pow(10.0, std::floor(std::log10(x)));
  return static_cast<std::int64_t>(std::llround(std::round(x / mag) * mag));
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ConfigError(std::string("estimate inputs: ") + name + " must be > 0");
}

}  // namespace

void PhysicalInputs::validate() const {
  require_positive(mass_amu, "mass");
  require_positive(temperature_K, "T_i");
  require_positive(wavelength_m, "lambda");
  require_positive(rot_const_cm, "B");
  require_positive(vib_const_cm, "v");
  require_positive(gamma_e, "Gamma_e");
  require_positive(dp_vs_hk, "dP_vs");
  require_positive(tau2, "tau2");
  require_positive(tau3_multiplier, "tau3_multiplier");
  require_positive(rabi_step2, "Omega0_step2");
  if (!(efficiency > 0.0) || efficiency > 1.0)
    throw ConfigError("estimate inputs: eps must be in (0, 1]");
  if (detuning >= 0.0)
    throw ConfigError("estimate inputs: delta must be negative (red detuning)");
}

// (2J+1) exp(-(hcB J(J+1) + hcv n) / kB T), unnormalized. Vibrational energy
// is measured from n=0: the zero-point factor is a global constant and keeping
// it would push every weight subnormal at cryogenic T.
double rovib_weight(int n, int j, const PhysicalInputs& in) {
  if (n < 0 || j < 0) throw ConfigError("rovib_weight: n and J must be >= 0");
  const double rot = cm_energy(in.rot_const_cm) * j * (j + 1);
  const double vib = cm_energy(in.vib_const_cm) * n;
  return (2.0 * j + 1.0) *
         std::exp(-(rot + vib) / (constants::k_boltzmann * in.temperature_K));
}

// J_max = sqrt(kB T / 2hcB) - 1/2
JmaxEstimate jmax(const PhysicalInputs& in) {
  in.validate();
  JmaxEstimate r;
  r.continuous = std::sqrt(constants::k_boltzmann * in.temperature_K /
                           (2.0 * cm_energy(in.rot_const_cm))) -
                 0.5;
  r.lower = static_cast<int>(std::max(0.0, std::floor(r.continuous)));
  r.upper = static_cast<int>(std::max(0.0, std::ceil(r.continuous)));
  return r;
}

SelectionEstimates selection_estimates(const PhysicalInputs& in) {
  in.validate();
  SelectionEstimates r;
  const double m = mass_kg(in);
  const double k = wavenumber(in);
  r.omega_r = constants::hbar * k * k / (2.0 * m);
  const double dp_si = in.dp_vs_hk * hk(in);
  r.t_vs = dp_si * dp_si / (2.0 * m * constants::k_boltzmann);
  r.tau1 = 15.0 * m / (k * dp_si);  // = 15/(4 omega_r) at dP_vs = 2 hbar*k
  r.omega0 = std::sqrt(-in.detuning * pi / (r.tau1 * 0.61));
  r.p_max_si = std::sqrt(2.0 * m * constants::k_boltzmann * in.temperature_K);
  r.p_max_hk = r.p_max_si / hk(in);
  const double n = 2.0 * r.p_max_hk / in.dp_vs_hk;
  r.n_max = std::llround(n);
  r.n_max_round = round_to_one_sig_fig(n);
  r.t1 = static_cast<double>(r.n_max_round) * r.tau1;
  return r;
}

// t2 = 1/2 N(N+1) tau2
DecelerationEstimates deceleration_estimates(const PhysicalInputs& in,
                                             std::int64_t n_max) {
  if (n_max < 1) throw ConfigError("deceleration_estimates: n_max must be >= 1");
  DecelerationEstimates r;
  r.t2 = 0.5 * static_cast<double>(n_max) * static_cast<double>(n_max + 1) * in.tau2;
  r.eps_n = std::pow(in.efficiency, static_cast<double>(n_max));
  r.adiabaticity = in.tau2 * in.rabi_step2;
  r.adiabatic = r.adiabaticity >= 50.0;
  return r;
}

double deceleration_time_summed(double tau2, std::int64_t n_max) {
  double t = 0.0;
  for (std::int64_t n = 1; n <= n_max; ++n) t += static_cast<double>(n) * tau2;
  return t;
}

AccumulationEstimates accumulation_estimates(const PhysicalInputs& in, std::int64_t n_max,
                                             double t1, double t2) {
  if (n_max < 1) throw ConfigError("accumulation_estimates: n_max must be >= 1");
  AccumulationEstimates r;
  r.tau3 = in.tau3_multiplier / in.gamma_e;
  r.t3 = static_cast<double>(n_max) * r.tau3;
  r.t_cool = t1 + t2 + r.t3;
  return r;
}

// L_N = N 2 hbar k {1/2 (K-N)(K-N+1) tau2 + (K-N)(tau1+tau3)} / M
double drift_distance(std::int64_t n, const PhysicalInputs& in, std::int64_t n_max) {
  if (n < 1 || n > n_max)
    throw ConfigError("drift_distance: N must be in 1..n_max, got " + std::to_string(n));
  const double tau1 = selection_estimates(in).tau1;
  const double tau3 = in.tau3_multiplier / in.gamma_e;
  const double u = static_cast<double>(n_max - n);
  const double wait = 0.5 * u * (u + 1.0) * in.tau2 + u * (tau1 + tau3);
  return static_cast<double>(n) * 2.0 * hk(in) * wait / mass_kg(in);
}

DriftScan drift_argmax(const PhysicalInputs& in, std::int64_t n_max) {
  const double tau1 = selection_estimates(in).tau1;
  const double tau3 = in.tau3_multiplier / in.gamma_e;
  const double coef = 2.0 * hk(in) / mass_kg(in);
  DriftScan best{0, -1.0};
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double u = static_cast<double>(n_max - n);
    const double l =
        static_cast<double>(n) * coef * (0.5 * u * (u + 1.0) * in.tau2 + u * (tau1 + tau3));
    if (l > best.l_max) best = {n, l};
  }
  return best;
}

EstimateReport make_report(const PhysicalInputs& in) {
  EstimateReport r;
  r.inputs = in;
  r.selection = selection_estimates(in);
  const std::int64_t k = r.selection.n_max_round;
  r.deceleration = deceleration_estimates(in, k);
  r.accumulation = accumulation_estimates(in, k, r.selection.t1, r.deceleration.t2);
  r.j_max = jmax(in);
  r.drift = drift_argmax(in, k);
  const std::int64_t stride = std::max<std::int64_t>(1, k / 20);
  for (std::int64_t n = stride; n <= k; n += stride)
    r.drift_table.push_back({n, drift_distance(n, in, k)});

  auto check = [&](const std::string& name, double value, double reference) {
    r.paper_check.push_back(
        {name, value, reference, std::abs(value - reference) / reference});
  };
  check("tau1", r.selection.tau1, 2.7e-5);
  check("Omega0", r.selection.omega0, 9.8e6);
  check("P_max", r.selection.p_max_hk, 1000.0);
  check("t2", r.deceleration.t2, 5e-3);
  check("eps_N", r.deceleration.eps_n, 0.60);
  check("t_cool", r.accumulation.t_cool, 33e-3);
  return r;
}

}  // namespace molcool
