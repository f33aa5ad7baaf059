#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "molcool/errors.hpp"
#include "molcool/field.hpp"
#include "molcool/grid.hpp"

namespace molcool {

// Engine parameters. Momenta are in hbar*k, times in seconds.
template <class Scalar = double>
struct CoolingConfig {
  Scalar sigma = Scalar(15);       // thermal 1/e half-width
  Scalar dp_vs = Scalar(2);        // slice pitch
  Scalar sigma_vsel = Scalar(1);   // selected-slice 1/e half-width
  Scalar p_start = Scalar(0);      // first slice |center|; 0 -> derive from sigma
  Scalar half_span = Scalar(0);    // 0 -> derive
  int resolution = 10;             // cells per hbar*k

  Scalar tau1 = Scalar(2.7e-5);    // s
  Scalar tau2 = Scalar(1e-8);      // s
  Scalar tau3 = Scalar(1e-6);      // s

  DecayLadder<Scalar> ladder = DecayLadder<Scalar>::logarithmic(10, Scalar(1e7));

  int samples_step1 = 32;
  int samples_step2 = 32;  // per substep
  int samples_step3 = 64;

  Scalar trace_tol = Scalar(1e-6);

  Scalar effective_p_start() const {
    if (p_start > Scalar(0)) return p_start;
    const auto steps = static_cast<std::int64_t>(
        std::floor(static_cast<double>(Scalar(2) * sigma / dp_vs)));
    return steps > 0 ? Scalar(steps) * dp_vs : Scalar(0);
  }

  Scalar effective_half_span() const {
    if (half_span > Scalar(0)) return half_span;
    const Scalar a = Scalar(5) * sigma;
    const Scalar b = effective_p_start() + Scalar(5) * sigma_vsel;
    return std::max(a, b);
  }

  void validate() const {
    if (!(sigma > Scalar(0))) throw ConfigError("CoolingConfig: sigma must be > 0");
    if (!(dp_vs > Scalar(0))) throw ConfigError("CoolingConfig: dp_vs must be > 0");
    if (!(sigma_vsel > Scalar(0)))
      throw ConfigError("CoolingConfig: sigma_vsel must be > 0");
    if (p_start < Scalar(0)) throw ConfigError("CoolingConfig: p_start must be >= 0");
    if (resolution < 1) throw ConfigError("CoolingConfig: resolution must be >= 1");
    if (!(tau1 > Scalar(0) && tau2 > Scalar(0) && tau3 > Scalar(0)))
      throw ConfigError("CoolingConfig: step durations must be > 0");
    if (samples_step1 < 1 || samples_step2 < 1 || samples_step3 < 1)
      throw ConfigError("CoolingConfig: sample counts must be >= 1");
    if (!(trace_tol > Scalar(0))) throw ConfigError("CoolingConfig: trace_tol must be > 0");
    ladder.validate();
    const double res = resolution;
    auto lattice = [&](Scalar v, const char* nm) {
      const double cells = static_cast<double>(v) * res;
      if (std::abs(cells - std::llround(cells)) > 1e-9)
        throw ConfigError(std::string("CoolingConfig: ") + nm +
                          " must sit on the momentum lattice (multiple of 1/resolution)");
    };
    lattice(dp_vs, "dp_vs");
    lattice(effective_p_start(), "p_start");
    lattice(effective_half_span(), "half_span");
  }
};

struct SubstepCount {
  int n_max = 0;
  double residual_hk = 0.0;  // slice center after the last inversion
};

// n_max from P_N/(2 alpha hbar k) - 1/2, rounded to minimize the residual
// |P_N - alpha(1+2n)|; ties prefer fewer substeps.
template <class Scalar>
SubstepCount substep_count(Scalar p_n) {
  if (p_n == Scalar(0)) return {0, 0.0};
  const double p = static_cast<double>(p_n);
  const double alpha = p > 0 ? 1.0 : -1.0;
  const double exact = std::abs(p) / 2.0 - 0.5;
  const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(exact)));
  const auto hi = static_cast<std::int64_t>(std::max(0.0, std::ceil(exact)));
  SubstepCount best{static_cast<int>(lo), p - alpha * (1.0 + 2.0 * static_cast<double>(lo))};
  for (std::int64_t n = lo + 1; n <= hi; ++n) {
    const double r = p - alpha * (1.0 + 2.0 * static_cast<double>(n));
    if (std::abs(r) < std::abs(best.residual_hk) - 1e-12) {
      best = {static_cast<int>(n), r};
    }
  }
  return best;
}

// sigma_acc = sigma_vsel * (1 + 0.5 k_a / sigma_vsel), the recoil-broadened
// width after one spontaneous emission
template <class Scalar>
Scalar accumulated_width(Scalar sigma_vsel, Scalar k_a) {
  if (!(sigma_vsel > Scalar(0)))
    throw ConfigError("accumulated_width: sigma_vsel must be > 0");
  if (k_a < Scalar(0)) throw ConfigError("accumulated_width: k_a must be >= 0");
  return sigma_vsel * (Scalar(1) + Scalar(0.5) * k_a / sigma_vsel);
}

template <class Scalar = double>
struct CycleSpec {
  Scalar center = Scalar(0);  // P_N, hbar*k
  int alpha = 1;              // sign(P_N)
  int n_max = 0;
  Scalar residual = Scalar(0);
};

template <class Scalar = double>
struct CycleSchedule {
  std::vector<CycleSpec<Scalar>> cycles;
  std::vector<std::string> warnings;

  int count() const { return static_cast<int>(cycles.size()); }
};

// Slice centers fastest first, mirrored +/- pairs, stepping down by dp_vs
// until |center| < dp_vs/2.
template <class Scalar>
CycleSchedule<Scalar> build_schedule(const CoolingConfig<Scalar>& config) {
  config.validate();
  CycleSchedule<Scalar> s;
  const Scalar slowest = config.ladder.rates.minCoeff();
  if (config.tau3 * slowest < Scalar(10))
    s.warnings.push_back(
        "tau3 = " + std::to_string(static_cast<double>(config.tau3)) +
        " s is below 10/Gamma_min; a sizable undecayed remainder is flushed into the "
        "acc states at each cycle boundary");
  const Scalar start = config.effective_p_start();
  if (start == Scalar(0)) return s;

  std::vector<Scalar> magnitudes;
  for (Scalar c = start; c >= config.dp_vs / Scalar(2) - Scalar(1e-12); c -= config.dp_vs)
    magnitudes.push_back(c);
  if (magnitudes.empty()) {
    magnitudes.push_back(start);
    s.warnings.push_back("slice pitch dp_vs exceeds 2*p_start; single slice pair at +/-" +
                         std::to_string(static_cast<double>(start)));
  }
  for (Scalar mag : magnitudes) {
    for (int sign : {+1, -1}) {
      CycleSpec<Scalar> c;
      c.center = sign > 0 ? mag : -mag;
      c.alpha = sign;
      const SubstepCount sc = substep_count(c.center);
      c.n_max = sc.n_max;
      c.residual = Scalar(sc.residual_hk);
      s.cycles.push_back(c);
    }
  }
  return s;
}

}  // namespace molcool
