#pragma once

#include <cmath>
#include <string>

#include "molcool/errors.hpp"
#include "molcool/field.hpp"
#include "molcool/grid.hpp"

namespace molcool {

// All entropies are Shannon sums over probability masses, in units of k_B
// (nats); 0 ln 0 contributes 0.

template <class Derived>
typename Derived::Scalar shannon(const Eigen::ArrayBase<Derived>& masses) {
  using Scalar = typename Derived::Scalar;
  Scalar s = Scalar(0);
  for (Index i = 0; i < masses.size(); ++i) {
    const Scalar x = masses[i];
    if (x < Scalar(0))
      throw ModelError("shannon: negative mass at index " + std::to_string(i));
    if (x > Scalar(0)) s -= x * std::log(x);
  }
  return s;
}

// C_a = sum_P rho_aa(P,P), one mass per internal state
template <class Scalar>
ArrayX<Scalar> internal_distribution(const PopulationField<Scalar>& field) {
  ArrayX<Scalar> c(field.states.count());
  for (int a = 0; a < field.states.count(); ++a)
    c[a] = field.pop[static_cast<std::size_t>(a)].sum();
  return c;
}

// f(P) = sum_a rho_aa(P,P)
template <class Scalar>
Distribution<Scalar> cm_distribution(const PopulationField<Scalar>& field) {
  Distribution<Scalar> f{field.grid, ArrayX<Scalar>::Zero(field.grid.size())};
  for (const auto& a : field.pop) f.values += a;
  return f;
}

// Joint Shannon entropy over the (state, P) masses of g0, d and the acc
// channels. Valid only when the coherent states are empty (step-3 snapshots,
// where the total density matrix is diagonal); outside step 3 the engine
// carries the frozen prior value instead.
template <class Scalar>
Scalar total_entropy_step3(const PopulationField<Scalar>& field) {
  const Scalar coherent = field.pop[StateSet::g_plus].sum() +
                          field.pop[StateSet::g_minus].sum() +
                          field.pop[StateSet::excited].sum();
  if (coherent != Scalar(0))
    throw ModelError(
        "total_entropy_step3: Raman/excited states populated; defined only on "
        "step-3 snapshots");
  Scalar s = shannon(field.pop[StateSet::g0]) + shannon(field.pop[StateSet::decaying]);
  for (int j = 0; j < field.states.n_acc; ++j)
    s += shannon(field.pop[static_cast<std::size_t>(field.states.acc(j))]);
  return s;
}

// Emission probability density over polar angle for polarization lambda:
// M_{+-1} = 3/8 (1+cos^2), M_0 = 3/4 sin^2
template <class Scalar>
Scalar angular_density(int lambda, Scalar theta) {
  if (lambda < -1 || lambda > 1)
    throw ConfigError("angular_density: polarization must be -1, 0 or +1");
  if (theta < Scalar(0) || theta > Scalar(M_PI))
    throw ConfigError("angular_density: theta outside [0, pi]");
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  return lambda == 0 ? Scalar(0.75) * s * s : Scalar(0.375) * (Scalar(1) + c * c);
}

enum class RadiationNorm {
  unit_trace,  // divide R by sum_{j,lambda} int R dtheta = 3 sum_j F_j
  raw          // the density as printed, trace 3
};

// S_R = -sum_{j,lambda} int R ln R dtheta with R = F_j M_lambda(theta) sin(theta)
// (globally normalized). The integrand behaves like theta*ln(theta) at the
// endpoints, which ruins plain Simpson, so the log-sine part is integrated in
// closed form and composite Simpson handles the smooth remainder
// -R ln(R / sin^m theta), m = 1 for lambda = +-1 and 3 for lambda = 0.
template <class Scalar>
Scalar radiation_entropy(const DecayLadder<Scalar>& ladder, int theta_nodes,
                         RadiationNorm norm = RadiationNorm::unit_trace) {
  if (theta_nodes < 3 || theta_nodes % 2 == 0)
    throw ConfigError("radiation_entropy: theta_nodes must be odd and >= 3");
  ladder.validate();

  const Scalar ln2 = std::log(Scalar(2));
  // int_0^pi (1+cos^2) sin(t) ln(sin t) dt and int_0^pi sin^3(t) ln(sin t) dt
  const Scalar lnsin_pm = Scalar(8) / Scalar(3) * ln2 - Scalar(26) / Scalar(9);
  const Scalar lnsin_0 = Scalar(4) / Scalar(3) * ln2 - Scalar(10) / Scalar(9);

  const Scalar divisor =
      norm == RadiationNorm::unit_trace ? Scalar(3) * ladder.branching.sum() : Scalar(1);
  const Scalar h = Scalar(M_PI) / Scalar(theta_nodes - 1);

  Scalar total = Scalar(0);
  for (int j = 0; j < ladder.channels(); ++j) {
    const Scalar fj = ladder.branching[j];
    if (fj == Scalar(0)) continue;
    for (int lambda : {-1, 0, +1}) {
      const Scalar coef =
          fj * (lambda == 0 ? Scalar(0.75) : Scalar(0.375)) / divisor;
      // Simpson over g(t) = -R ln(R / sin^m t); the log argument stays positive
      Scalar quad = Scalar(0);
      for (int i = 0; i < theta_nodes; ++i) {
        const Scalar t = h * Scalar(i);
        const Scalar s = std::sin(t);
        const Scalar c = std::cos(t);
        Scalar shape, r;
        if (lambda == 0) {
          shape = coef;
          r = coef * s * s * s;
        } else {
          shape = coef * (Scalar(1) + c * c);
          r = shape * s;
        }
        const Scalar g = -r * std::log(shape);
        const Scalar w = (i == 0 || i == theta_nodes - 1) ? Scalar(1)
                         : (i % 2 == 1)                   ? Scalar(4)
                                                          : Scalar(2);
        quad += w * g;
      }
      quad *= h / Scalar(3);
      const Scalar analytic =
          lambda == 0 ? -coef * Scalar(3) * lnsin_0 : -coef * lnsin_pm;
      total += quad + analytic;
    }
  }
  return total;
}

struct EntropyRecord {
  double time = 0.0;  // s
  int cycle = 0;
  int step = 0;
  double s_internal = 0.0;
  double s_cm = 0.0;
  double s_total = 0.0;
  double s_radiation = 0.0;
  double correlation = 0.0;  // I_C = S_cm + S_I - S_tot
};

struct ArakiLiebResult {
  bool pass = false;
  double lower_margin = 0.0;  // S_tot - |S_I - S_cm|
  double upper_margin = 0.0;  // S_I + S_cm - S_tot
};

// |S_I - S_cm| <= S_tot <= S_I + S_cm must hold at every sample within this
inline constexpr double araki_lieb_tolerance = 1e-9;

inline ArakiLiebResult araki_lieb_check(const EntropyRecord& record, double tol) {
  ArakiLiebResult r;
  r.lower_margin = record.s_total - std::abs(record.s_internal - record.s_cm);
  r.upper_margin = record.s_internal + record.s_cm - record.s_total;
  r.pass = r.lower_margin >= -tol && r.upper_margin >= -tol;
  return r;
}

}  // namespace molcool
