#pragma once

#include <string>
#include <vector>

#include "molcool/errors.hpp"
#include "molcool/grid.hpp"

namespace molcool {

// Internal levels: three Raman ground states, the excited state (never
// populated in this model), the decaying state and M_acc accumulation states.
struct StateSet {
  int n_acc = 1;

  static constexpr int g0 = 0;
  static constexpr int g_plus = 1;
  static constexpr int g_minus = 2;
  static constexpr int excited = 3;
  static constexpr int decaying = 4;
  int acc(int j) const {  // j in [0, n_acc)
    if (j < 0 || j >= n_acc) throw ConfigError("StateSet: acc index out of range");
    return 5 + j;
  }
  int count() const { return 5 + n_acc; }

  std::string name(int a) const {
    switch (a) {
      case g0: return "g0";
      case g_plus: return "g_plus";
      case g_minus: return "g_minus";
      case excited: return "e";
      case decaying: return "d";
      default: return "acc" + std::to_string(a - 4);  // acc1..accM
    }
  }
};

// Spontaneous-decay branching out of the decaying state: Franck-Condon
// fractions F_j (sum 1), per-channel rates, and the emitted photon wavenumber
// in units of the cooling k.
template <class Scalar = double>
struct DecayLadder {
  ArrayX<Scalar> branching;  // F_j
  ArrayX<Scalar> rates;      // Gamma_j, 1/s
  Scalar k_a = Scalar(1);

  static DecayLadder logarithmic(int channels, Scalar gamma, Scalar k_a = Scalar(1)) {
    if (channels < 1) throw ConfigError("DecayLadder: need at least one channel");
    if (!(gamma > Scalar(0))) throw ConfigError("DecayLadder: gamma must be > 0");
    DecayLadder l;
    l.branching = ArrayX<Scalar>(channels);
    for (int j = 0; j < channels; ++j) l.branching[j] = std::pow(Scalar(0.5), Scalar(j));
    l.branching /= l.branching.sum();
    l.rates = ArrayX<Scalar>::Constant(channels, gamma);
    l.k_a = k_a;
    return l;
  }

  static DecayLadder explicit_fractions(const std::vector<Scalar>& fractions, Scalar gamma,
                                        Scalar k_a = Scalar(1)) {
    if (fractions.empty()) throw ConfigError("DecayLadder: need at least one channel");
    DecayLadder l;
    l.branching = Eigen::Map<const ArrayX<Scalar>>(fractions.data(),
                                                   static_cast<Index>(fractions.size()));
    if ((l.branching < Scalar(0)).any())
      throw ConfigError("DecayLadder: branching fractions must be >= 0");
    const Scalar total = l.branching.sum();
    if (std::abs(static_cast<double>(total) - 1.0) > 1e-9)
      throw ConfigError("DecayLadder: branching fractions sum to " +
                        std::to_string(static_cast<double>(total)) + ", expected 1");
    l.branching /= total;
    if (!(gamma > Scalar(0))) throw ConfigError("DecayLadder: gamma must be > 0");
    l.rates = ArrayX<Scalar>::Constant(l.branching.size(), gamma);
    l.k_a = k_a;
    return l;
  }

  int channels() const { return static_cast<int>(branching.size()); }

  void validate() const {
    if (branching.size() == 0 || branching.size() != rates.size())
      throw ConfigError("DecayLadder: branching/rates size mismatch");
    if ((branching < Scalar(0)).any())
      throw ConfigError("DecayLadder: branching fractions must be >= 0");
    if (std::abs(static_cast<double>(branching.sum()) - 1.0) > 1e-9)
      throw ConfigError("DecayLadder: branching fractions must sum to 1");
    if (!(rates > Scalar(0)).all()) throw ConfigError("DecayLadder: rates must be > 0");
    if (!(k_a > Scalar(0))) throw ConfigError("DecayLadder: k_a must be > 0");
  }
};

// Diagonal momentum populations per internal state on a shared grid.
template <class Scalar = double>
struct PopulationField {
  MomentumGrid<Scalar> grid;
  StateSet states;
  std::vector<ArrayX<Scalar>> pop;  // one array per state, mass per cell
  Scalar time = Scalar(0);          // global time, s
  Scalar overdraft = Scalar(0);     // cumulative clamped negative mass

  static PopulationField empty(const MomentumGrid<Scalar>& grid, const StateSet& states) {
    PopulationField f;
    f.grid = grid;
    f.states = states;
    f.pop.assign(static_cast<std::size_t>(states.count()),
                 ArrayX<Scalar>::Zero(grid.size()));
    return f;
  }

  Scalar trace() const {
    Scalar t = Scalar(0);
    for (const auto& a : pop) t += a.sum();
    return t;
  }
};

}  // namespace molcool
