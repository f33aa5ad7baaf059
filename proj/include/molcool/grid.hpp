#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>

#include "molcool/constants.hpp"
#include "molcool/errors.hpp"

namespace molcool {

template <class Scalar = double>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Gaussians are evaluated on a window of this many 1/e half-widths around the
// center; the tail beyond it (< erfc(8) ~ 1e-29 of the mass) is exactly zero.
inline constexpr double slice_window_widths = 8.0;

// Uniform momentum axis in units of hbar*k, symmetric about zero. The spacing
// is 1/resolution with integer resolution, so every 1 or 2 hbar*k photon kick
// is an exact integer index shift.
template <class Scalar = double>
class MomentumGrid {
 public:
  MomentumGrid() = default;

  static MomentumGrid build(Scalar half_span_hk, int resolution) {
    if (!(half_span_hk > Scalar(0)))
      throw ConfigError("build_grid: half_span must be > 0 (got " +
                        std::to_string(static_cast<double>(half_span_hk)) + ")");
    if (resolution < 1)
      throw ConfigError("build_grid: resolution must be >= 1 (got " +
                        std::to_string(resolution) + ")");
    const Scalar cells = half_span_hk * Scalar(resolution);
    const auto rounded = static_cast<std::int64_t>(std::llround(static_cast<double>(cells)));
    if (std::abs(static_cast<double>(cells) - static_cast<double>(rounded)) > 1e-9)
      throw ConfigError("build_grid: half_span*resolution = " +
                        std::to_string(static_cast<double>(cells)) +
                        " is not an integer; grid does not close");
    MomentumGrid g;
    g.resolution_ = resolution;
    g.half_cells_ = rounded;
    return g;
  }

  int resolution() const { return resolution_; }
  Scalar spacing() const { return Scalar(1) / Scalar(resolution_); }
  Scalar half_span() const { return Scalar(half_cells_) * spacing(); }
  std::int64_t half_cells() const { return half_cells_; }
  Index size() const { return static_cast<Index>(2 * half_cells_ + 1); }
  Index center_index() const { return static_cast<Index>(half_cells_); }

  Scalar point(Index i) const {
    return Scalar(static_cast<std::int64_t>(i) - half_cells_) / Scalar(resolution_);
  }

  ArrayX<Scalar> points() const {
    return ArrayX<Scalar>::LinSpaced(size(), Scalar(-half_cells_), Scalar(half_cells_)) /
           Scalar(resolution_);
  }

  // nearest cell index; exact for lattice momenta
  Index index_of(Scalar p_hk) const {
    const auto cell = static_cast<std::int64_t>(
        std::llround(static_cast<double>(p_hk * Scalar(resolution_))));
    return static_cast<Index>(cell + half_cells_);
  }

  bool contains(Scalar p_hk) const {
    const Index i = index_of(p_hk);
    return i >= 0 && i < size();
  }

  bool on_lattice(Scalar p_hk) const {
    const double cells = static_cast<double>(p_hk * Scalar(resolution_));
    return std::abs(cells - std::llround(cells)) <= 1e-9;
  }

  friend bool operator==(const MomentumGrid& a, const MomentumGrid& b) = default;

 private:
  int resolution_ = 1;
  std::int64_t half_cells_ = 0;
};

// Probability mass per cell over a shared grid. Not necessarily normalized;
// a full system state sums to 1.
template <class Scalar = double>
struct Distribution {
  MomentumGrid<Scalar> grid;
  ArrayX<Scalar> values;

  Scalar mass() const { return values.sum(); }
};

struct ThermalSpec {
  double mass_kg = 0.0;
  double temperature_K = 0.0;
};

struct ThermalMomentum {
  double si = 0.0;  // kg m/s
  double hk = 0.0;  // units of hbar*k
};

// hbar*k at the cooling wavelength, k = 2 pi / lambda
inline double hk_momentum(double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw ConfigError("hk_momentum: wavelength must be > 0");
  return constants::hbar * (2.0 * M_PI / wavelength_m);
}

inline double momentum_to_hk(double p_si, double wavelength_m) {
  return p_si / hk_momentum(wavelength_m);
}

inline double momentum_to_si(double p_hk, double wavelength_m) {
  return p_hk * hk_momentum(wavelength_m);
}

// sigma = sqrt(2 M kB T), the thermal 1/e momentum half-width
inline ThermalMomentum thermal_width(const ThermalSpec& spec, double wavelength_m) {
  if (!(spec.mass_kg > 0.0)) throw ConfigError("thermal_width: mass must be > 0");
  if (!(spec.temperature_K > 0.0))
    throw ConfigError("thermal_width: temperature must be > 0");
  ThermalMomentum out;
  out.si = std::sqrt(2.0 * spec.mass_kg * constants::k_boltzmann * spec.temperature_K);
  out.hk = momentum_to_hk(out.si, wavelength_m);
  return out;
}

// W(P) = exp(-P^2/sigma^2) / Z, renormalized on the discrete grid.
// Callers provide half_span >= 5*sigma; enforced at scenario construction.
template <class Scalar>
Distribution<Scalar> gibbs_weights(const MomentumGrid<Scalar>& grid, Scalar sigma) {
  if (!(sigma > Scalar(0))) throw ConfigError("gibbs_weights: sigma must be > 0");
  Distribution<Scalar> d{grid, ArrayX<Scalar>(grid.size())};
  // one half evaluated, then mirrored: vectorized exp can differ from the
  // scalar remainder by an ulp, which would break exact evenness in P
  for (Index i = 0; i <= grid.center_index(); ++i) {
    const Scalar x = grid.point(i) / sigma;
    const Scalar v = std::exp(-x * x);
    d.values[i] = v;
    d.values[grid.size() - 1 - i] = v;
  }
  d.values /= d.values.sum();
  return d;
}

// amplitude * exp(-(P - center)^2 / width^2), evaluated by cell offset from the
// nearest cell to `center` so that lattice-centered slices are exact index
// shifts of each other. Unnormalized.
template <class Scalar>
Distribution<Scalar> gaussian_slice(const MomentumGrid<Scalar>& grid, Scalar center,
                                    Scalar width, Scalar amplitude) {
  if (!(width > Scalar(0))) throw ConfigError("gaussian_slice: width must be > 0");
  if (amplitude < Scalar(0)) throw ConfigError("gaussian_slice: amplitude must be >= 0");
  Distribution<Scalar> d{grid, ArrayX<Scalar>::Zero(grid.size())};
  const Scalar cells = center * Scalar(grid.resolution());
  const auto ci = static_cast<std::int64_t>(std::llround(static_cast<double>(cells)));
  const Scalar frac = cells - Scalar(ci);  // exactly 0 for lattice centers
  const auto hw = static_cast<std::int64_t>(
      std::ceil(slice_window_widths * static_cast<double>(width) * grid.resolution()));
  const std::int64_t lo = std::max<std::int64_t>(0, ci + grid.half_cells() - hw);
  const std::int64_t hi =
      std::min<std::int64_t>(grid.size() - 1, ci + grid.half_cells() + hw);
  const Scalar inv = Scalar(1) / (width * Scalar(grid.resolution()));
  for (std::int64_t i = lo; i <= hi; ++i) {
    const Scalar off = (Scalar(i - grid.half_cells() - ci) - frac) * inv;
    d.values[static_cast<Index>(i)] = amplitude * std::exp(-off * off);
  }
  return d;
}

}  // namespace molcool
