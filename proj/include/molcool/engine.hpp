#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "molcool/errors.hpp"
#include "molcool/field.hpp"
#include "molcool/grid.hpp"
#include "molcool/schedule.hpp"

namespace molcool {

struct SnapshotMeta {
  int cycle = 0;    // 0 = initial state
  int step = 0;     // 1..3
  int substep = 0;  // step 2 only, 1..n_max
  double t_in_step = 0.0;
  double t_global = 0.0;
  double step_phase = 0.0;  // t_in_step / step duration
  double fig_phase = 0.0;   // (cycle-1) + (step-1 + within-step fraction)/3
  bool step_end = false;
  bool cycle_end = false;
};

// Closed-form three-step cooling cycle over a shared momentum grid.
//
// step 1: a sin^2 ramp moves the slice V_N = W(P_N) exp(-(P-P_N)^2/sigma_vsel^2)
//         from g0 to g+ with a 1 hbar*k kick toward zero.
// step 2: n_max Raman inversions swap the slice between g+ and g- with a
//         2 hbar*k kick each, width preserved.
// step 3: the decelerated slice decays from d into the acc channels with
//         branching F_j and recoil-broadened width sigma_acc, centered at 0.
//
// Cycles advance strictly forward; querying an earlier cycle is an error.
template <class Scalar = double>
class CoolingEngine {
 public:
  explicit CoolingEngine(CoolingConfig<Scalar> config)
      : cfg_(std::move(config)), schedule_(build_schedule(cfg_)) {
    grid_ = MomentumGrid<Scalar>::build(cfg_.effective_half_span(), cfg_.resolution);
    w_ = gibbs_weights(grid_, cfg_.sigma).values;
    prior_ = ArrayX<Scalar>::Zero(grid_.size());
    states_.n_acc = cfg_.ladder.channels();
    acc_base_.assign(static_cast<std::size_t>(states_.n_acc),
                     ArrayX<Scalar>::Zero(grid_.size()));
    sigma_acc_ = accumulated_width(cfg_.sigma_vsel, cfg_.ladder.k_a);
    auto g = gaussian_slice(grid_, Scalar(0), sigma_acc_, Scalar(1));
    acc_unit_ = g.values / g.values.sum();
    for (const auto& c : schedule_.cycles) {
      if (!grid_.contains(c.center))
        throw ConfigError("CoolingEngine: slice center " +
                          std::to_string(static_cast<double>(c.center)) +
                          " outside the grid");
    }
  }

  const MomentumGrid<Scalar>& grid() const { return grid_; }
  const CycleSchedule<Scalar>& schedule() const { return schedule_; }
  const CoolingConfig<Scalar>& config() const { return cfg_; }
  const StateSet& states() const { return states_; }
  Scalar sigma_acc() const { return sigma_acc_; }
  const ArrayX<Scalar>& thermal_weights() const { return w_; }

  Scalar cycle_duration(int cycle) const {
    const auto& c = spec(cycle);
    return cfg_.tau1 + Scalar(c.n_max) * cfg_.tau2 + cfg_.tau3;
  }

  PopulationField<Scalar> initial() const {
    auto f = PopulationField<Scalar>::empty(grid_, states_);
    f.pop[StateSet::g0] = w_;
    return f;
  }

  PopulationField<Scalar> at_step1(int cycle, Scalar t1) {
    require_time(t1, cfg_.tau1, "step1");
    enter(cycle);
    const Scalar h1 = ramp(t1, cfg_.tau1);
    auto f = base_field();
    fill_g0(f, h1);
    f.pop[StateSet::g_plus] =
        h1 * gaussian_slice(grid_, ctx_.center - Scalar(ctx_.alpha), cfg_.sigma_vsel,
                            ctx_.amplitude)
                 .values;
    f.time = cycle_start_ + t1;
    return f;
  }

  PopulationField<Scalar> at_step2(int cycle, int substep, Scalar t2) {
    require_time(t2, cfg_.tau2, "step2");
    enter(cycle);
    if (substep < 1 || substep > ctx_.n_max)
      throw ModelError("step2: substep " + std::to_string(substep) +
                       " out of range 1.." + std::to_string(ctx_.n_max) + " in cycle " +
                       std::to_string(cycle));
    const Scalar h2 = ramp(t2, cfg_.tau2);
    const Scalar from = ctx_.center - Scalar(ctx_.alpha) * Scalar(1 + 2 * (substep - 1));
    const Scalar to = ctx_.center - Scalar(ctx_.alpha) * Scalar(1 + 2 * substep);
    auto f = base_field();
    fill_g0(f, Scalar(1));
    ArrayX<Scalar> dest =
        h2 * gaussian_slice(grid_, to, cfg_.sigma_vsel, ctx_.amplitude).values;
    ArrayX<Scalar> src =
        (Scalar(1) - h2) * gaussian_slice(grid_, from, cfg_.sigma_vsel, ctx_.amplitude).values;
    // odd substeps fill g-, even ones fill g+
    if (substep % 2 == 1) {
      f.pop[StateSet::g_minus] = std::move(dest);
      f.pop[StateSet::g_plus] = std::move(src);
    } else {
      f.pop[StateSet::g_plus] = std::move(dest);
      f.pop[StateSet::g_minus] = std::move(src);
    }
    f.time = cycle_start_ + cfg_.tau1 + Scalar(substep - 1) * cfg_.tau2 + t2;
    return f;
  }

  PopulationField<Scalar> at_step3(int cycle, Scalar t3) {
    require_time(t3, cfg_.tau3, "step3");
    enter(cycle);
    auto f = base_field();
    fill_g0(f, Scalar(1));
    Scalar surviving = Scalar(0);
    for (int j = 0; j < states_.n_acc; ++j) {
      const Scalar decayed = -std::expm1(-cfg_.ladder.rates[j] * t3);  // 1 - e^-Gt
      surviving += cfg_.ladder.branching[j] * (Scalar(1) - decayed);
      f.pop[states_.acc(j)] =
          acc_base_[static_cast<std::size_t>(j)] +
          cfg_.ladder.branching[j] * decayed * ctx_.slice_mass * acc_unit_;
    }
    f.pop[StateSet::decaying] = surviving * ctx_.d0;
    f.time = cycle_start_ + cfg_.tau1 + Scalar(ctx_.n_max) * cfg_.tau2 + t3;
    return f;
  }

  // Runs every cycle in order, emitting the configured samples per step.
  // Aborts if the trace drifts beyond trace_tol + overdraft.
  void run(const std::function<void(const SnapshotMeta&, const PopulationField<Scalar>&)>&
               sink) {
    SnapshotMeta meta;
    emit(sink, meta, initial());
    for (int n = 1; n <= schedule_.count(); ++n) {
      const auto& c = schedule_.cycles[static_cast<std::size_t>(n - 1)];
      meta.cycle = n;
      meta.step = 1;
      meta.substep = 0;
      for (int s = 1; s <= cfg_.samples_step1; ++s) {
        const Scalar t = cfg_.tau1 * Scalar(s) / Scalar(cfg_.samples_step1);
        fill_meta(meta, n, 1, 0, t, cfg_.tau1, s == cfg_.samples_step1, false, c.n_max);
        emit(sink, meta, at_step1(n, t));
      }
      meta.step = 2;
      for (int sub = 1; sub <= c.n_max; ++sub) {
        for (int s = 1; s <= cfg_.samples_step2; ++s) {
          const Scalar t = cfg_.tau2 * Scalar(s) / Scalar(cfg_.samples_step2);
          fill_meta(meta, n, 2, sub, t, cfg_.tau2, s == cfg_.samples_step2, false,
                    c.n_max);
          emit(sink, meta, at_step2(n, sub, t));
        }
      }
      meta.step = 3;
      for (int s = 1; s <= cfg_.samples_step3; ++s) {
        const Scalar t = cfg_.tau3 * Scalar(s) / Scalar(cfg_.samples_step3);
        fill_meta(meta, n, 3, 0, t, cfg_.tau3, s == cfg_.samples_step3,
                  s == cfg_.samples_step3, c.n_max);
        emit(sink, meta, at_step3(n, t));
      }
      close_cycle(n);
    }
  }

  // Flushes the decay residue into the acc channels and retires the cycle.
  void close_cycle(int cycle) {
    enter(cycle);
    for (int j = 0; j < states_.n_acc; ++j)
      acc_base_[static_cast<std::size_t>(j)] +=
          cfg_.ladder.branching[j] * ctx_.slice_mass * acc_unit_;
    prior_ += ctx_.vsel;
    cycle_start_ += cycle_duration(cycle);
    closed_ = current_;
  }

  // State between cycles: the surviving g0 reservoir plus everything flushed
  // into the acc channels so far.
  PopulationField<Scalar> final_field() const {
    auto f = PopulationField<Scalar>::empty(grid_, states_);
    for (int j = 0; j < states_.n_acc; ++j)
      f.pop[states_.acc(j)] = acc_base_[static_cast<std::size_t>(j)];
    ArrayX<Scalar> raw = w_ - prior_;
    f.pop[StateSet::g0] = raw.max(Scalar(0));
    f.overdraft = f.pop[StateSet::g0].sum() - raw.sum();
    f.time = cycle_start_;
    return f;
  }

  Scalar overdraft() const { return last_overdraft_; }

 private:
  struct CycleContext {
    Scalar center = Scalar(0);
    int alpha = 1;
    int n_max = 0;
    Scalar amplitude = Scalar(0);
    ArrayX<Scalar> vsel;        // full selected slice at P_N
    ArrayX<Scalar> d0;          // decelerated slice entering step 3
    Scalar slice_mass = Scalar(0);
  };

  const CycleSpec<Scalar>& spec(int cycle) const {
    if (cycle < 1 || cycle > schedule_.count())
      throw ConfigError("CoolingEngine: cycle " + std::to_string(cycle) +
                        " outside schedule of " + std::to_string(schedule_.count()));
    return schedule_.cycles[static_cast<std::size_t>(cycle - 1)];
  }

  static Scalar ramp(Scalar t, Scalar tau) {
    const Scalar s = std::sin(Scalar(M_PI) * t / (Scalar(2) * tau));
    return s * s;
  }

  void require_time(Scalar t, Scalar tau, const char* where) const {
    if (t < Scalar(0) || t > tau)
      throw ModelError(std::string(where) + ": time " +
                       std::to_string(static_cast<double>(t)) + " outside [0, " +
                       std::to_string(static_cast<double>(tau)) + "]");
  }

  void enter(int cycle) {
    spec(cycle);
    if (cycle < current_)
      throw ConfigError("CoolingEngine: cycle " + std::to_string(cycle) +
                        " already completed (engine is forward-only)");
    while (current_ < cycle) {
      if (current_ >= 1 && closed_ < current_) close_cycle(current_);
      ++current_;
      const auto& c = spec(current_);
      ctx_.center = c.center;
      ctx_.alpha = c.alpha;
      ctx_.n_max = c.n_max;
      ctx_.amplitude = w_[grid_.index_of(c.center)];
      ctx_.vsel = gaussian_slice(grid_, c.center, cfg_.sigma_vsel, ctx_.amplitude).values;
      const Scalar final_center =
          c.center - Scalar(c.alpha) * Scalar(1 + 2 * c.n_max);
      ctx_.d0 = gaussian_slice(grid_, final_center, cfg_.sigma_vsel, ctx_.amplitude).values;
      ctx_.slice_mass = ctx_.d0.sum();
    }
  }

  PopulationField<Scalar> base_field() {
    auto f = PopulationField<Scalar>::empty(grid_, states_);
    for (int j = 0; j < states_.n_acc; ++j)
      f.pop[states_.acc(j)] = acc_base_[static_cast<std::size_t>(j)];
    return f;
  }

  // g0 = clamp(W - prior - h1*V_N); the clamped mass is the overdraft
  void fill_g0(PopulationField<Scalar>& f, Scalar h1) {
    ArrayX<Scalar> raw = w_ - prior_ - h1 * ctx_.vsel;
    f.pop[StateSet::g0] = raw.max(Scalar(0));
    f.overdraft = f.pop[StateSet::g0].sum() - raw.sum();
    last_overdraft_ = f.overdraft;
  }

  void fill_meta(SnapshotMeta& m, int cycle, int step, int substep, Scalar t, Scalar tau,
                 bool step_end, bool cycle_end, int n_max) const {
    m.cycle = cycle;
    m.step = step;
    m.substep = substep;
    m.t_in_step = static_cast<double>(t);
    m.t_global = static_cast<double>(cycle_start_) + elapsed_in_cycle(step, substep, t, n_max);
    m.step_phase = static_cast<double>(t / tau);
    double frac = m.step_phase;
    if (step == 2 && n_max > 0)
      frac = (static_cast<double>(substep - 1) + m.step_phase) / n_max;
    m.fig_phase = (cycle - 1) + (step - 1 + frac) / 3.0;
    m.step_end = step_end;
    m.cycle_end = cycle_end;
  }

  double elapsed_in_cycle(int step, int substep, Scalar t, int n_max) const {
    double e = static_cast<double>(t);
    if (step >= 2) e += static_cast<double>(cfg_.tau1);
    if (step == 2) e += static_cast<double>(cfg_.tau2) * (substep - 1);
    if (step == 3) e += static_cast<double>(cfg_.tau2) * n_max;
    return e;
  }

  void emit(const std::function<void(const SnapshotMeta&, const PopulationField<Scalar>&)>&
                sink,
            const SnapshotMeta& meta, const PopulationField<Scalar>& f) const {
    const Scalar dev = std::abs(f.trace() - Scalar(1));
    if (dev > cfg_.trace_tol + f.overdraft)
      throw ModelError("trace deviation " + std::to_string(static_cast<double>(dev)) +
                       " beyond tolerance at cycle " + std::to_string(meta.cycle) +
                       " step " + std::to_string(meta.step));
    sink(meta, f);
  }

  CoolingConfig<Scalar> cfg_;
  CycleSchedule<Scalar> schedule_;
  MomentumGrid<Scalar> grid_;
  StateSet states_;
  ArrayX<Scalar> w_;
  ArrayX<Scalar> prior_;
  ArrayX<Scalar> acc_unit_;
  std::vector<ArrayX<Scalar>> acc_base_;
  Scalar sigma_acc_ = Scalar(0);
  CycleContext ctx_;
  Scalar cycle_start_ = Scalar(0);
  Scalar last_overdraft_ = Scalar(0);
  int current_ = 0;  // cycle whose context is loaded
  int closed_ = 0;   // last cycle flushed
};

}  // namespace molcool
