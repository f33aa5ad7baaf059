#include <doctest.h>

#include <cmath>
#include <vector>

#include "molcool/engine.hpp"
#include "molcool/errors.hpp"

using namespace molcool;

namespace {

// Small but structurally complete run: 10 cycles, centers +/-10..2.
CoolingConfig<double> small_config() {
  CoolingConfig<double> c;
  c.sigma = 5.0;
  c.samples_step1 = 4;
  c.samples_step2 = 4;
  c.samples_step3 = 8;
  return c;
}

double mean_of(const MomentumGrid<double>& g, const ArrayX<double>& v) {
  return (g.points() * v).sum() / v.sum();
}

double second_moment(const MomentumGrid<double>& g, const ArrayX<double>& v,
                     double center) {
  return ((g.points() - center).square() * v).sum() / v.sum();
}

}  // namespace

TEST_CASE("initial field is the thermal reservoir") {
  CoolingEngine<double> eng(small_config());
  const auto f = eng.initial();
  CHECK((f.pop[StateSet::g0] - eng.thermal_weights()).abs().maxCoeff() == 0.0);
  CHECK(f.trace() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.pop[StateSet::g_plus].sum() == 0.0);
  CHECK(f.pop[StateSet::decaying].sum() == 0.0);
  for (int j = 0; j < eng.states().n_acc; ++j)
    CHECK(f.pop[eng.states().acc(j)].sum() == 0.0);
}

TEST_CASE("step 1 ramp endpoints and half transfer") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  const auto& g = eng.grid();

  const auto f0 = eng.at_step1(1, 0.0);
  CHECK(f0.pop[StateSet::g_plus].maxCoeff() == 0.0);
  CHECK((f0.pop[StateSet::g0] - eng.thermal_weights()).abs().maxCoeff() == 0.0);

  const auto f1 = eng.at_step1(1, cfg.tau1);
  const double amp = eng.thermal_weights()[g.index_of(10.0)];
  const auto ref = gaussian_slice(g, 9.0, cfg.sigma_vsel, amp).values;
  CHECK((f1.pop[StateSet::g_plus] - ref).abs().maxCoeff() == 0.0);

  CoolingEngine<double> eng2(cfg);
  const auto fh = eng2.at_step1(1, cfg.tau1 / 2);
  CHECK(fh.pop[StateSet::g_plus].sum() ==
        doctest::Approx(ref.sum() / 2).epsilon(1e-12));
  CHECK(std::abs(fh.trace() - 1.0 - fh.overdraft) < 1e-13);
}

TEST_CASE("each inversion shifts the slice by exactly one recoil pair") {
  CoolingConfig<double> cfg;
  cfg.p_start = 21.0;  // odd start: the chain terminates exactly at zero
  CoolingEngine<double> eng(cfg);
  const auto& g = eng.grid();
  const Index shift = 2 * static_cast<Index>(cfg.resolution);

  ArrayX<double> prev = eng.at_step1(1, cfg.tau1).pop[StateSet::g_plus];
  double prev_mean = mean_of(g, prev);
  CHECK(prev_mean == doctest::Approx(20.0).epsilon(1e-12));
  const double width0 = second_moment(g, prev, 20.0);

  REQUIRE(eng.schedule().cycles[0].n_max == 10);
  for (int sub = 1; sub <= 10; ++sub) {
    const auto f = eng.at_step2(1, sub, cfg.tau2);
    const auto& dest = f.pop[sub % 2 == 1 ? StateSet::g_minus : StateSet::g_plus];
    const auto& src = f.pop[sub % 2 == 1 ? StateSet::g_plus : StateSet::g_minus];
    CHECK(src.maxCoeff() == 0.0);  // full transfer at t = tau2
    double dev = 0.0;
    for (Index i = 0; i + shift < g.size(); ++i)
      dev = std::max(dev, std::abs(dest[i] - prev[i + shift]));
    CHECK(dev == 0.0);
    const double c = 20.0 - 2.0 * sub;
    CHECK(std::abs(second_moment(g, dest, c) - width0) < 1e-9 * width0);
    const double m = mean_of(g, dest);
    CHECK(m == doctest::Approx(prev_mean - 2.0).epsilon(1e-9));
    prev = dest;
    prev_mean = m;
  }
  CHECK(std::abs(prev_mean) < 1e-12);
}

TEST_CASE("negative-side cycles shift toward zero from below") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  const auto& g = eng.grid();
  const ArrayX<double> sel = eng.at_step1(2, cfg.tau1).pop[StateSet::g_plus];
  CHECK(mean_of(g, sel) == doctest::Approx(-9.0).epsilon(1e-12));
  const auto f = eng.at_step2(2, 1, cfg.tau2);
  const auto& dest = f.pop[StateSet::g_minus];
  const Index shift = 2 * static_cast<Index>(cfg.resolution);
  double dev = 0.0;
  for (Index i = shift; i < g.size(); ++i)
    dev = std::max(dev, std::abs(dest[i] - sel[i - shift]));
  CHECK(dev == 0.0);
  CHECK(mean_of(g, dest) == doctest::Approx(-7.0).epsilon(1e-9));
}

TEST_CASE("mid-substep the slice is split between both arms") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  const auto f = eng.at_step2(1, 1, cfg.tau2 / 2);
  const double mp = f.pop[StateSet::g_plus].sum();
  const double mm = f.pop[StateSet::g_minus].sum();
  CHECK(mp == doctest::Approx(mm).epsilon(1e-12));
  CHECK(std::abs(f.trace() - 1.0 - f.overdraft) < 1e-13);
}

TEST_CASE("step 3 drains the slice into the accumulator ladder") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  const auto& g = eng.grid();
  const double amp = eng.thermal_weights()[g.index_of(10.0)];
  // cycle 1: center 10, n_max 4, residual +1
  const double slice_mass = gaussian_slice(g, 1.0, cfg.sigma_vsel, amp).values.sum();

  const auto f0 = eng.at_step3(1, 0.0);
  CHECK(f0.pop[StateSet::decaying].sum() ==
        doctest::Approx(slice_mass).epsilon(1e-12));
  for (int j = 0; j < eng.states().n_acc; ++j)
    CHECK(f0.pop[eng.states().acc(j)].sum() == 0.0);

  double prev_acc = 0.0;
  for (double t : {cfg.tau3 / 7, cfg.tau3 / 3, cfg.tau3}) {
    const auto f = eng.at_step3(1, t);
    CHECK(f.pop[StateSet::g_plus].sum() == 0.0);
    CHECK(f.pop[StateSet::g_minus].sum() == 0.0);
    CHECK(f.pop[StateSet::excited].sum() == 0.0);
    double acc = 0.0;
    for (int j = 0; j < eng.states().n_acc; ++j)
      acc += f.pop[eng.states().acc(j)].sum();
    const double d = f.pop[StateSet::decaying].sum();
    CHECK(std::abs(d + acc - slice_mass) < 1e-13 * slice_mass);
    CHECK(acc > prev_acc);
    prev_acc = acc;
  }
  // all rates equal in the default ladder, so survival is a single exponential
  const auto fend = eng.at_step3(1, cfg.tau3);
  CHECK(fend.pop[StateSet::decaying].sum() / slice_mass ==
        doctest::Approx(std::exp(-10.0)).epsilon(1e-12));
}

TEST_CASE("cycle close flushes the decay residue") {
  auto cfg = small_config();
  cfg.ladder = DecayLadder<double>::logarithmic(1, 1e7);
  CoolingEngine<double> eng(cfg);
  const auto& g = eng.grid();
  const double amp = eng.thermal_weights()[g.index_of(10.0)];
  const double slice_mass = gaussian_slice(g, 1.0, cfg.sigma_vsel, amp).values.sum();
  eng.at_step3(1, cfg.tau3);
  eng.close_cycle(1);
  const auto f = eng.final_field();
  CHECK(f.pop[eng.states().acc(0)].sum() ==
        doctest::Approx(slice_mass).epsilon(1e-12));
  CHECK(f.pop[StateSet::decaying].sum() == 0.0);
}

TEST_CASE("time, substep and cycle bounds are enforced") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  CHECK_THROWS_AS(eng.at_step1(1, -1e-9), ModelError);
  CHECK_THROWS_AS(eng.at_step1(1, cfg.tau1 * 1.001), ModelError);
  CHECK_THROWS_AS(eng.at_step2(1, 0, 0.0), ModelError);
  CHECK_THROWS_AS(eng.at_step2(1, 5, 0.0), ModelError);  // n_max is 4
  CHECK_THROWS_AS(eng.at_step1(0, 0.0), ConfigError);
  CHECK_THROWS_AS(eng.at_step1(99, 0.0), ConfigError);
  eng.at_step1(2, 0.0);
  CHECK_THROWS_AS(eng.at_step1(1, 0.0), ConfigError);  // forward-only
}

TEST_CASE("engine rejects slice centers outside the grid") {
  CoolingConfig<double> cfg;
  cfg.half_span = 20.0;  // auto start is 30
  CHECK_THROWS_WITH_AS(CoolingEngine<double>{cfg},
                       doctest::Contains("slice center"), ConfigError);
}

TEST_CASE("run emits the configured sample stream") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  struct Row {
    SnapshotMeta meta;
    double trace, overdraft, gp, gm;
  };
  std::vector<Row> rows;
  eng.run([&](const SnapshotMeta& m, const PopulationField<double>& f) {
    rows.push_back({m, f.trace(), f.overdraft, f.pop[StateSet::g_plus].sum(),
                    f.pop[StateSet::g_minus].sum()});
  });

  // 10 cycles at centers 10,8,6,4,2 mirrored; n_max 4,3,2,1,0
  CHECK(rows.size() == 201);
  CHECK(rows.front().meta.cycle == 0);

  int cycle_ends = 0;
  int step_ends = 0;
  double last_t = -1.0;
  double last_phase = -1.0;
  double last_overdraft = 0.0;
  double worst_excess = 0.0;
  for (const auto& r : rows) {
    if (r.meta.cycle == 0) continue;
    CHECK(r.meta.t_global > last_t);
    CHECK(r.meta.fig_phase > last_phase);
    last_t = r.meta.t_global;
    last_phase = r.meta.fig_phase;
    if (r.meta.cycle_end) {
      ++cycle_ends;
      CHECK(r.meta.step == 3);
      CHECK(r.meta.step_phase == 1.0);
    }
    if (r.meta.step_end) ++step_ends;
    if (r.meta.step == 3) {
      CHECK(r.gp == 0.0);
      CHECK(r.gm == 0.0);
    }
    CHECK(r.overdraft >= last_overdraft - 1e-15);
    last_overdraft = std::max(last_overdraft, r.overdraft);
    worst_excess = std::max(worst_excess, std::abs(r.trace - 1.0) - r.overdraft);
  }
  CHECK(cycle_ends == 10);
  CHECK(step_ends == 40);
  CHECK(worst_excess < 1e-13);

  // overdraft is frozen after step 1 within each cycle
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].meta.cycle == rows[i - 1].meta.cycle && rows[i].meta.step >= 2)
      CHECK(rows[i].overdraft == rows[i - 1].overdraft);
  }

  const auto f = eng.final_field();
  CHECK(std::abs(f.trace() - 1.0 - f.overdraft) < 1e-13);
  CHECK(f.pop[StateSet::g_plus].sum() == 0.0);
  CHECK(f.pop[StateSet::decaying].sum() == 0.0);

  // accumulated mass equals the sum of the decelerated slice masses
  const auto& g = eng.grid();
  double expect = 0.0;
  for (const auto& c : eng.schedule().cycles) {
    const double amp = eng.thermal_weights()[g.index_of(c.center)];
    const double final_center = c.center - c.alpha * (1.0 + 2.0 * c.n_max);
    expect += gaussian_slice(g, final_center, cfg.sigma_vsel, amp).values.sum();
  }
  double acc = 0.0;
  for (int j = 0; j < eng.states().n_acc; ++j)
    acc += f.pop[eng.states().acc(j)].sum();
  CHECK(acc == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("a start inside the selection pitch yields no cycles") {
  CoolingConfig<double> cfg;
  cfg.sigma = 0.9;  // effective start is zero
  CoolingEngine<double> eng(cfg);
  CHECK(eng.schedule().count() == 0);
  int samples = 0;
  eng.run([&](const SnapshotMeta& m, const PopulationField<double>&) {
    ++samples;
    CHECK(m.cycle == 0);
  });
  CHECK(samples == 1);
  const auto f = eng.final_field();
  CHECK((f.pop[StateSet::g0] - eng.thermal_weights()).abs().maxCoeff() == 0.0);
}

TEST_CASE("cycle duration follows the schedule") {
  const auto cfg = small_config();
  CoolingEngine<double> eng(cfg);
  CHECK(eng.cycle_duration(1) == cfg.tau1 + 4 * cfg.tau2 + cfg.tau3);
  CHECK(eng.cycle_duration(9) == cfg.tau1 + cfg.tau3);  // center 2, no inversions
}
