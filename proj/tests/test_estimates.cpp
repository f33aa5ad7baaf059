#include <doctest.h>

#include <cmath>
#include <vector>

#include "molcool/constants.hpp"
#include "molcool/errors.hpp"
#include "molcool/estimates.hpp"

using namespace molcool;
using doctest::Approx;

TEST_CASE("selection estimates at the reference inputs") {
  const PhysicalInputs in;
  const auto s = selection_estimates(in);
  CHECK(s.omega_r == Approx(139288.1900111456).epsilon(1e-12));
  CHECK(s.t_vs == Approx(4.255662362459831e-06).epsilon(1e-12));
  CHECK(s.tau1 == Approx(2.6922598388994297e-05).epsilon(1e-12));
  CHECK(s.omega0 == Approx(9779947.751721982).epsilon(1e-12));
  CHECK(s.p_max_si == Approx(2.1413180995649494e-24).epsilon(1e-12));
  CHECK(s.p_max_hk == Approx(969.4968748000545).epsilon(1e-12));
  CHECK(s.n_max == 969);
  CHECK(s.n_max_round == 1000);
  CHECK(s.t1 == Approx(0.026922598388994298).epsilon(1e-12));
}

TEST_CASE("selection scaling in the pitch") {
  PhysicalInputs in;
  const auto s2 = selection_estimates(in);
  in.dp_vs_hk = 4.0;
  const auto s4 = selection_estimates(in);
  CHECK(s4.tau1 == s2.tau1 / 2);  // tau1 ~ 1/dP_vs, exact under doubling
  CHECK(s4.p_max_hk == s2.p_max_hk);
  CHECK(s4.n_max == 485);
  CHECK(s4.n_max_round == 500);
  CHECK(s4.t_vs == Approx(4.0 * s2.t_vs).epsilon(1e-14));
}

TEST_CASE("deceleration estimates and the summed cross-check") {
  const PhysicalInputs in;
  const auto d = deceleration_estimates(in, 1000);
  CHECK(d.t2 == 5.005e-3);
  CHECK(d.eps_n == Approx(0.606454822840095).epsilon(1e-12));
  CHECK(d.adiabaticity == Approx(50.0).epsilon(1e-12));
  CHECK(d.adiabatic);  // passes exactly at the boundary

  for (std::int64_t n : {std::int64_t(1), std::int64_t(7), std::int64_t(100),
                         std::int64_t(10000)}) {
    const double closed = deceleration_estimates(in, n).t2;
    CHECK(deceleration_time_summed(in.tau2, n) == Approx(closed).epsilon(1e-12));
  }

  PhysicalInputs slow = in;
  slow.rabi_step2 = 4.9e9;
  CHECK_FALSE(deceleration_estimates(slow, 1000).adiabatic);
  CHECK_THROWS_AS(deceleration_estimates(in, 0), ConfigError);
}

TEST_CASE("accumulation estimates and the total time identity") {
  const PhysicalInputs in;
  const auto s = selection_estimates(in);
  const auto d = deceleration_estimates(in, s.n_max_round);
  const auto a = accumulation_estimates(in, s.n_max_round, s.t1, d.t2);
  CHECK(a.tau3 == Approx(1e-6).epsilon(1e-14));
  CHECK(a.t3 == Approx(1e-3).epsilon(1e-14));
  CHECK(a.t_cool == s.t1 + d.t2 + a.t3);
  CHECK(a.t_cool == Approx(0.0329275983889943).epsilon(1e-12));
}

TEST_CASE("rotational band population") {
  const PhysicalInputs in;
  const double hcb =
      constants::planck * constants::c_light * 100.0 * in.rot_const_cm;
  const double expect =
      3.0 * std::exp(-2.0 * hcb / (constants::k_boltzmann * in.temperature_K));
  CHECK(rovib_weight(0, 1, in) / rovib_weight(0, 0, in) ==
        Approx(expect).epsilon(1e-12));

  PhysicalInputs hot = in;
  hot.temperature_K = 1e9;  // degeneracy limit
  CHECK(rovib_weight(0, 1, hot) / rovib_weight(0, 0, hot) == Approx(3.0).epsilon(1e-6));
  CHECK(rovib_weight(0, 2, hot) / rovib_weight(0, 0, hot) == Approx(5.0).epsilon(1e-6));

  CHECK_THROWS_AS(rovib_weight(-1, 0, in), ConfigError);
  CHECK_THROWS_AS(rovib_weight(0, -1, in), ConfigError);

  const auto j = jmax(in);
  CHECK(j.continuous == Approx(1.3641818587333794).epsilon(1e-12));
  CHECK(j.lower == 1);
  CHECK(j.upper == 2);

  // (J_max + 1/2) scales as 1/sqrt(B) and as sqrt(T)
  PhysicalInputs b4 = in;
  b4.rot_const_cm = 0.4;
  CHECK(jmax(b4).continuous + 0.5 == Approx((j.continuous + 0.5) / 2).epsilon(1e-14));
  PhysicalInputs t4 = in;
  t4.temperature_K = 4.0;
  CHECK(jmax(t4).continuous + 0.5 == Approx((j.continuous + 0.5) * 2).epsilon(1e-14));

  // discrete weights peak inside the band edge estimate
  double best = -1.0;
  int arg = -1;
  for (int jj = 0; jj <= 6; ++jj) {
    const double w = rovib_weight(0, jj, in);
    if (w > best) {
      best = w;
      arg = jj;
    }
  }
  CHECK(arg >= j.lower - 1);
  CHECK(arg <= j.upper);
}

TEST_CASE("drift before capture: closed form, scan, unimodality") {
  const PhysicalInputs in;
  const std::int64_t k = 1000;
  CHECK(drift_distance(k, in, k) == 0.0);
  CHECK(drift_distance(475, in, k) == Approx(0.20268272612772603).epsilon(1e-12));

  const auto scan = drift_argmax(in, k);
  CHECK(scan.argmax == 480);
  CHECK(scan.l_max == Approx(0.20269960075151047).epsilon(1e-12));

  std::vector<double> l(static_cast<std::size_t>(k) + 1, 0.0);
  for (std::int64_t n = 1; n <= k; ++n)
    l[static_cast<std::size_t>(n)] = drift_distance(n, in, k);
  for (std::int64_t n = 2; n <= scan.argmax; ++n)
    CHECK(l[static_cast<std::size_t>(n)] > l[static_cast<std::size_t>(n - 1)]);
  for (std::int64_t n = scan.argmax + 1; n <= k; ++n)
    CHECK(l[static_cast<std::size_t>(n)] < l[static_cast<std::size_t>(n - 1)]);

  CHECK_THROWS_AS(drift_distance(0, in, k), ConfigError);
  CHECK_THROWS_AS(drift_distance(1001, in, k), ConfigError);
}

TEST_CASE("input validation names the offending field") {
  auto expect_error = [](void (*mutate)(PhysicalInputs&), const char* token) {
    PhysicalInputs in;
    mutate(in);
    CHECK_THROWS_WITH_AS(in.validate(), doctest::Contains(token), ConfigError);
  };
  expect_error([](PhysicalInputs& i) { i.mass_amu = 0.0; }, "mass");
  expect_error([](PhysicalInputs& i) { i.temperature_K = -1.0; }, "T_i");
  expect_error([](PhysicalInputs& i) { i.wavelength_m = 0.0; }, "lambda");
  expect_error([](PhysicalInputs& i) { i.rot_const_cm = 0.0; }, "B");
  expect_error([](PhysicalInputs& i) { i.vib_const_cm = 0.0; }, "v");
  expect_error([](PhysicalInputs& i) { i.gamma_e = 0.0; }, "Gamma_e");
  expect_error([](PhysicalInputs& i) { i.dp_vs_hk = 0.0; }, "dP_vs");
  expect_error([](PhysicalInputs& i) { i.tau2 = 0.0; }, "tau2");
  expect_error([](PhysicalInputs& i) { i.tau3_multiplier = 0.0; }, "tau3_multiplier");
  expect_error([](PhysicalInputs& i) { i.rabi_step2 = 0.0; }, "Omega0_step2");
  expect_error([](PhysicalInputs& i) { i.efficiency = 0.0; }, "eps");
  expect_error([](PhysicalInputs& i) { i.efficiency = 1.5; }, "eps");
  expect_error([](PhysicalInputs& i) { i.detuning = 5e8; }, "delta");

  PhysicalInputs ok;
  ok.efficiency = 1.0;
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("report assembles the full chain with reference comparisons") {
  const auto r = make_report(PhysicalInputs{});
  CHECK(r.selection.n_max_round == 1000);
  CHECK(r.drift_table.size() == 20);
  CHECK(r.drift_table.front().n == 50);
  CHECK(r.drift_table.back().n == 1000);
  CHECK(r.drift_table.back().length_m == 0.0);

  REQUIRE(r.paper_check.size() == 6);
  const char* names[] = {"tau1", "Omega0", "P_max", "t2", "eps_N", "t_cool"};
  const double refs[] = {2.7e-5, 9.8e6, 1000.0, 5e-3, 0.60, 33e-3};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.paper_check[i].name == names[i]);
    CHECK(r.paper_check[i].reference == refs[i]);
    CHECK(r.paper_check[i].deviation < 0.05);
    CHECK(r.paper_check[i].deviation >= 0.0);
  }
}
