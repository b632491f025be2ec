#include <doctest.h>

#include <cmath>
#include <vector>

#include "acmca/device.hpp"

using namespace acmca;

namespace {
SmcCell cell_at_level(int level) {
  SmcCell cell;
  for (int i = 0; i < level; ++i) cell.flip_up(i);
  return cell;
}
}  // namespace

TEST_CASE("switching probability at the characterized operating points") {
  SwitchingModel model;
  CHECK(switching_probability(PulseSpec::set_train(0.0, 1), model) <= 0.001);
  CHECK(switching_probability(PulseSpec::set_train(6.97, 1), model) == doctest::Approx(0.5).epsilon(1e-12));
  // Oracle: direct arithmetic on the logistic.
  double expected = 1.0 / (1.0 + std::exp(-2.0 * (20.0 - 6.97)));
  CHECK(expected >= 0.999);
  CHECK(switching_probability(PulseSpec::set_train(20.0, 1), model) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("switching probability is monotone in amplitude and width") {
  SwitchingModel model;
  double prev = -1.0;
  for (double amp = 0.0; amp <= 30.0; amp += 0.25) {
    double p = switching_probability(PulseSpec::set_train(amp, 1), model);
    CHECK(p >= prev);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
  prev = -1.0;
  for (double width = 1.0; width <= 60.0; width += 1.0) {
    double p = switching_probability(PulseSpec::set_train(5.0, 1, width), model);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("invalid pulses are rejected") {
  SwitchingModel model;
  CHECK_THROWS_AS(switching_probability(PulseSpec::set_train(-1.0, 1), model),
                  std::invalid_argument);
  CHECK_THROWS_AS(switching_probability(PulseSpec::set_train(1.0, 1, 0.0), model),
                  std::invalid_argument);
  CHECK_THROWS_AS(switching_probability(PulseSpec::reset_pulse(), model), std::invalid_argument);
}

TEST_CASE("amplitude_for inverts the probability map") {
  SwitchingModel model;
  for (double p : {0.05, 0.3, 0.5, 0.9}) {
    double amp = model.amplitude_for(p);
    CHECK(switching_probability(PulseSpec::set_train(amp, 1), model) ==
          doctest::Approx(p).epsilon(1e-12));
  }
  double amp50 = model.amplitude_for(0.3, 50.0);
  CHECK(switching_probability(PulseSpec::set_train(amp50, 1, 50.0), model) ==
        doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("certain switching fills the cell in one pulse") {
  SmcCell cell;
  RngStream rng(7);
  SwitchingModel model;
  // amplitude far above i50: p rounds to 1.0 exactly
  CHECK(switching_probability(PulseSpec::set_train(100.0, 1), model) == 1.0);
  apply_set_pulses(cell, PulseSpec::set_train(100.0, 1), model, rng);
  CHECK(cell.level() == 16);
}

TEST_CASE("zero drive leaves the cell unchanged") {
  SmcCell cell;
  RngStream rng(11);
  SwitchingModel model;
  apply_set_pulses(cell, PulseSpec::set_train(0.0, 100), model, rng);
  CHECK(cell.level() == 0);
  SmcCell untouched;
  apply_set_pulses(untouched, PulseSpec::set_train(9.0, 0), model, rng);
  CHECK(untouched.level() == 0);
}

TEST_CASE("set pulses are absorbing: level never decreases") {
  RngStream rng(123);
  SwitchingModel model;
  for (int run = 0; run < 50; ++run) {
    SmcCell cell;
    int prev_level = 0;
    for (int step = 0; step < 20; ++step) {
      double amp = 4.0 + 8.0 * rng.uniform01();
      int count = 1 + static_cast<int>(rng.uniform_below(4));
      apply_set_pulses(cell, PulseSpec::set_train(amp, count), model, rng);
      CHECK(cell.level() >= prev_level);
      prev_level = cell.level();
    }
  }
}

TEST_CASE("reset is deterministic and idempotent") {
  RngStream rng(5);
  SwitchingModel model;
  SmcCell cell;
  apply_set_pulses(cell, PulseSpec::set_train(100.0, 1), model, rng);
  CHECK(cell.level() == 16);
  reset(cell);
  CHECK(cell.level() == 0);
  reset(cell);
  CHECK(cell.level() == 0);
  for (int run = 0; run < 20; ++run) {
    SmcCell c;
    apply_set_pulses(c, PulseSpec::set_train(6.0, 3), model, rng);
    reset(c);
    CHECK(c.level() == 0);
  }
}

TEST_CASE("expectation law: mean level matches 16(1-(1-p)^n)") {
  SwitchingModel model;
  const double p = 0.3;
  const int pulses = 5;
  const int trials = 20000;
  double amp = model.amplitude_for(p);
  RngStream rng(stream_seed({42, 1}));
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    SmcCell cell;
    apply_set_pulses(cell, PulseSpec::set_train(amp, pulses), model, rng);
    sum += cell.level();
  }
  double mean = sum / trials;
  double q = 1.0 - std::pow(1.0 - p, pulses);
  double expected = 16.0 * q;
  double se = std::sqrt(16.0 * q * (1.0 - q) / trials);
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("conductance map endpoints and midpoint") {
  CHECK(conductance_for_level(0) == doctest::Approx(2.0e-4).epsilon(1e-12));   // 5 kOhm
  CHECK(conductance_for_level(16) == doctest::Approx(1.0e-3).epsilon(1e-12));  // 1 kOhm
  CHECK(conductance_for_level(8) == doctest::Approx(6.0e-4).epsilon(1e-12));
  double prev = 0.0;
  for (int level = 0; level <= 16; ++level) {
    double g = conductance_for_level(level);
    CHECK(g > prev);
    CHECK(g >= 2.0e-4);
    CHECK(g <= 1.0e-3);
    prev = g;
    CHECK(nearest_level(g) == level);
  }
  CHECK(cell_conductance(cell_at_level(8)) == conductance_for_level(8));
}
