#include <doctest.h>

#include <cmath>
#include <sstream>

#include "acmca/crossbar.hpp"

using namespace acmca;

namespace {

// Brings every cell of the array to level 16 (certain switching).
void saturate(CrossbarArray& array) {
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      array.write_cell(r, c, PulseSpec::set_train(100.0, 1));
    }
  }
}

// Gives the array a mixed, reproducible level pattern.
void randomize(CrossbarArray& array, RngStream& rng) {
  SwitchingModel model = array.switching_model();
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      array.write_cell(r, c, PulseSpec::reset_pulse());
      int pulses = static_cast<int>(rng.uniform_below(6));
      if (pulses > 0) {
        array.write_cell(r, c, PulseSpec::set_train(model.amplitude_for(0.35), pulses));
      }
    }
  }
}

}  // namespace

TEST_CASE("reset writes are local, certain set fills one cell") {
  EnergyLedger ledger;
  CrossbarArray array(3, 4, ledger, 1, 0);
  saturate(array);
  array.write_cell(1, 2, PulseSpec::reset_pulse());
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      CHECK(array.cell_level(r, c) == ((r == 1 && c == 2) ? 0 : 16));
    }
  }
  array.write_cell(1, 2, PulseSpec::set_train(100.0, 1));
  CHECK(array.cell_level(1, 2) == 16);
}

TEST_CASE("20 pulses at the i50 amplitude nearly fill a reset cell") {
  EnergyLedger ledger;
  CrossbarArray array(24, 24, ledger, 9, 0);
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) {
      array.write_cell(r, c, PulseSpec::set_train(6.97, 20));
    }
  }
  double sum = 0.0;
  for (int r = 0; r < 24; ++r) {
    for (int c = 0; c < 24; ++c) sum += array.cell_level(r, c);
  }
  double mean = sum / (24.0 * 24.0);
  // Expectation law at p = 0.5, n = 20 pulses.
  double q = 1.0 - std::pow(0.5, 20);
  double se = std::sqrt(16.0 * q * (1.0 - q) / (24.0 * 24.0));
  CHECK(std::abs(mean - 16.0 * q) <= std::max(3.0 * se, 1e-3));
}

TEST_CASE("read_conductances honors gating and charges per enabled cell") {
  EnergyLedger ledger;
  CrossbarArray array(2, 3, ledger, 2, 0);
  Eigen::MatrixXd grid = array.read_conductances();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(grid(r, c) == doctest::Approx(2.0e-4).epsilon(1e-12));
  }
  CHECK(ledger.count(OpKind::ReadCell) == 6);

  array.set_enable({true, true}, {true, false, true});
  grid = array.read_conductances();
  CHECK(grid(0, 1) == 0.0);
  CHECK(grid(1, 1) == 0.0);
  CHECK(grid(0, 0) > 0.0);
  CHECK(ledger.count(OpKind::ReadCell) == 6 + 4);  // only enabled cells charged
}

TEST_CASE("vmm matches an independently computed dense product exactly") {
  EnergyLedger ledger;
  CrossbarArray array(4, 6, ledger, 3, 0);
  RngStream rng(77);
  randomize(array, rng);
  Eigen::VectorXd v(6);
  for (int i = 0; i < 6; ++i) v[i] = 2.0 * rng.uniform01() - 1.0;

  // Independent oracle: copy the grid (no gating active), then accumulate
  // left to right exactly like an ideal analog sum.
  Eigen::MatrixXd grid = array.read_conductances();
  VmmResult result = array.vmm(v);
  for (int r = 0; r < 4; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 6; ++c) acc += grid(r, c) * v[c];
    CHECK(result.currents_A[r] == acc);
  }

  CHECK(array.vmm(Eigen::VectorXd::Zero(6)).currents_A.norm() == 0.0);

  Eigen::VectorXd onehot = Eigen::VectorXd::Zero(6);
  onehot[3] = 1.0;
  VmmResult sel = array.vmm(onehot);
  for (int r = 0; r < 4; ++r) CHECK(sel.currents_A[r] == grid(r, 3));
}

TEST_CASE("vmm linearity") {
  EnergyLedger ledger;
  CrossbarArray array(5, 7, ledger, 4, 0);
  RngStream rng(31);
  randomize(array, rng);

  // Power-of-two scalars on one-hot inputs combine with no rounding at all.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(7), w = Eigen::VectorXd::Zero(7);
  u[1] = 1.0;
  w[5] = 1.0;
  VmmResult lhs = array.vmm(2.0 * u + 4.0 * w);
  VmmResult rhs_u = array.vmm(u);
  VmmResult rhs_w = array.vmm(w);
  for (int r = 0; r < 5; ++r) {
    CHECK(lhs.currents_A[r] == 2.0 * rhs_u.currents_A[r] + 4.0 * rhs_w.currents_A[r]);
  }

  // General case: linear to machine precision.
  Eigen::VectorXd a(7), b(7);
  for (int i = 0; i < 7; ++i) {
    a[i] = 2.0 * rng.uniform01() - 1.0;
    b[i] = 2.0 * rng.uniform01() - 1.0;
  }
  VmmResult lhs2 = array.vmm(1.5 * a - 0.75 * b);
  VmmResult ra = array.vmm(a);
  VmmResult rb = array.vmm(b);
  for (int r = 0; r < 5; ++r) {
    double expect = 1.5 * ra.currents_A[r] - 0.75 * rb.currents_A[r];
    CHECK(lhs2.currents_A[r] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("gating: disabled lines contribute nothing and cost nothing") {
  EnergyLedger ledger;
  CrossbarArray array(4, 5, ledger, 8, 0);
  RngStream rng(99);
  randomize(array, rng);
  Eigen::MatrixXd full_grid = array.read_conductances();

  Eigen::VectorXd v(5);
  for (int i = 0; i < 5; ++i) v[i] = rng.uniform01();

  SUBCASE("all columns disabled gives zero output") {
    array.set_enable({true, true, true, true}, {false, false, false, false, false});
    CHECK(array.vmm(v).currents_A.norm() == 0.0);
  }

  SUBCASE("vmm equals the submatrix product under partial enables") {
    std::vector<bool> rows = {true, false, true, true};
    std::vector<bool> cols = {true, true, false, true, false};
    array.set_enable(rows, cols);
    VmmResult result = array.vmm(v);
    for (int r = 0; r < 4; ++r) {
      if (!rows[r]) {
        CHECK(result.currents_A[r] == 0.0);
        continue;
      }
      double acc = 0.0;
      for (int c = 0; c < 5; ++c) {
        if (cols[c]) acc += full_grid(r, c) * v[c];
      }
      CHECK(result.currents_A[r] == acc);
    }
  }

  SUBCASE("vmm charge scales exactly with the enabled-cell count") {
    std::uint64_t before = ledger.count(OpKind::VmmCellSmc);
    array.set_enable({true, false, true, false}, {true, true, false, true, true});
    array.vmm(v);
    CHECK(ledger.count(OpKind::VmmCellSmc) == before + 2 * 4);
    std::uint64_t mid = ledger.count(OpKind::VmmCellSmc);
    array.set_enable({true, true, true, true}, {true, true, true, true, true});
    array.vmm(v);
    CHECK(ledger.count(OpKind::VmmCellSmc) == mid + 4 * 5);
  }
}

TEST_CASE("wta picks the maximum current, ties to the lowest index") {
  VmmResult r;
  r.currents_A = Eigen::Vector3d(1.0, 3.0, 2.0);
  r.row_enabled = {true, true, true};
  CHECK(wta(r) == 1);
  r.currents_A = Eigen::Vector3d(5.0, 5.0, 0.0);
  CHECK(wta(r) == 0);

  RngStream rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    VmmResult q;
    q.currents_A.resize(9);
    q.row_enabled.assign(9, true);
    for (int i = 0; i < 9; ++i) q.currents_A[i] = rng.normal();
    // Independent linear-scan oracle.
    int best = 0;
    for (int i = 1; i < 9; ++i) {
      if (q.currents_A[i] > q.currents_A[best]) best = i;
    }
    CHECK(wta(q) == best);
  }

  r.row_enabled = {false, true, false};
  r.currents_A = Eigen::Vector3d(9.0, 1.0, 8.0);
  CHECK(wta(r) == 1);  // disabled rows can never win
  r.row_enabled = {false, false, false};
  CHECK_THROWS_AS(wta(r), std::domain_error);
}

TEST_CASE("index and gating errors") {
  EnergyLedger ledger;
  CrossbarArray array(2, 2, ledger, 5, 0);
  CHECK_THROWS_AS(array.write_cell(2, 0, PulseSpec::reset_pulse()), std::out_of_range);
  CHECK_THROWS_AS(array.write_cell(0, -1, PulseSpec::reset_pulse()), std::out_of_range);
  array.set_enable({true, false}, {true, true});
  CHECK_THROWS_AS(array.write_cell(1, 0, PulseSpec::reset_pulse()), GatedLineError);
  CHECK_THROWS_AS(array.read_cell(1, 0), GatedLineError);
  CHECK_THROWS_AS(array.vmm(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(array.set_enable({true}, {true, true}), std::invalid_argument);
}

TEST_CASE("write energy: count x per-pulse constants") {
  EnergyLedger ledger;
  CrossbarArray array(2, 2, ledger, 6, 0);
  array.write_cell(0, 0, PulseSpec::set_train(6.0, 7));
  CHECK(ledger.count(OpKind::WritePulse) == 7);
  array.write_cell(0, 1, PulseSpec::reset_pulse());
  CHECK(ledger.count(OpKind::ResetPulse) == 1);
  array.read_cell(1, 1);
  CHECK(ledger.count(OpKind::ReadCell) == 1);
}

TEST_CASE("transposed copy swaps cell states and masks") {
  EnergyLedger ledger;
  CrossbarArray array(3, 5, ledger, 12, 0);
  RngStream rng(55);
  randomize(array, rng);
  array.set_enable({true, false, true}, {true, true, false, true, true});
  EnergyLedger tledger;
  CrossbarArray t = array.transposed_copy(tledger);
  CHECK(t.rows() == 5);
  CHECK(t.cols() == 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) CHECK(t.cell_level(c, r) == array.cell_level(r, c));
  }
  CHECK(t.row_enabled(2) == false);  // original column 2 was off
  CHECK(t.col_enabled(1) == false);  // original row 1 was off
}

TEST_CASE("conductance grid dump uses 9-significant-digit scientific CSV") {
  EnergyLedger ledger;
  CrossbarArray array(2, 2, ledger, 13, 0);
  std::ostringstream os;
  array.dump_conductances_csv(os);
  CHECK(os.str() == "2.00000000e-04,2.00000000e-04\n2.00000000e-04,2.00000000e-04\n");
  CHECK(ledger.count(OpKind::ReadCell) == 0);  // debug path is free
}
