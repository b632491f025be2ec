#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "acmca/matrix_gen.hpp"

using namespace acmca;

TEST_CASE("inverse normal CDF: symmetric, monotone, matches erfc inversion") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  for (double u : {0.001, 0.0228, 0.1587, 0.3085, 0.75, 0.99}) {
    double z = inverse_normal_cdf(u);
    // Oracle: forward CDF in independent arithmetic.
    double forward = 0.5 * std::erfc(-z / std::sqrt(2.0));
    CHECK(forward == doctest::Approx(u).epsilon(1e-9));
    CHECK(inverse_normal_cdf(1.0 - u) == doctest::Approx(-z).epsilon(1e-9));
  }
}

TEST_CASE("Bernoulli targets: level-15 fraction tracks the clamped probability") {
  MatrixSpec spec = MatrixSpec::uniform(MatrixKind::Bernoulli, 250, 400);  // 1e5 entries
  RngStream rng(stream_seed({2024, 7}));
  LevelGrid levels = target_levels(spec, rng);
  long count15 = 0;
  for (int r = 0; r < levels.rows(); ++r) {
    for (int c = 0; c < levels.cols(); ++c) {
      CHECK((levels(r, c) == 1 || levels(r, c) == 15));
      count15 += levels(r, c) == 15 ? 1 : 0;
    }
  }
  double n = 250.0 * 400.0;
  double fraction = count15 / n;
  double sigma = std::sqrt(0.25 / n);
  CHECK(std::abs(fraction - 0.5) <= 3.0 * sigma);
}

TEST_CASE("Bernoulli clamp keeps extreme weights inside [0.05, 0.95]") {
  MatrixSpec spec{MatrixKind::Bernoulli, 2000, 2, Eigen::Vector2d(0.0, 10.0)};
  RngStream rng(42);
  LevelGrid levels = target_levels(spec, rng);
  long high0 = 0, high1 = 0;
  for (int r = 0; r < 2000; ++r) {
    high0 += levels(r, 0) == 15;
    high1 += levels(r, 1) == 15;
  }
  double sigma = std::sqrt(0.05 * 0.95 / 2000.0);
  CHECK(std::abs(high0 / 2000.0 - 0.05) <= 3.0 * sigma);
  CHECK(std::abs(high1 / 2000.0 - 0.95) <= 3.0 * sigma);
}

TEST_CASE("Gaussian targets: zero weight degenerates to the mid level") {
  MatrixSpec spec{MatrixKind::Gaussian, 20, 5, Eigen::VectorXd::Zero(5)};
  RngStream rng(3);
  LevelGrid levels = target_levels(spec, rng);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 5; ++c) CHECK(levels(r, c) == 8);
  }
}

TEST_CASE("Gaussian targets: heavier columns spread wider") {
  Eigen::VectorXd weights(2);
  weights << 4.0, 1.0;
  MatrixSpec spec{MatrixKind::Gaussian, 4000, 2, weights};
  RngStream rng(stream_seed({11, 5}));
  LevelGrid levels = target_levels(spec, rng);
  auto column_variance = [&](int c) {
    double mean = 0.0;
    for (int r = 0; r < 4000; ++r) mean += levels(r, c);
    mean /= 4000.0;
    double var = 0.0;
    for (int r = 0; r < 4000; ++r) var += (levels(r, c) - mean) * (levels(r, c) - mean);
    return var / 3999.0;
  };
  CHECK(column_variance(0) > column_variance(1));
}

TEST_CASE("Gaussian mapping symmetry: realized entries have near-zero mean") {
  MatrixSpec spec = MatrixSpec::uniform(MatrixKind::Gaussian, 100, 100);
  RngStream rng(stream_seed({8, 15}));
  LevelGrid levels = target_levels(spec, rng);
  MeasurementMatrix phi(levels, kDefaultPhiScale);
  double mean = phi.values().mean();
  double sd = std::sqrt((phi.values().array() - mean).square().sum() / (phi.values().size() - 1));
  double se = sd / std::sqrt(static_cast<double>(phi.values().size()));
  CHECK(std::abs(mean) <= 3.0 * se);
}

TEST_CASE("deterministic targets: same uniforms and weights give same levels") {
  RngStream rng(19);
  Eigen::MatrixXd base = draw_base_uniforms(6, 9, rng);
  MatrixSpec spec = MatrixSpec::uniform(MatrixKind::Gaussian, 6, 9);
  LevelGrid a = target_levels_from(base, spec);
  LevelGrid b = target_levels_from(base, spec);
  CHECK(a == b);
  // Raising one column's weight changes only that column.
  spec.col_weights[4] = 2.5;
  LevelGrid c = target_levels_from(base, spec);
  for (int col = 0; col < 9; ++col) {
    if (col == 4) continue;
    for (int row = 0; row < 6; ++row) CHECK(c(row, col) == a(row, col));
  }
}

TEST_CASE("reset-only programming realizes the all-negative floor matrix") {
  EnergyLedger ledger;
  CrossbarArray array(3, 4, ledger, 21, 0);
  LevelGrid targets = LevelGrid::Zero(3, 4);
  MeasurementMatrix phi = program_matrix(array, targets);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) {
      CHECK(phi.source_levels()(r, c) == 0);
      CHECK(phi.values()(r, c) == doctest::Approx(-0.5).epsilon(1e-12));
      CHECK(phi.values()(r, c) < 0.0);
    }
  }
  CHECK(ledger.count(OpKind::WritePulse) == 0);
  CHECK(ledger.count(OpKind::ResetPulse) == 12);
}

TEST_CASE("program-and-verify reaches or exceeds every target") {
  EnergyLedger ledger;
  CrossbarArray array(20, 20, ledger, 33, 0);
  RngStream rng(61);
  LevelGrid targets(20, 20);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) targets(r, c) = static_cast<int>(rng.uniform_below(16));
  }
  MeasurementMatrix phi = program_matrix(array, targets);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) CHECK(phi.source_levels()(r, c) >= targets(r, c));
  }
}

TEST_CASE("expected pulses to reach level 15 match the absorbing-chain law") {
  // Oracle: E[tau] = sum_t P(level(t) < 15) with level(t) ~ Bin(16, 1-0.7^t),
  // truncated at the pulse budget; variance from the same distribution.
  auto p_ge_15 = [](int t) {
    double q = std::pow(0.7, t);
    double s = 1.0 - q;
    return std::pow(s, 16) + 16.0 * q * std::pow(s, 15);
  };
  double expect = 0.0;
  double var = 0.0;
  {
    double prev_cdf = 0.0;
    for (int t = 0; t < 40; ++t) expect += 1.0 - p_ge_15(t);
    for (int t = 1; t <= 40; ++t) {
      double cdf = t < 40 ? p_ge_15(t) : 1.0;
      double pmf = cdf - prev_cdf;
      var += pmf * t * t;
      prev_cdf = cdf;
    }
    var -= expect * expect;
  }

  const int cells = 2500;
  EnergyLedger ledger;
  CrossbarArray array(50, 50, ledger, 133, 0);
  LevelGrid targets = LevelGrid::Constant(50, 50, 15);
  program_matrix(array, targets);
  double mean_pulses = static_cast<double>(ledger.count(OpKind::WritePulse)) / cells;
  double se = std::sqrt(var / cells);
  CHECK(std::abs(mean_pulses - expect) <= 3.0 * se);
}

TEST_CASE("Bernoulli full-matrix programming lands on the 3 nJ estimate") {
  EnergyLedger ledger;
  CrossbarArray array(25, 100, ledger, 77, 0);
  MatrixSpec spec = MatrixSpec::uniform(MatrixKind::Bernoulli, 25, 100);
  RngStream rng(stream_seed({77, 1}));
  program_matrix(array, target_levels(spec, rng));
  double pJ = ledger.programming_pJ();
  CHECK(pJ > 3000.0 * 0.75);
  CHECK(pJ < 3000.0 * 1.25);
}

TEST_CASE("realize_phi is deterministic and hash-stable") {
  EnergyLedger ledger;
  CrossbarArray array(4, 4, ledger, 44, 0);
  RngStream rng(90);
  MatrixSpec spec = MatrixSpec::uniform(MatrixKind::Gaussian, 4, 4);
  MeasurementMatrix phi = program_matrix(array, target_levels(spec, rng));
  MeasurementMatrix again = realize_phi(array);
  CHECK(phi.values() == again.values());
  CHECK(phi.snapshot_hash() == again.snapshot_hash());
  // Touching a cell changes the snapshot.
  array.write_cell(0, 0, PulseSpec::reset_pulse());
  array.write_cell(0, 0, PulseSpec::set_train(100.0, 1));
  MeasurementMatrix changed = realize_phi(array);
  CHECK(changed.snapshot_hash() != phi.snapshot_hash());
}

TEST_CASE("differential encoding: mid level cancels, extremes hit +-0.5") {
  LevelGrid mid = LevelGrid::Constant(3, 3, 8);
  MeasurementMatrix phi_mid(mid, kDefaultPhiScale);
  CHECK(phi_mid.values().cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));

  LevelGrid grid(1, 2);
  grid << 16, 0;
  MeasurementMatrix phi(grid, kDefaultPhiScale);
  CHECK(phi.values()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));   // c*(Gmax - G(8))
  CHECK(phi.values()(0, 1) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("matrix CSV exports") {
  LevelGrid grid(2, 2);
  grid << 0, 8, 15, 16;
  MeasurementMatrix phi(grid, kDefaultPhiScale);
  std::ostringstream levels;
  phi.export_levels_csv(levels);
  CHECK(levels.str() == "0,8\n15,16\n");
  std::ostringstream values;
  phi.export_values_csv(values);
  CHECK(values.str().find("0.4375") != std::string::npos);  // level 15 entry
}

TEST_CASE("RIP: identity matrix is a perfect isometry") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(12, 12);
  RngStream rng(7);
  RipEstimate est = rip_estimate(eye, 4, 200, rng);
  CHECK(est.delta_hat == 0.0);
  CHECK(est.k == 4);
  CHECK(est.p_norm == 2);
}

TEST_CASE("RIP: appending an all-zero row changes nothing") {
  RngStream gen(stream_seed({3, 14}));
  Eigen::MatrixXd phi(6, 12);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 12; ++c) phi(r, c) = gen.normal();
  }
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(7, 12);
  padded.topRows(6) = phi;
  RngStream rng_a(99), rng_b(99);  // same support draws
  RipEstimate a = rip_estimate(phi, 3, 300, rng_a);
  RipEstimate b = rip_estimate(padded, 3, 300, rng_b);
  CHECK(a.delta_hat == b.delta_hat);
}

TEST_CASE("RIP for pairs equals the worst column coherence") {
  RngStream gen(stream_seed({6, 28}));
  Eigen::MatrixXd phi(6, 10);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 10; ++c) phi(r, c) = gen.normal();
  }
  // Closed-form oracle: for k = 2 and unit columns the Gram eigenvalues are
  // 1 +- |<phi_i, phi_j>|, so delta is the largest absolute inner product.
  Eigen::MatrixXd unit = normalize_columns(phi);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = i + 1; j < 10; ++j) {
      worst = std::max(worst, std::abs(unit.col(i).dot(unit.col(j))));
    }
  }
  RngStream rng(1234);
  // 45 supports exist; 3000 draws visit all of them.
  RipEstimate est = rip_estimate(phi, 2, 3000, rng);
  CHECK(est.delta_hat == doctest::Approx(worst).epsilon(1e-10));
}

TEST_CASE("RIP is monotone in k on nested supports") {
  RngStream gen(stream_seed({12, 21}));
  Eigen::MatrixXd phi(8, 16);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 16; ++c) phi(r, c) = gen.normal();
  }
  Eigen::MatrixXd unit = normalize_columns(phi);
  std::vector<int> support = {3};
  double prev = rip_delta_on_support(unit, support);
  for (int next : {7, 11, 1, 14, 9}) {
    support.push_back(next);
    double delta = rip_delta_on_support(unit, support);
    CHECK(delta >= prev - 1e-12);
    prev = delta;
  }
}

TEST_CASE("RIP argument validation") {
  Eigen::MatrixXd phi = Eigen::MatrixXd::Random(4, 6);
  RngStream rng(5);
  CHECK_THROWS_AS(rip_estimate(phi, 7, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(rip_estimate(phi, 0, 10, rng), std::invalid_argument);
}
