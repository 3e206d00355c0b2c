/**
 * @file test_ensemble.cpp
 * @brief Tests for the ensemble runner: aggregation oracles, worker-count
 *        bit-identity, the seed schedule, steady-window reduction, reducer
 *        plumbing, failure wrapping, and the concrete producers.
 */

#include "catch_amalgamated.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "cmfb/ensemble.hpp"
#include "cmfb/errors.hpp"

using namespace cmfb;

namespace {

OscillatorScenario small_oscillator_scenario() {
  OscillatorScenario sc;
  sc.model = OscillatorModel{};  // standard parameters
  sc.strategy = OscillatorStrategy::XpIntegral;
  sc.dt = sc.model.period() / 250.0;
  sc.tau_i = 40.0 * sc.dt;
  sc.t_final = 2.0 * sc.model.period();
  sc.output_stride = 10;
  return sc;
}

/// Producer that fails on one specific trajectory index (via its seed).
class FailingProducer : public TrajectoryProducer {
 public:
  explicit FailingProducer(std::uint64_t bad_seed) : bad_seed_(bad_seed) {}
  std::size_t rows() const override { return 3; }
  std::size_t observables() const override { return 1; }
  std::vector<std::string> observable_names() const override { return {"v"}; }
  double row_time(std::size_t row) const override { return static_cast<double>(row); }
  void run(std::uint64_t seed, double* out) const override {
    if (seed == bad_seed_) throw NumericalError("synthetic blow-up");
    for (std::size_t r = 0; r < 3; ++r) out[r] = static_cast<double>(seed + r);
  }

 private:
  std::uint64_t bad_seed_;
};

}  // namespace

TEST_CASE("aggregate reproduces closed-form mean and standard deviation") {
  const auto [m, s] = aggregate({0.0, 2.0});
  REQUIRE(m == 1.0);
  REQUIRE(std::abs(s - std::sqrt(2.0)) < 1e-15);

  const auto [m1, s1] = aggregate({3.5});
  REQUIRE(m1 == 3.5);
  REQUIRE(s1 == 0.0);

  REQUIRE_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("aggregate matches population statistics on a large Gaussian sample") {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> n01(1.5, 2.0);
  std::vector<double> xs(100000);
  for (double& x : xs) x = n01(gen);
  const auto [mean, sd] = aggregate(xs);
  REQUIRE(std::abs(mean - 1.5) < 4.0 * 2.0 / std::sqrt(100000.0));
  REQUIRE(std::abs(sd - 2.0) / 2.0 < 0.01);
}

TEST_CASE("trajectory seeds are disjoint across the ensemble schedule") {
  // The first 100 increments of any two distinct seeds in a contiguous block
  // must differ somewhere.
  const std::uint64_t base = 12345;
  std::vector<std::vector<double>> streams;
  for (std::uint64_t i = 0; i < 40; ++i) {
    NoiseSource src(base + i);
    std::vector<double> s(100);
    for (double& v : s) v = src.sample_increment(0.01);
    streams.push_back(std::move(s));
  }
  for (std::size_t a = 0; a < streams.size(); ++a) {
    for (std::size_t b = a + 1; b < streams.size(); ++b) {
      REQUIRE(std::memcmp(streams[a].data(), streams[b].data(),
                          100 * sizeof(double)) != 0);
    }
  }
}

TEST_CASE("ensemble aggregation is bit-identical for any worker count") {
  const OscillatorTrajectoryProducer producer(small_oscillator_scenario());

  EnsembleConfig cfg;
  cfg.n_traj = 130;  // three blocks, the last one partial
  cfg.base_seed = 4242;
  cfg.n_workers = 1;
  const EnsembleStats serial = run_ensemble(producer, cfg);

  cfg.n_workers = 3;
  const EnsembleStats parallel = run_ensemble(producer, cfg);

  REQUIRE(serial.times == parallel.times);
  for (std::size_t j = 0; j < serial.mean.size(); ++j) {
    for (std::size_t r = 0; r < serial.mean[j].size(); ++r) {
      REQUIRE(serial.mean[j][r] == parallel.mean[j][r]);
      REQUIRE(serial.std_dev[j][r] == parallel.std_dev[j][r]);
      REQUIRE(serial.traj0[j][r] == parallel.traj0[j][r]);
    }
  }
}

TEST_CASE("trajectory 0 capture and reducer plumbing") {
  const OscillatorTrajectoryProducer producer(small_oscillator_scenario());

  EnsembleConfig cfg;
  cfg.n_traj = 9;
  cfg.base_seed = 99;
  cfg.n_workers = 1;

  // Reducer: mean of the first observable over all rows.
  const TrajectoryReducer reducer = [](const double* data, std::size_t rows,
                                       std::size_t obs) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += data[r * obs];
    return acc / static_cast<double>(rows);
  };
  const EnsembleStats stats = run_ensemble(producer, cfg, reducer);

  // traj0 equals a direct run with the base seed.
  std::vector<double> direct(producer.rows() * producer.observables());
  producer.run(cfg.base_seed, direct.data());
  for (std::size_t r = 0; r < producer.rows(); ++r) {
    REQUIRE(stats.traj0[0][r] == direct[r * 2]);
    REQUIRE(stats.traj0[1][r] == direct[r * 2 + 1]);
  }

  REQUIRE(stats.traj_scalars.size() == 9);
  double acc = 0.0;
  for (std::size_t r = 0; r < producer.rows(); ++r) acc += direct[r * 2];
  REQUIRE(stats.traj_scalars[0] == acc / static_cast<double>(producer.rows()));

  // Single-trajectory ensembles report zero spread.
  cfg.n_traj = 1;
  const EnsembleStats one = run_ensemble(producer, cfg);
  for (const auto& series : one.std_dev) {
    for (const double v : series) REQUIRE(v == 0.0);
  }
}

TEST_CASE("trajectory failures abort with index and seed attached") {
  const FailingProducer producer(1003);  // trajectory 3 under base seed 1000
  EnsembleConfig cfg;
  cfg.n_traj = 8;
  cfg.base_seed = 1000;
  cfg.n_workers = 1;
  try {
    run_ensemble(producer, cfg);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& ex) {
    const std::string msg = ex.what();
    REQUIRE(msg.find("trajectory 3") != std::string::npos);
    REQUIRE(msg.find("1003") != std::string::npos);
    REQUIRE(msg.find("synthetic blow-up") != std::string::npos);
  }
}

TEST_CASE("steady-window summary reduces the window rows") {
  EnsembleStats stats;
  stats.observables = {"a", "b"};
  for (int r = 0; r <= 10; ++r) stats.times.push_back(static_cast<double>(r));
  stats.mean.resize(2);
  stats.std_dev.resize(2);
  for (int r = 0; r <= 10; ++r) {
    stats.mean[0].push_back(2.0);
    stats.std_dev[0].push_back(0.1 * r);
    stats.mean[1].push_back(static_cast<double>(r));  // strongly drifting
    stats.std_dev[1].push_back(1.0);
  }

  const auto summary = steady_window_summary(stats, {5.0, 10.0});
  REQUIRE(summary.size() == 2);
  REQUIRE(std::abs(summary[0].mean - 2.0) < 1e-15);
  REQUIRE(std::abs(summary[0].max_std - 1.0) < 1e-15);
  REQUIRE(std::abs(summary[1].mean - 7.5) < 1e-15);

  REQUIRE_THROWS_AS(steady_window_summary(stats, {100.0, 200.0}),
                    std::invalid_argument);
}

TEST_CASE("two-qubit producer validates its scenario and reports sane rows") {
  TwoQubitScenario sc;
  sc.dt = 0.01;
  sc.t_final = 2.0;
  sc.output_stride = 20;
  const TwoQubitTrajectoryProducer producer(sc);

  REQUIRE(producer.rows() == 11);
  REQUIRE(producer.observables() == 4);
  REQUIRE(std::abs(producer.row_time(5) - 1.0) < 1e-15);

  std::vector<double> buf(producer.rows() * 4);
  producer.run(7, buf.data());
  // Row 0 is the initial |T_1><T_1| state: populations (0, 0, 1), C = 0.
  REQUIRE(buf[0] == 0.0);
  REQUIRE(buf[1] == 0.0);
  REQUIRE(buf[2] == 1.0);
  REQUIRE(buf[3] == 0.0);
  for (std::size_t r = 0; r < producer.rows(); ++r) {
    const double pop = buf[r * 4] + buf[r * 4 + 1] + buf[r * 4 + 2];
    REQUIRE(pop > -1e-9);
    REQUIRE(pop < 1.0 + 1e-9);  // the singlet sector holds the remainder
    REQUIRE(buf[r * 4 + 3] >= 0.0);
    REQUIRE(buf[r * 4 + 3] <= 1.0 + 1e-12);
  }

  TwoQubitScenario bad = sc;
  bad.init(0, 0) = 2.0;  // trace 2
  REQUIRE_THROWS_AS(TwoQubitTrajectoryProducer(bad), std::invalid_argument);
}

TEST_CASE("oscillator producer interleaves the plan output") {
  const OscillatorScenario sc = small_oscillator_scenario();
  const OscillatorTrajectoryProducer producer(sc);
  const OscillatorPlan plan(sc);

  std::vector<double> buf(producer.rows() * 2);
  producer.run(5, buf.data());

  NoiseSource noise(5);
  std::vector<double> X(plan.rows()), P(plan.rows());
  plan.run_trajectory(noise, X.data(), P.data());

  for (std::size_t r = 0; r < plan.rows(); ++r) {
    REQUIRE(buf[r * 2] == X[r]);
    REQUIRE(buf[r * 2 + 1] == P[r]);
  }
}
