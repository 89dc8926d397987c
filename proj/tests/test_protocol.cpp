#include "qkpc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>

#include <doctest.h>

using namespace qkpc;

namespace {

LinkEnvironment env_with(double eta, double delta) {
  LinkEnvironment env;
  env.eta = eta;
  env.delta = delta;
  return env;
}

double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace

TEST_CASE("all-vacuum transmission decodes to zero") {
  TransmissionConfig cfg;
  OokParams p;
  p.mean_photons = 0.0;
  cfg.params = p;
  cfg.env = env_with(1.0, 0.0);
  cfg.n_pulses = 20000;
  cfg.repetitions = 3;
  cfg.seed = 5;
  const TransmissionReport rep = run_transmission(cfg);
  // every pulse reads 0 clicks -> output 0; errors are exactly the bit-1 pulses
  CHECK(rep.qber_mean == doctest::Approx(0.5).epsilon(0.02));
  CHECK(rep.confusion.eps00 == 1.0);
  CHECK(rep.confusion.eps10 == 1.0);
}

TEST_CASE("ook monte carlo agrees with the analytic channel") {
  TransmissionConfig cfg;
  OokParams p;
  p.mean_photons = 1.0;
  cfg.params = p;
  cfg.env = env_with(1.0, 0.03);
  cfg.n_pulses = 250000;
  cfg.repetitions = 4;
  cfg.seed = 17;
  const TransmissionReport rep = run_transmission(cfg);

  const BinaryChannel ch = ook_channel(p, cfg.env);
  const double n = static_cast<double>(cfg.n_pulses) * cfg.repetitions;
  CHECK(std::abs(rep.qber_mean - ch.qber()) < 3.0 * binomial_se(ch.qber(), n));
  CHECK(std::abs(rep.confusion.eps00 - ch.eps00) <
        3.0 * binomial_se(ch.eps00, n / 2.0) + 1e-9);
  CHECK(std::abs(rep.confusion.eps10 - ch.eps10) <
        3.0 * binomial_se(ch.eps10, n / 2.0) + 1e-9);
}

TEST_CASE("pm monte carlo agrees with the skellam channel") {
  TransmissionConfig cfg;
  PmParams p;
  p.mean_photons = 4.0;
  p.theta = kPi / 4.0;
  cfg.params = p;
  cfg.env = env_with(1.0, 0.03);
  cfg.n_pulses = 250000;
  cfg.repetitions = 4;
  cfg.seed = 23;
  const TransmissionReport rep = run_transmission(cfg);

  const BinaryChannel ch = pm_channel(p, cfg.env);
  CHECK(ch.eps00 == doctest::Approx(0.8873094071951847).epsilon(1e-10));
  CHECK(ch.eps10 == doctest::Approx(0.03422905459794376).epsilon(1e-10));
  const double n = static_cast<double>(cfg.n_pulses) * cfg.repetitions;
  CHECK(std::abs(rep.qber_mean - ch.qber()) < 3.0 * binomial_se(ch.qber(), n));
  CHECK(std::abs(rep.confusion.eps00 - ch.eps00) <
        3.0 * binomial_se(ch.eps00, n / 2.0));
  CHECK(std::abs(rep.confusion.eps10 - ch.eps10) <
        3.0 * binomial_se(ch.eps10, n / 2.0));
}

TEST_CASE("reports are bit-identical for identical seeds") {
  TransmissionConfig cfg;
  PmParams p;
  p.mean_photons = 2.0;
  p.theta = 0.5;
  cfg.params = p;
  cfg.env = env_with(0.8, 0.1);
  cfg.n_pulses = 50000;
  cfg.repetitions = 6;
  cfg.seed = 99;

  cfg.threads = 1;
  const TransmissionReport a = run_transmission(cfg);
  cfg.threads = 4;
  const TransmissionReport b = run_transmission(cfg);
  CHECK(a.qber_mean == b.qber_mean);
  CHECK(a.qber_stddev == b.qber_stddev);
  CHECK(a.mean_clicks_per_pulse == b.mean_clicks_per_pulse);
  CHECK(a.per_repetition == b.per_repetition);
  CHECK(a.confusion.eps00 == b.confusion.eps00);

  cfg.seed = 100;
  const TransmissionReport c = run_transmission(cfg);
  CHECK(a.qber_mean != c.qber_mean);
}

TEST_CASE("mean clicks mirror the power cross-check") {
  TransmissionConfig cfg;
  OokParams p;
  p.mean_photons = 2.5;
  cfg.params = p;
  cfg.env = env_with(0.8, 0.4);
  cfg.n_pulses = 200000;
  cfg.repetitions = 5;
  cfg.seed = 3;
  const TransmissionReport rep = run_transmission(cfg);
  const double expected = cfg.env.eta * p.mean_photons + cfg.env.delta;
  const double pulses_bit1 = 0.5 * cfg.n_pulses * cfg.repetitions;
  const double se = std::sqrt(expected / pulses_bit1);
  CHECK(std::abs(rep.mean_clicks_per_pulse - expected) < 3.0 * se);
}

TEST_CASE("monte carlo error shrinks like root n") {
  OokParams p;
  p.mean_photons = 1.0;
  const LinkEnvironment env = env_with(1.0, 0.03);
  const double analytic = ook_channel(p, env).qber();

  auto median_error = [&](std::int64_t pulses) {
    std::vector<double> errs;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      TransmissionConfig cfg;
      cfg.params = p;
      cfg.env = env;
      cfg.n_pulses = pulses;
      cfg.repetitions = 1;
      cfg.seed = 1000 + seed;
      errs.push_back(std::abs(run_transmission(cfg).qber_mean - analytic));
    }
    std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
    return errs[errs.size() / 2];
  };

  const double coarse = median_error(25000);
  const double fine = median_error(100000);  // 4x the pulses -> ~2x tighter
  const double ratio = coarse / fine;
  CHECK(ratio > 1.2);
  CHECK(ratio < 3.4);
}

TEST_CASE("interval sampling shifts the qber by the lost photons") {
  // Switching the click statistic from Poisson to the binomial interval
  // readout moves the error rates by only a few permille at bench rates.
  TransmissionConfig cfg;
  OokParams p;
  p.mean_photons = 5.0;
  p.threshold_k = 2;
  cfg.params = p;
  cfg.env = env_with(1.0, 0.1);
  cfg.n_pulses = 150000;
  cfg.repetitions = 2;
  cfg.seed = 8;
  const double ideal = run_transmission(cfg).qber_mean;
  cfg.sampling = SamplingMode::kIntervalModel;
  const double interval = run_transmission(cfg).qber_mean;
  cfg.sampling = SamplingMode::kDeadTime;
  const double dead = run_transmission(cfg).qber_mean;
  CHECK(std::abs(interval - ideal) < 0.01);
  CHECK(std::abs(dead - ideal) < 0.02);
}

TEST_CASE("qber curve emits analytic and monte carlo series") {
  QberCurveRequest req;
  req.eta_alpha2_values = {0.5, 1.0, 2.0};
  req.env = env_with(1.0, 0.03);
  req.thresholds = {1, 2};
  req.eve_gammas = {1.0};
  req.monte_carlo = true;
  req.mc_pulses = 20000;
  req.mc_repetitions = 2;
  req.seed = 12;
  const auto points = qber_curve(req);
  // 2 thresholds x (analytic + mc) x 3 points + eve x 3 points
  CHECK(points.size() == 2 * 2 * 3 + 3);

  // analytic rows match the channel directly
  OokParams p;
  for (const auto& pt : points) {
    if (pt.series == "k=1" && pt.eta_alpha2 == 1.0) {
      p.mean_photons = 1.0;
      CHECK(pt.qber == doctest::Approx(ook_channel(p, req.env).qber()).epsilon(1e-12));
    }
  }

  // Eve's curve sits below Bob's k=1 curve at full interception
  for (double x : req.eta_alpha2_values) {
    double bob = 0.0, eve = 1.0;
    for (const auto& pt : points) {
      if (pt.eta_alpha2 == x && pt.series == "k=1") bob = pt.qber;
      if (pt.eta_alpha2 == x && pt.series == "eve gamma=1") eve = pt.qber;
    }
    CHECK(eve < bob);
  }
}

TEST_CASE("qber curve monotone beyond the noise floor for fixed threshold") {
  QberCurveRequest req;
  for (double x = 0.5; x <= 20.0; x += 0.5) {
    req.eta_alpha2_values.push_back(x);
  }
  req.env = env_with(1.0, 0.03);
  req.thresholds = {2};
  const auto points = qber_curve(req);
  double prev = 1.0;
  for (const auto& pt : points) {
    if (pt.series != "k=2" || pt.eta_alpha2 < 2.0) continue;
    CHECK(pt.qber <= prev + 1e-12);
    prev = pt.qber;
  }
}

TEST_CASE("pm qber curve reaches the tie-limited floor") {
  QberCurveRequest req;
  req.pm = true;
  req.eta_alpha2_values = {1.0, 10.0, 50.0, 200.0};
  req.env = env_with(1.0, 0.0);
  req.thetas = {kPi / 2.0};
  const auto points = qber_curve(req);
  double last = 1.0;
  for (const auto& pt : points) {
    last = pt.qber;
    CHECK(pt.qber >= 0.0);
  }
  CHECK(last < 1e-9);  // orthogonal, bright, noiseless: errors vanish
}

TEST_CASE("config validation") {
  TransmissionConfig cfg;
  cfg.n_pulses = 0;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  QberCurveRequest req;
  req.eta_alpha2_values = {};
  CHECK_THROWS_AS(qber_curve(req), std::invalid_argument);
}
