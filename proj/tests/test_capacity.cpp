#include "qkpc/capacity.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "test_oracles.hpp"

using namespace qkpc;
using namespace qkpc::test;

namespace {

LinkEnvironment env_with(double gamma, double delta, double eta = 1.0) {
  LinkEnvironment env;
  env.gamma = gamma;
  env.delta = delta;
  env.eta = eta;
  return env;
}

BinaryChannel channel(double e00, double e10) {
  return BinaryChannel::from_output0(Probability(e00), Probability(e10));
}

}  // namespace

TEST_CASE("mutual information for Bob") {
  CHECK(mutual_info_bob(channel(1.0, 0.0), 0.5) == doctest::Approx(1.0));
  CHECK(mutual_info_bob(channel(0.7, 0.7), 0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mutual_info_bob(channel(1.0, std::exp(-1.0)), 0.5) ==
        doctest::Approx(0.4255306192034504).epsilon(1e-12));
}

TEST_CASE("mutual information reduces to the symmetric-prior form") {
  for (auto [e00, e10] : {std::pair{0.9, 0.2}, {0.99, 0.5}, {0.6, 0.3}}) {
    const double direct = mutual_info_bob(channel(e00, e10), 0.5);
    const double closed = binary_entropy((e00 + e10) / 2.0) -
                          (binary_entropy(e00) + binary_entropy(e10)) / 2.0;
    CHECK(direct == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("mutual information against the generic I(X;Y) oracle") {
  for (double q0 : {0.2, 0.5, 0.8}) {
    for (auto [e00, e10] : {std::pair{0.95, 0.1}, {0.7, 0.4}}) {
      CHECK(mutual_info_bob(channel(e00, e10), q0) ==
            doctest::Approx(oracle_mutual_information(q0, e00, e10)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mutual information for Eve") {
  CHECK(mutual_info_eve(Probability(0.5)) == doctest::Approx(0.0));
  CHECK(mutual_info_eve(Probability(0.0)) == doctest::Approx(1.0));
  CHECK(mutual_info_eve(Probability(0.146447)) ==
        doctest::Approx(0.3991229699876895).epsilon(1e-12));
  CHECK_THROWS_AS(mutual_info_eve(Probability(0.6)), std::domain_error);
}

TEST_CASE("capacity point evaluations") {
  SUBCASE("no signal, no capacity") {
    OokParams p;
    p.mean_photons = 0.0;
    const CapacityResult r =
        private_capacity_point(Scheme::kOokPnr, p, env_with(0.1, 0.0));
    CHECK(r.c_p == 0.0);
  }
  SUBCASE("golden cross-validated point") {
    OokParams p;
    p.mean_photons = 1.0;
    const CapacityResult r =
        private_capacity_point(Scheme::kOokThreshold1, p, env_with(0.1, 4.8e-6));
    CHECK(r.i_bob == doctest::Approx(0.4254890979229689).epsilon(1e-10));
    CHECK(r.i_eve == doctest::Approx(0.06977772607848731).epsilon(1e-10));
    CHECK(r.c_p == doctest::Approx(0.3557113718444816).epsilon(1e-10));
    CHECK(r.c_p == doctest::Approx(std::max(r.i_bob - r.i_eve, 0.0)).epsilon(1e-9));
  }
  SUBCASE("eve sees everything: capacity floors at zero") {
    // A Helstrom-ideal Eve at gamma = 1 lower-bounds any noisy threshold
    // receiver's error, so the difference is never positive.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      OokParams p;
      p.mean_photons = std::pow(10.0, -2.0 + 4.0 * u(rng));
      p.threshold_k = 1 + static_cast<int>(u(rng) * 20);
      const CapacityResult r = private_capacity_point(
          Scheme::kOokPnr, p, env_with(1.0, 2.0 * u(rng)));
      CHECK(r.c_p == 0.0);
      CHECK(r.i_bob <= r.i_eve + 1e-12);
    }
  }
  SUBCASE("scheme and params must match") {
    PmParams pm;
    CHECK_THROWS_AS(private_capacity_point(Scheme::kOokPnr, pm, env_with(0.1, 0.0)),
                    std::invalid_argument);
    OokParams ook;
    ook.threshold_k = 2;
    CHECK_THROWS_AS(
        private_capacity_point(Scheme::kOokThreshold1, ook, env_with(0.1, 0.0)),
        std::invalid_argument);
  }
}

TEST_CASE("optimizer reproduces the reference capacity") {
  const CapacityResult r =
      optimize_private_capacity(Scheme::kOokThreshold1, env_with(0.1, 4.8e-6));
  CHECK(r.c_p == doctest::Approx(0.6808).epsilon(2e-3));
  const OokParams& p = std::get<OokParams>(r.best_params);
  CHECK(p.threshold_k == 1);
  CHECK(p.mean_photons == doctest::Approx(3.95).epsilon(0.05));
  CHECK(r.c_p == doctest::Approx(std::max(r.i_bob - r.i_eve, 0.0)).epsilon(1e-9));
}

TEST_CASE("optimizer shuts down when Eve holds the whole signal") {
  for (Scheme scheme : {Scheme::kOokThreshold1, Scheme::kOokPnr, Scheme::kPm}) {
    LinkEnvironment env = env_with(1.0, 0.0);
    const CapacityResult r = optimize_private_capacity(scheme, env);
    CHECK(r.c_p == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("pm outperforms counting ook in heavy noise") {
  const double pnr = optimize_private_capacity(Scheme::kOokPnr, env_with(0.1, 10.0)).c_p;
  const double pm = optimize_private_capacity(Scheme::kPm, env_with(0.1, 10.0)).c_p;
  CHECK(pm > pnr);
}

TEST_CASE("optimizer respects constraints") {
  const CapacityResult r =
      optimize_private_capacity(Scheme::kPmConstrained, env_with(0.1, 30.0));
  const PmParams& p = std::get<PmParams>(r.best_params);
  CHECK(p.mean_photons <= 20.0 + 1e-9);
  CHECK(p.theta <= degrees_to_radians(10.0) + 1e-9);
  CHECK(r.c_p > 0.02);

  OptimizerConstraints bad;
  bad.min_theta = 1.0;
  bad.max_theta = 0.5;
  CHECK_THROWS_AS(optimize_private_capacity(Scheme::kPm, env_with(0.1, 0.0), bad),
                  std::invalid_argument);
}

TEST_CASE("usd closed forms") {
  CHECK(usd_bob_info(1.0, 3.0, 0.0) == doctest::Approx(0.0));
  CHECK(usd_bob_info(1.0, std::log(2.0), kPi / 2.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(usd_bob_info(1.0, 1e4, kPi / 2.0) == doctest::Approx(1.0));
  CHECK(usd_bob_info(1.0, 5.0, kPi / 2.0) ==
        doctest::Approx(0.9932620530009145).epsilon(1e-12));
}

TEST_CASE("usd single point against the straight-line reimplementation") {
  PmParams p;
  p.mean_photons = 5.0;
  p.theta = kPi / 2.0;
  const CapacityResult r = private_capacity_point(Scheme::kUsdPm, p, env_with(0.1, 0.0));
  CHECK(r.i_bob == doctest::Approx(0.9932620530009145).epsilon(1e-12));
  CHECK(r.i_eve == doctest::Approx(0.5232233895668055).epsilon(1e-10));
  CHECK(r.c_p == doctest::Approx(0.47003866343410905).epsilon(1e-10));
}

TEST_CASE("usd never reaches the minimum-error benchmark") {
  for (double s : {0.1, 0.5, 2.0, 10.0, 60.0}) {
    const double usd = usd_capacity_at_photons(s, 0.1);
    const double min_error = pm_minimum_error_capacity_at_photons(s, 0.1);
    CHECK(usd <= min_error + 1e-9);
  }
}

TEST_CASE("usd stays below the optimized pm scheme on a quiet link") {
  // The comparison is meaningful where both receivers face the same physics:
  // the unambiguous readout is modeled noiseless, so pin delta to zero.
  const double usd = usd_private_capacity(env_with(0.1, 0.0)).c_p;
  const double pm = optimize_private_capacity(Scheme::kPm, env_with(0.1, 0.0)).c_p;
  CHECK(usd <= pm + 1e-3);
}

TEST_CASE("capacity sweep emits row-major cells and is deterministic") {
  SweepGrid grid;
  grid.scheme = Scheme::kOokThreshold1;
  grid.gamma_values = {0.1, 0.5};
  grid.delta_values = {1e-4, 0.1, 1.0};
  const auto cells = capacity_sweep(grid, 2);
  REQUIRE(cells.size() == 6);
  CHECK(cells[0].gamma == 0.1);
  CHECK(cells[0].delta == 1e-4);
  CHECK(cells[2].delta == 1.0);
  CHECK(cells[3].gamma == 0.5);
  const auto again = capacity_sweep(grid, 1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].result.c_p == again[i].result.c_p);
    CHECK_FALSE(cells[i].failed);
  }
  // single-cell grid degenerates to one optimize call
  SweepGrid single;
  single.scheme = Scheme::kOokThreshold1;
  single.gamma_values = {0.1};
  single.delta_values = {0.1};
  const auto one = capacity_sweep(single);
  REQUIRE(one.size() == 1);
  CHECK(one[0].result.c_p ==
        doctest::Approx(
            optimize_private_capacity(Scheme::kOokThreshold1, env_with(0.1, 0.1)).c_p)
            .epsilon(1e-12));
}

TEST_CASE("sweep grid validation") {
  SweepGrid grid;
  grid.gamma_values = {0.2, 0.1};
  grid.delta_values = {0.1};
  CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
  grid.gamma_values = {};
  CHECK_THROWS_AS(grid.validate(), std::invalid_argument);
}

TEST_CASE("capacity is monotone along each noise axis") {
  double prev = 1.0;
  for (double d : {1e-4, 0.05, 0.3, 1.0}) {
    const double v = optimize_private_capacity(Scheme::kOokPnr, env_with(0.1, d)).c_p;
    CHECK(v <= prev + 1e-3);
    prev = v;
  }
  prev = 1.0;
  for (double g : {0.05, 0.2, 0.5, 0.9}) {
    const double v = optimize_private_capacity(Scheme::kOokPnr, env_with(g, 0.1)).c_p;
    CHECK(v <= prev + 1e-3);
    prev = v;
  }
}

TEST_CASE("uniform prior is near-optimal") {
  for (auto [gamma, delta] : {std::pair{0.1, 1e-4}, {0.1, 1.0}, {0.5, 0.1}}) {
    const double fixed =
        optimize_private_capacity(Scheme::kOokPnr, env_with(gamma, delta)).c_p;
    OptimizerConstraints c;
    c.optimize_q0 = true;
    const double free_q0 =
        optimize_private_capacity(Scheme::kOokPnr, env_with(gamma, delta), c).c_p;
    CHECK(free_q0 >= fixed - 1e-9);
    CHECK(free_q0 - fixed < 1e-2);
  }
}

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::kOokThreshold1, Scheme::kOokPnr, Scheme::kPm,
                   Scheme::kPmConstrained, Scheme::kUsdPm}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK_FALSE(parse_scheme("nonsense").has_value());
}
