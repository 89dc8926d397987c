#include "qkpc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qkpc {

int DetectorModel::intervals() const {
  validate();
  return static_cast<int>(std::floor(pulse_width_s / dead_time_s));
}

DetectorModel DetectorModel::experiment_default() { return DetectorModel{}; }

DetectorModel DetectorModel::paper_appendix() {
  DetectorModel m;
  m.dead_time_s = 40e-9;
  return m;
}

void DetectorModel::validate() const {
  if (!(dead_time_s > 0.0) || !(pulse_width_s > 0.0)) {
    throw std::domain_error("DetectorModel: dead time and pulse width must be positive");
  }
  if (pulse_width_s < dead_time_s) {
    throw std::domain_error("DetectorModel: needs at least one interval");
  }
  if (!(dark_rate_hz >= 0.0)) {
    throw std::domain_error("DetectorModel: dark rate must be >= 0");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::domain_error("DetectorModel: efficiency must be in (0,1]");
  }
}

namespace {

void check_intervals(int n_intervals) {
  if (n_intervals < 1) {
    throw std::domain_error("interval count must be >= 1");
  }
}

double log_binomial_pmf(int n, int k, double p) {
  // 0 < p < 1, 0 <= k <= n
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

}  // namespace

Probability interval_click_prob(double mean_photons, int n_intervals) {
  check_intervals(n_intervals);
  if (!(mean_photons >= 0.0)) {
    throw std::domain_error("interval_click_prob: mean_photons must be >= 0");
  }
  return Probability::clamped(-std::expm1(-mean_photons / n_intervals));
}

Probability pnr_count_pmf(double mean_photons, int n_intervals, int k) {
  check_intervals(n_intervals);
  if (k < 0) {
    throw std::domain_error("pnr_count_pmf: negative count");
  }
  if (k > n_intervals) {
    return Probability(0.0);  // more clicks than intervals is impossible
  }
  const double p = interval_click_prob(mean_photons, n_intervals).value();
  if (p == 0.0) {
    return Probability(k == 0 ? 1.0 : 0.0);
  }
  if (p == 1.0) {
    return Probability(k == n_intervals ? 1.0 : 0.0);
  }
  const double lp = log_binomial_pmf(n_intervals, k, p);
  return Probability::clamped(lp < -745.0 ? 0.0 : std::exp(lp));
}

double expected_lost_photons(double mean_photons, int n_intervals) {
  check_intervals(n_intervals);
  if (!(mean_photons >= 0.0)) {
    throw std::domain_error("expected_lost_photons: mean_photons must be >= 0");
  }
  return mean_photons + n_intervals * std::expm1(-mean_photons / n_intervals);
}

double expected_lost_photons_truncated(double mean_photons, int n_intervals,
                                       int max_lost) {
  check_intervals(n_intervals);
  if (max_lost < 1) {
    throw std::domain_error("expected_lost_photons_truncated: max_lost must be >= 1");
  }
  const double mu = mean_photons / n_intervals;
  // Per interval, losing j photons means j+1 arrived there.
  std::vector<double> loss_pmf(static_cast<std::size_t>(max_lost) + 2, 0.0);
  double cum = 0.0;
  for (int j = 0; j <= max_lost; ++j) {
    const double p =
        j == 0 ? std::exp(-mu) * (1.0 + mu) : poisson_pmf(Rate(mu), j + 1).value();
    loss_pmf[static_cast<std::size_t>(j)] = p;
    cum += p;
  }
  loss_pmf[static_cast<std::size_t>(max_lost) + 1] = std::max(0.0, 1.0 - cum);  // overflow bucket

  // Total-loss distribution over the pulse, capped at max_lost+1.
  std::vector<double> total(static_cast<std::size_t>(max_lost) + 2, 0.0);
  total[0] = 1.0;
  for (int interval = 0; interval < n_intervals; ++interval) {
    std::vector<double> next(total.size(), 0.0);
    for (int have = 0; have <= max_lost + 1; ++have) {
      const double w = total[static_cast<std::size_t>(have)];
      if (w == 0.0) continue;
      for (int j = 0; j <= max_lost + 1; ++j) {
        const int to = std::min(have + j, max_lost + 1);
        next[static_cast<std::size_t>(to)] += w * loss_pmf[static_cast<std::size_t>(j)];
      }
    }
    total.swap(next);
  }
  double estimate = 0.0;
  for (int n = 1; n <= max_lost; ++n) {
    estimate += n * total[static_cast<std::size_t>(n)];
  }
  return estimate;
}

double binomial_poisson_total_variation(double mean_photons, int n_intervals,
                                        double poisson_mean) {
  check_intervals(n_intervals);
  const std::vector<double> pois = poisson_pmf_table(poisson_mean, n_intervals);
  double acc = 0.0;
  double pois_mass = 0.0;
  for (int k = 0; k <= n_intervals; ++k) {
    acc += std::abs(pnr_count_pmf(mean_photons, n_intervals, k).value() -
                    pois[static_cast<std::size_t>(k)]);
    pois_mass += pois[static_cast<std::size_t>(k)];
  }
  // Poisson tail beyond N, where the binomial has no mass at all.
  acc += std::max(0.0, 1.0 - pois_mass);
  return 0.5 * acc;
}

int sample_pulse_clicks(std::mt19937_64& rng, const DetectorModel& model,
                        Rate arrival_rate) {
  model.validate();
  std::poisson_distribution<int> photon_count(arrival_rate.value());
  const int arrivals = arrival_rate.value() == 0.0 ? 0 : photon_count(rng);
  if (arrivals == 0) {
    return 0;
  }
  std::uniform_real_distribution<double> position(0.0, model.pulse_width_s);
  std::vector<double> times(static_cast<std::size_t>(arrivals));
  for (double& t : times) {
    t = position(rng);
  }
  std::sort(times.begin(), times.end());
  int clicks = 0;
  double blocked_until = -1.0;
  for (double t : times) {
    if (t >= blocked_until) {
      ++clicks;
      blocked_until = t + model.dead_time_s;
    }
  }
  return clicks;
}

int sample_pulse_clicks_intervals(std::mt19937_64& rng, const DetectorModel& model,
                                  Rate arrival_rate) {
  const int n = model.intervals();
  std::poisson_distribution<int> photon_count(arrival_rate.value());
  const int arrivals = arrival_rate.value() == 0.0 ? 0 : photon_count(rng);
  if (arrivals == 0) {
    return 0;
  }
  std::uniform_int_distribution<int> bin(0, n - 1);
  std::vector<bool> occupied(static_cast<std::size_t>(n), false);
  int clicks = 0;
  for (int i = 0; i < arrivals; ++i) {
    const int b = bin(rng);
    if (!occupied[static_cast<std::size_t>(b)]) {
      occupied[static_cast<std::size_t>(b)] = true;
      ++clicks;
    }
  }
  return clicks;
}

int sample_pulse_clicks_ideal(std::mt19937_64& rng, Rate arrival_rate) {
  if (arrival_rate.value() == 0.0) {
    return 0;
  }
  std::poisson_distribution<int> photon_count(arrival_rate.value());
  return photon_count(rng);
}

}  // namespace qkpc
