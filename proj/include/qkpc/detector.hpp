#pragma once

#include <random>

#include "qkpc/photon_stats.hpp"

// Time-multiplexed threshold detector treated as an approximate photon
// counter: a long pulse is read out as a train of dead-time-limited
// intervals, each a click/no-click measurement, so the count statistic is
// binomial instead of Poisson. Both the analytic interval model and a
// continuous-time dead-time sampler live here.

namespace qkpc {

struct DetectorModel {
  double dead_time_s = 45e-9;
  double pulse_width_s = 10e-6;
  double dark_rate_hz = 70.0;
  double efficiency = 0.5;

  // floor(pulse_width / dead_time); the number of independent threshold
  // measurements one pulse decomposes into.
  int intervals() const;

  double dark_clicks_per_pulse() const { return dark_rate_hz * pulse_width_s; }

  // Bench detector of the experiment: 45 ns dead time -> 222 intervals.
  static DetectorModel experiment_default();

  // 40 ns variant used for the interval-count estimate (10000/40 = 250).
  static DetectorModel paper_appendix();

  void validate() const;
};

// Probability that one interval registers at least one photon when
// mean_photons arrive uniformly over n_intervals: 1 - e^{-|alpha|^2/N}.
Probability interval_click_prob(double mean_photons, int n_intervals);

// Binomial count distribution of the interval train; k > N has zero mass.
Probability pnr_count_pmf(double mean_photons, int n_intervals, int k);

// Photons that shared an interval with an earlier one and were missed:
// exactly |alpha|^2 - N (1 - e^{-|alpha|^2/N}).
double expected_lost_photons(double mean_photons, int n_intervals);

// The low-order estimate that only counts pulses losing up to max_lost
// photons in total; always at or below the exact expectation.
double expected_lost_photons_truncated(double mean_photons, int n_intervals,
                                       int max_lost = 3);

// (1/2) sum_k |Binomial(N, p)(k) - Poisson(poisson_mean)(k)|, the
// quantitative form of the rare-events approximation.
double binomial_poisson_total_variation(double mean_photons, int n_intervals,
                                        double poisson_mean);

// Continuous-time sampler: arrival times uniform over the pulse, an arrival
// within dead_time of the previous registered click is discarded. This path
// loses roughly twice what the interval model does, because a registered
// click blocks a full dead-time window wherever it lands instead of only
// the remainder of its interval; tests pin the disagreement down.
int sample_pulse_clicks(std::mt19937_64& rng, const DetectorModel& model,
                        Rate arrival_rate);

// Interval-model sampler: arrivals binned into the N intervals, occupied
// intervals counted. Distributed exactly as pnr_count_pmf.
int sample_pulse_clicks_intervals(std::mt19937_64& rng, const DetectorModel& model,
                                  Rate arrival_rate);

// Ideal photon-number-resolving draw, Poisson(arrival_rate); the sampling
// path matching the analytic channel models.
int sample_pulse_clicks_ideal(std::mt19937_64& rng, Rate arrival_rate);

}  // namespace qkpc
