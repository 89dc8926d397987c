#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "qkpc/capacity.hpp"
#include "qkpc/detector.hpp"
#include "qkpc/wiretap.hpp"

// Monte Carlo re-creation of the transmission experiment: draw a bit stream,
// push each pulse through the lossy noisy link, discriminate with the chosen
// receiver, and estimate the QBER with its uncertainty. The point is to
// validate the analytic channel models, so the default click sampling is the
// ideal Poisson statistic those models assume; the interval and dead-time
// detector paths are available to quantify what the real readout changes.

namespace qkpc {

enum class SamplingMode {
  kIdealPnr,       // Poisson clicks, the statistic of the analytic channel
  kIntervalModel,  // binomial interval readout (pnr_count_pmf statistics)
  kDeadTime,       // continuous-time dead-time truncation
};

struct TransmissionConfig {
  std::variant<OokParams, PmParams> params;  // OOK or PM transmission
  LinkEnvironment env;
  DetectorModel detector = DetectorModel::experiment_default();
  SamplingMode sampling = SamplingMode::kIdealPnr;
  std::int64_t n_pulses = 500000;  // per repetition: 10 s at 50 kHz
  int repetitions = 10;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct TransmissionReport {
  double qber_mean = 0.0;
  double qber_stddev = 0.0;  // sample std dev over repetitions
  // OOK: mean clicks over bit-1 pulses (the power cross-check reading,
  // expected eta |alpha|^2 + delta). PM: mean total clicks over all pulses.
  double mean_clicks_per_pulse = 0.0;
  BinaryChannel confusion;  // empirical conditional frequencies
  std::vector<double> per_repetition;
  std::int64_t pulses_per_repetition = 0;
  int repetitions = 0;
};

TransmissionReport run_transmission(const TransmissionConfig& cfg);

// One row of the QBER-vs-photon-number table. Analytic rows always carry the
// closed-form value; Monte Carlo rows add the spread over repetitions.
struct QberCurvePoint {
  std::string series;
  double eta_alpha2 = 0.0;
  double qber = 0.0;
  double qber_stddev = 0.0;
  bool monte_carlo = false;
};

struct QberCurveRequest {
  bool pm = false;                      // false: OOK series per k, true: PM per theta
  std::vector<double> eta_alpha2_values;
  LinkEnvironment env;
  std::vector<int> thresholds{1};        // OOK series
  std::vector<double> thetas;            // PM series, radians
  double kappa = 1.0;
  TieRule tie_rule = TieRule::kAlwaysOne;
  std::vector<double> eve_gammas;        // one Helstrom series per value
  bool monte_carlo = false;
  std::int64_t mc_pulses = 200000;
  int mc_repetitions = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

std::vector<QberCurvePoint> qber_curve(const QberCurveRequest& request);

}  // namespace qkpc
