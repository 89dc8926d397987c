#include "qkpc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qkpc/rng.hpp"

namespace qkpc {

void TransmissionConfig::validate() const {
  env.validate();
  std::visit([](const auto& p) { p.validate(); }, params);
  detector.validate();
  if (n_pulses < 1) {
    throw std::domain_error("TransmissionConfig: n_pulses must be >= 1");
  }
  if (repetitions < 1) {
    throw std::domain_error("TransmissionConfig: repetitions must be >= 1");
  }
}

namespace {

struct RepetitionTally {
  std::int64_t errors = 0;
  std::int64_t count[2][2] = {{0, 0}, {0, 0}};  // [input][output]
  std::int64_t clicks = 0;        // see TransmissionReport for the convention
  std::int64_t click_pulses = 0;  // pulses the click tally averages over
};

int draw_clicks(std::mt19937_64& rng, const TransmissionConfig& cfg, double rate) {
  switch (cfg.sampling) {
    case SamplingMode::kIdealPnr:
      return sample_pulse_clicks_ideal(rng, Rate(rate));
    case SamplingMode::kIntervalModel:
      return sample_pulse_clicks_intervals(rng, cfg.detector, Rate(rate));
    case SamplingMode::kDeadTime:
      return sample_pulse_clicks(rng, cfg.detector, Rate(rate));
  }
  throw std::logic_error("unknown SamplingMode");
}

RepetitionTally run_repetition(const TransmissionConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RepetitionTally tally;

  const bool is_pm = std::holds_alternative<PmParams>(cfg.params);
  double q0 = 0.0;
  double ook_rate0 = 0.0;
  double ook_rate1 = 0.0;
  int threshold_k = 1;
  PmDetectorRates pm_rates{};
  TieRule tie_rule = TieRule::kAlwaysOne;

  if (is_pm) {
    const PmParams& p = std::get<PmParams>(cfg.params);
    q0 = p.q0;
    pm_rates = pm_detector_rates(p, cfg.env);
    tie_rule = p.tie_rule;
  } else {
    const OokParams& p = std::get<OokParams>(cfg.params);
    q0 = p.q0;
    threshold_k = p.threshold_k;
    ook_rate0 = cfg.env.delta;
    ook_rate1 = cfg.env.eta * p.mean_photons + cfg.env.delta;
  }

  for (std::int64_t i = 0; i < cfg.n_pulses; ++i) {
    const int input = unit(rng) < q0 ? 0 : 1;
    int output = 0;
    if (is_pm) {
      const double r0 = input == 0 ? pm_rates.input0_det0 : pm_rates.input1_det0;
      const double r1 = input == 0 ? pm_rates.input0_det1 : pm_rates.input1_det1;
      const int c0 = draw_clicks(rng, cfg, r0);
      const int c1 = draw_clicks(rng, cfg, r1);
      if (c0 > c1) {
        output = 0;
      } else if (c0 < c1) {
        output = 1;
      } else {
        switch (tie_rule) {
          case TieRule::kAlwaysZero:
            output = 0;
            break;
          case TieRule::kAlwaysOne:
            output = 1;
            break;
          case TieRule::kRandom:
            output = unit(rng) < 0.5 ? 0 : 1;
            break;
        }
      }
      tally.clicks += c0 + c1;
      ++tally.click_pulses;
    } else {
      const int clicks = draw_clicks(rng, cfg, input == 0 ? ook_rate0 : ook_rate1);
      output = clicks >= threshold_k ? 1 : 0;
      if (input == 1) {
        tally.clicks += clicks;
        ++tally.click_pulses;
      }
    }
    ++tally.count[input][output];
    if (output != input) {
      ++tally.errors;
    }
  }
  return tally;
}

}  // namespace

TransmissionReport run_transmission(const TransmissionConfig& cfg) {
  cfg.validate();

  std::vector<RepetitionTally> tallies(static_cast<std::size_t>(cfg.repetitions));
  auto run_index = [&](int rep) {
    tallies[static_cast<std::size_t>(rep)] =
        run_repetition(cfg, derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
  };

  int n_threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, cfg.repetitions);
  if (n_threads <= 1) {
    for (int r = 0; r < cfg.repetitions; ++r) {
      run_index(r);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < cfg.repetitions; r = next.fetch_add(1)) {
          run_index(r);
        }
      });
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  // All tallies are integer counts, so aggregation in repetition order is
  // deterministic no matter how the work was scheduled.
  TransmissionReport report;
  report.pulses_per_repetition = cfg.n_pulses;
  report.repetitions = cfg.repetitions;
  report.per_repetition.reserve(tallies.size());

  std::int64_t total[2][2] = {{0, 0}, {0, 0}};
  std::int64_t clicks = 0;
  std::int64_t click_pulses = 0;
  for (const RepetitionTally& t : tallies) {
    report.per_repetition.push_back(static_cast<double>(t.errors) /
                                    static_cast<double>(cfg.n_pulses));
    for (int i = 0; i < 2; ++i) {
      for (int o = 0; o < 2; ++o) {
        total[i][o] += t.count[i][o];
      }
    }
    clicks += t.clicks;
    click_pulses += t.click_pulses;
  }

  double mean = 0.0;
  for (double q : report.per_repetition) {
    mean += q;
  }
  mean /= static_cast<double>(report.per_repetition.size());
  report.qber_mean = mean;
  if (report.per_repetition.size() > 1) {
    double ss = 0.0;
    for (double q : report.per_repetition) {
      ss += (q - mean) * (q - mean);
    }
    report.qber_stddev = std::sqrt(ss / static_cast<double>(report.per_repetition.size() - 1));
  }

  const std::int64_t in0 = total[0][0] + total[0][1];
  const std::int64_t in1 = total[1][0] + total[1][1];
  report.confusion.eps00 = in0 > 0 ? static_cast<double>(total[0][0]) / in0 : 1.0;
  report.confusion.eps01 = in0 > 0 ? static_cast<double>(total[0][1]) / in0 : 0.0;
  report.confusion.eps10 = in1 > 0 ? static_cast<double>(total[1][0]) / in1 : 0.0;
  report.confusion.eps11 = in1 > 0 ? static_cast<double>(total[1][1]) / in1 : 1.0;
  report.mean_clicks_per_pulse =
      click_pulses > 0 ? static_cast<double>(clicks) / click_pulses : 0.0;
  return report;
}

void QberCurveRequest::validate() const {
  env.validate();
  if (eta_alpha2_values.empty()) {
    throw std::invalid_argument("QberCurveRequest: no photon-number points");
  }
  for (double x : eta_alpha2_values) {
    if (!(x >= 0.0)) {
      throw std::invalid_argument("QberCurveRequest: eta_alpha2 must be >= 0");
    }
  }
  if (pm ? thetas.empty() : thresholds.empty()) {
    throw std::invalid_argument("QberCurveRequest: no series parameters");
  }
}

namespace {

std::string format_angle_deg(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", radians_to_degrees(theta));
  return buf;
}

std::string format_gamma(double gamma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", gamma);
  return buf;
}

}  // namespace

std::vector<QberCurvePoint> qber_curve(const QberCurveRequest& request) {
  request.validate();
  std::vector<QberCurvePoint> points;

  std::uint64_t mc_series = 0;
  auto emit_series = [&](const std::string& name,
                         const std::function<double(double)>& analytic_qber,
                         const std::function<TransmissionConfig(double)>& mc_config) {
    for (double x : request.eta_alpha2_values) {
      points.push_back({name, x, analytic_qber(x), 0.0, false});
    }
    if (request.monte_carlo && mc_config != nullptr) {
      const std::uint64_t series_seed = derive_stream_seed(request.seed, mc_series);
      for (double x : request.eta_alpha2_values) {
        TransmissionConfig cfg = mc_config(x);
        cfg.seed = derive_stream_seed(series_seed, static_cast<std::uint64_t>(
                                                       points.size()));
        const TransmissionReport rep = run_transmission(cfg);
        points.push_back({name + " mc", x, rep.qber_mean, rep.qber_stddev, true});
      }
    }
    ++mc_series;
  };

  if (!request.pm) {
    for (int k : request.thresholds) {
      OokParams base;
      base.threshold_k = k;
      emit_series(
          "k=" + std::to_string(k),
          [&, k](double x) {
            OokParams p = base;
            p.mean_photons = x / request.env.eta;
            return ook_channel(p, request.env).qber();
          },
          [&, base](double x) {
            TransmissionConfig cfg;
            OokParams p = base;
            p.mean_photons = x / request.env.eta;
            cfg.params = p;
            cfg.env = request.env;
            cfg.n_pulses = request.mc_pulses;
            cfg.repetitions = request.mc_repetitions;
            return cfg;
          });
    }
  } else {
    for (double theta : request.thetas) {
      PmParams base;
      base.theta = theta;
      base.kappa = request.kappa;
      base.tie_rule = request.tie_rule;
      emit_series(
          "theta=" + format_angle_deg(theta) + "deg",
          [&, base](double x) {
            PmParams p = base;
            p.mean_photons = x / request.env.eta;
            return pm_channel(p, request.env).qber();
          },
          [&, base](double x) {
            TransmissionConfig cfg;
            PmParams p = base;
            p.mean_photons = x / request.env.eta;
            cfg.params = p;
            cfg.env = request.env;
            cfg.n_pulses = request.mc_pulses;
            cfg.repetitions = request.mc_repetitions;
            return cfg;
          });
    }
  }

  for (double gamma : request.eve_gammas) {
    for (double x : request.eta_alpha2_values) {
      // x is the photon number at Bob; Eve's bound takes the pre-efficiency
      // |alpha|^2, so divide eta back out.
      double eps;
      if (!request.pm) {
        eps = eve_error_ook(gamma, request.env.eta, x / request.env.eta,
                            request.env.eve_includes_receiver_efficiency)
                  .value();
      } else {
        // Eve's curve per angle would multiply the series; use the first
        // requested angle, matching how the comparison figures are drawn.
        eps = eve_error_pm_general(gamma, request.env.eta, x / request.env.eta,
                                   request.thetas.front(), request.kappa,
                                   request.env.eve_includes_receiver_efficiency)
                  .value();
      }
      points.push_back({"eve gamma=" + format_gamma(gamma), x, eps, 0.0, false});
    }
  }
  return points;
}

}  // namespace qkpc
