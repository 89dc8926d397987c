#include "qkpc/wiretap.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qkpc {

void LinkEnvironment::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error("LinkEnvironment: eta must be in (0,1]");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw std::domain_error("LinkEnvironment: delta must be finite and >= 0");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::domain_error("LinkEnvironment: gamma must be in (0,1]");
  }
}

void OokParams::validate() const {
  if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) {
    throw std::domain_error("OokParams: mean_photons must be finite and >= 0");
  }
  if (threshold_k < 1) {
    throw std::domain_error("OokParams: threshold_k must be >= 1");
  }
  if (!(q0 > 0.0 && q0 < 1.0)) {
    throw std::domain_error("OokParams: q0 must be in (0,1)");
  }
}

void PmParams::validate() const {
  if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons)) {
    throw std::domain_error("PmParams: mean_photons must be finite and >= 0");
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::domain_error("PmParams: theta must be in [0, pi]");
  }
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw std::domain_error("PmParams: kappa must be in [0,1]");
  }
  if (!(q0 > 0.0 && q0 < 1.0)) {
    throw std::domain_error("PmParams: q0 must be in (0,1)");
  }
}

BinaryChannel BinaryChannel::from_output0(Probability e00, Probability e10) {
  BinaryChannel ch;
  ch.eps00 = e00.value();
  ch.eps01 = 1.0 - ch.eps00;
  ch.eps10 = e10.value();
  ch.eps11 = 1.0 - ch.eps10;
  return ch;
}

BinaryChannel ook_channel(const OokParams& params, const LinkEnvironment& env) {
  params.validate();
  env.validate();
  const Probability e00 = poisson_cdf_below(Rate(env.delta), params.threshold_k);
  const Probability e10 = poisson_cdf_below(
      Rate(env.eta * params.mean_photons + env.delta), params.threshold_k);
  return BinaryChannel::from_output0(e00, e10);
}

PmDetectorRates pm_detector_rates(const PmParams& params, const LinkEnvironment& env) {
  params.validate();
  env.validate();
  const double signal = env.eta * params.mean_photons;
  const double rot = params.measurement_rotation();
  const double cd = std::cos(rot);
  const double sd = std::sin(rot);
  const double ct = std::cos(params.theta + rot);
  const double st = std::sin(params.theta + rot);
  return PmDetectorRates{
      signal * cd * cd + env.delta,
      signal * sd * sd + env.delta,
      params.kappa * signal * ct * ct + env.delta,
      params.kappa * signal * st * st + env.delta,
  };
}

namespace {

double tie_weight_toward_output1(TieRule rule) {
  switch (rule) {
    case TieRule::kAlwaysZero:
      return 0.0;
    case TieRule::kAlwaysOne:
      return 1.0;
    case TieRule::kRandom:
      return 0.5;
  }
  throw std::logic_error("unknown TieRule");
}

}  // namespace

BinaryChannel pm_channel(const PmParams& params, const LinkEnvironment& env) {
  const PmDetectorRates rates = pm_detector_rates(params, env);
  const ClickDifferenceStats in0 =
      click_difference_stats(Rate(rates.input0_det0), Rate(rates.input0_det1));
  const ClickDifferenceStats in1 =
      click_difference_stats(Rate(rates.input1_det0), Rate(rates.input1_det1));
  // Output 0 means "detector 0 saw strictly more clicks" plus whatever share
  // of the tie mass the rule assigns to output 0.
  const double w1 = tie_weight_toward_output1(params.tie_rule);
  const Probability e00 = Probability::clamped(in0.tail_ge0 - w1 * in0.tie);
  const Probability e10 = Probability::clamped(in1.tail_ge0 - w1 * in1.tie);
  return BinaryChannel::from_output0(e00, e10);
}

std::pair<Probability, Probability> pm_tie_probabilities(const PmParams& params,
                                                         const LinkEnvironment& env) {
  const PmDetectorRates rates = pm_detector_rates(params, env);
  return {
      click_difference_pmf(Rate(rates.input0_det0), Rate(rates.input0_det1), 0),
      click_difference_pmf(Rate(rates.input1_det0), Rate(rates.input1_det1), 0),
  };
}

namespace {

Probability helstrom_error(double squared_overlap) {
  return Probability::clamped(0.5 * (1.0 - std::sqrt(1.0 - squared_overlap)));
}

double eve_efficiency(double gamma, double eta, bool include_receiver_efficiency) {
  if (!(gamma > 0.0 && gamma <= 1.0) || !(eta > 0.0 && eta <= 1.0)) {
    throw std::domain_error("eve_error: gamma and eta must be in (0,1]");
  }
  return include_receiver_efficiency ? gamma * eta : gamma;
}

}  // namespace

Probability eve_error_ook(double gamma, double eta, double mean_photons,
                          bool include_receiver_efficiency) {
  if (!(mean_photons >= 0.0)) {
    throw std::domain_error("eve_error_ook: mean_photons must be >= 0");
  }
  const double g = eve_efficiency(gamma, eta, include_receiver_efficiency);
  return helstrom_error(std::exp(-g * mean_photons));
}

Probability eve_error_pm_general(double gamma, double eta, double mean_photons,
                                 double theta, double kappa,
                                 bool include_receiver_efficiency) {
  if (!(mean_photons >= 0.0)) {
    throw std::domain_error("eve_error_pm: mean_photons must be >= 0");
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::domain_error("eve_error_pm: theta must be in [0, pi]");
  }
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw std::domain_error("eve_error_pm: kappa must be in [0,1]");
  }
  const double g = eve_efficiency(gamma, eta, include_receiver_efficiency);
  const double exponent =
      g * mean_photons * (1.0 + kappa - 2.0 * std::sqrt(kappa) * std::cos(theta));
  return helstrom_error(std::exp(-exponent));
}

Probability eve_error_pm(double gamma, double eta, double mean_photons, double theta,
                         bool include_receiver_efficiency) {
  return eve_error_pm_general(gamma, eta, mean_photons, theta, 1.0,
                              include_receiver_efficiency);
}

}  // namespace qkpc
