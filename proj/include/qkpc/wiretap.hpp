#pragma once

#include <utility>

#include "qkpc/photon_stats.hpp"

// Induced classical binary channels for Bob's two receivers (OOK threshold
// decoder, polarization-multiplexed majority-click decoder) and Eve's
// Helstrom minimum-error bounds.

namespace qkpc {

inline constexpr double kPi = 3.14159265358979323846;

inline double degrees_to_radians(double deg) { return deg * kPi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / kPi; }

// What the decoder outputs when both detectors register the same count.
// AlwaysOne is the majority-click rule of the protocol and is optimal for
// photon ratios in [0,1]; the other two exist to prove that point.
enum class TieRule {
  kAlwaysZero,
  kAlwaysOne,
  kRandom,  // fair coin; the uniform-prior reading of the random strategy
};

// Link parameters shared by every scheme.
//
// eve_includes_receiver_efficiency: Eve's interception efficiency is
// gamma*eta when true (the wiretap statement of the channel model) and the
// bare gamma when false (the literal polarization-bound expression, which
// omits eta). Applied uniformly to both encodings.
struct LinkEnvironment {
  double eta = 1.0;      // end-to-end efficiency incl. Bob's detector, (0,1]
  double delta = 0.0;    // mean noise clicks per pulse per detector, >= 0
  double gamma = 0.1;    // fraction of Bob's flux intercepted by Eve, (0,1]
  bool eve_includes_receiver_efficiency = true;

  void validate() const;
};

struct OokParams {
  double mean_photons = 1.0;  // |alpha|^2 at the channel input, before eta
  int threshold_k = 1;        // decode 1 when clicks >= k
  double q0 = 0.5;            // prior of input bit 0, in (0,1)

  void validate() const;
};

struct PmParams {
  double mean_photons = 1.0;  // |alpha|^2 of the input-0 state
  double theta = kPi / 2.0;   // polarization angle between states, [0, pi]
  double kappa = 1.0;         // photon ratio of the input-1 state, [0,1]
  double q0 = 0.5;
  TieRule tie_rule = TieRule::kAlwaysOne;

  // The basis rotation applied before the polarizing splitter is derived,
  // not stored: it balances the two states around the measurement axes.
  double measurement_rotation() const { return -theta / 2.0 + kPi / 4.0; }

  void validate() const;
};

// Conditional probabilities eps[input][output] of the induced binary channel.
struct BinaryChannel {
  double eps00 = 1.0;
  double eps01 = 0.0;
  double eps10 = 0.0;
  double eps11 = 1.0;

  // Builds the channel from the two "output 0" columns; complements filled in.
  static BinaryChannel from_output0(Probability e00, Probability e10);

  double qber() const { return (eps01 + eps10) / 2.0; }
};

BinaryChannel ook_channel(const OokParams& params, const LinkEnvironment& env);

// Mean clicks per pulse at each detector, conditioned on the input bit.
// Shared between the analytic channel and the Monte Carlo simulator.
struct PmDetectorRates {
  double input0_det0;
  double input0_det1;
  double input1_det0;
  double input1_det1;
};

PmDetectorRates pm_detector_rates(const PmParams& params, const LinkEnvironment& env);

BinaryChannel pm_channel(const PmParams& params, const LinkEnvironment& env);

// Tie masses P(m=0|input 0) and P(m=0|input 1) under the same rates the
// channel uses. For photon ratios in [0,1] the second dominates the first.
std::pair<Probability, Probability> pm_tie_probabilities(const PmParams& params,
                                                         const LinkEnvironment& env);

// Helstrom minimum-error probability for Eve discriminating vacuum vs a
// coherent pulse, squared overlap e^{-gamma_eff |alpha|^2}.
Probability eve_error_ook(double gamma, double eta, double mean_photons,
                          bool include_receiver_efficiency = true);

// Same bound for the two polarization states with equal photon numbers,
// squared overlap e^{-2 gamma_eff |alpha|^2 (1 - cos theta)}.
Probability eve_error_pm(double gamma, double eta, double mean_photons, double theta,
                         bool include_receiver_efficiency = true);

// General photon ratio kappa: squared overlap
// e^{-gamma_eff |alpha|^2 (1 + kappa - 2 sqrt(kappa) cos theta)}.
// Reduces to the equal-photon bound at kappa = 1 and to the OOK bound at
// kappa = 0, which is what lets the optimizer treat OOK as a limit of PM.
Probability eve_error_pm_general(double gamma, double eta, double mean_photons,
                                 double theta, double kappa,
                                 bool include_receiver_efficiency = true);

}  // namespace qkpc
