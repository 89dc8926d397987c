#pragma once

#include <vector>

// Photon-counting statistics shared by every other component: Poisson pulse
// statistics, click-difference (Skellam) statistics for the two-detector
// receiver, and the binary entropy function.
//
// All functions are pure and safe to call concurrently.

namespace qkpc {

inline constexpr double kProbabilityTolerance = 1e-12;

// Mean detected events per pulse (dimensionless). Must be finite and >= 0.
class Rate {
 public:
  explicit Rate(double events_per_pulse);

  double value() const { return value_; }

 private:
  double value_;
};

// A probability clamped to [0,1]. Raw values outside the interval by more
// than kProbabilityTolerance indicate an internal numerical inconsistency
// and raise instead of being clamped silently.
class Probability {
 public:
  explicit Probability(double value);

  static Probability clamped(double raw);

  double value() const { return value_; }

 private:
  Probability() = default;
  double value_ = 0.0;
};

// Truncation index for infinite sums over Poisson counts:
// ceil(lambda + 12 sqrt(lambda) + 30). Tail mass beyond it is < 1e-12 for
// every rate the optimizer visits (up to a few hundred photons per pulse).
int series_cutoff(double lambda_max);

// P(X = n) for X ~ Poisson(lambda). Evaluated in log space once
// lambda > 50 or n > 100 so that multi-hundred-photon pulses stay finite.
Probability poisson_pmf(Rate lambda, int n);

// P(X < k) = sum_{i=0}^{k-1} pmf(lambda, i). k = 0 gives the empty sum 0.
Probability poisson_cdf_below(Rate lambda, int k);

// pmf values for n = 0..max_n inclusive; the vector form the Skellam sums
// are built from.
std::vector<double> poisson_pmf_table(double lambda, int max_n);

// P(X0 - X1 = m) for independent X0 ~ Poisson(lambda0), X1 ~ Poisson(lambda1),
// as the truncated convolution series. The same code path serves asymmetric
// rates; Bessel identities appear only in tests.
Probability click_difference_pmf(Rate lambda0, Rate lambda1, int m);

// P(X0 - X1 >= 0), truncated at series_cutoff of the larger rate.
Probability click_difference_tail(Rate lambda0, Rate lambda1);

// Tail and tie mass of the click difference computed in one pass; the
// polarization receiver needs both for every rate pair.
struct ClickDifferenceStats {
  double tail_ge0;  // P(X0 - X1 >= 0)
  double tie;       // P(X0 - X1 = 0)
};

ClickDifferenceStats click_difference_stats(Rate lambda0, Rate lambda1);

// Binary entropy in bits, with h(0) = h(1) = 0 by continuity.
double binary_entropy(Probability p);

double binary_entropy(double p);  // convenience overload, same domain checks

}  // namespace qkpc
