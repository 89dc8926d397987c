#include "qkpc/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qkpc {

namespace {

constexpr double kLogSpaceRateThreshold = 50.0;
constexpr int kLogSpaceCountThreshold = 100;

double log_poisson_pmf(double lambda, int n) {
  // lambda > 0, n >= 0
  return -lambda + n * std::log(lambda) - std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace

Rate::Rate(double events_per_pulse) : value_(events_per_pulse) {
  if (!std::isfinite(value_) || value_ < 0.0) {
    throw std::domain_error("Rate must be finite and nonnegative, got " +
                            std::to_string(events_per_pulse));
  }
}

Probability::Probability(double value) : value_(value) {
  if (!(value_ >= 0.0 && value_ <= 1.0)) {
    throw std::domain_error("Probability must lie in [0,1], got " +
                            std::to_string(value));
  }
}

Probability Probability::clamped(double raw) {
  if (!std::isfinite(raw) || raw < -kProbabilityTolerance ||
      raw > 1.0 + kProbabilityTolerance) {
    throw std::logic_error(
        "probability outside [0,1] beyond tolerance (internal inconsistency): " +
        std::to_string(raw));
  }
  Probability p;
  p.value_ = std::clamp(raw, 0.0, 1.0);
  return p;
}

int series_cutoff(double lambda_max) {
  if (lambda_max < 0.0) {
    throw std::domain_error("series_cutoff: negative rate");
  }
  return static_cast<int>(std::ceil(lambda_max + 12.0 * std::sqrt(lambda_max) + 30.0));
}

Probability poisson_pmf(Rate lambda, int n) {
  if (n < 0) {
    throw std::domain_error("poisson_pmf: negative count");
  }
  const double l = lambda.value();
  if (l == 0.0) {
    return Probability(n == 0 ? 1.0 : 0.0);
  }
  if (l > kLogSpaceRateThreshold || n > kLogSpaceCountThreshold) {
    const double lp = log_poisson_pmf(l, n);
    return Probability::clamped(lp < -745.0 ? 0.0 : std::exp(lp));
  }
  const double direct =
      std::exp(-l) * std::pow(l, static_cast<double>(n)) /
      std::tgamma(static_cast<double>(n) + 1.0);
  return Probability::clamped(direct);
}

Probability poisson_cdf_below(Rate lambda, int k) {
  if (k <= 0) {
    return Probability(0.0);  // empty sum, not an error
  }
  const double l = lambda.value();
  if (l == 0.0) {
    return Probability(1.0);
  }
  if (l <= kLogSpaceRateThreshold && k <= kLogSpaceCountThreshold) {
    double term = std::exp(-l);
    double sum = term;
    for (int i = 1; i < k; ++i) {
      term *= l / static_cast<double>(i);
      sum += term;
    }
    return Probability::clamped(sum);
  }
  // Log-sum-exp keeps large rates finite even when every term underflows.
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    logs[static_cast<std::size_t>(i)] = log_poisson_pmf(l, i);
    max_log = std::max(max_log, logs[static_cast<std::size_t>(i)]);
  }
  if (max_log < -745.0) {
    return Probability(0.0);
  }
  double acc = 0.0;
  for (double lg : logs) {
    acc += std::exp(lg - max_log);
  }
  return Probability::clamped(std::exp(max_log + std::log(acc)));
}

std::vector<double> poisson_pmf_table(double lambda, int max_n) {
  if (max_n < 0) {
    throw std::domain_error("poisson_pmf_table: negative max_n");
  }
  std::vector<double> pmf(static_cast<std::size_t>(max_n) + 1, 0.0);
  if (lambda == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (lambda <= kLogSpaceRateThreshold) {
    double term = std::exp(-lambda);
    pmf[0] = term;
    for (int n = 1; n <= max_n; ++n) {
      term *= lambda / static_cast<double>(n);
      pmf[static_cast<std::size_t>(n)] = term;
    }
    return pmf;
  }
  for (int n = 0; n <= max_n; ++n) {
    const double lp = log_poisson_pmf(lambda, n);
    pmf[static_cast<std::size_t>(n)] = lp < -745.0 ? 0.0 : std::exp(lp);
  }
  return pmf;
}

Probability click_difference_pmf(Rate lambda0, Rate lambda1, int m) {
  double l0 = lambda0.value();
  double l1 = lambda1.value();
  if (m < 0) {
    std::swap(l0, l1);
    m = -m;
  }
  const int cut = series_cutoff(std::max(l0, l1));
  const std::vector<double> p0 = poisson_pmf_table(l0, cut + m);
  const std::vector<double> p1 = poisson_pmf_table(l1, cut);
  double sum = 0.0;
  for (int l = 0; l <= cut; ++l) {
    sum += p0[static_cast<std::size_t>(l + m)] * p1[static_cast<std::size_t>(l)];
  }
  return Probability::clamped(sum);
}

ClickDifferenceStats click_difference_stats(Rate lambda0, Rate lambda1) {
  const double l0 = lambda0.value();
  const double l1 = lambda1.value();
  const int cut = series_cutoff(std::max(l0, l1));
  const std::vector<double> p0 = poisson_pmf_table(l0, cut);
  const std::vector<double> p1 = poisson_pmf_table(l1, cut);

  // P(X0 >= n) by a backward sweep, then
  // P(X0 - X1 >= 0) = sum_n P(X1 = n) P(X0 >= n); the grouping of the
  // truncated double series by the X1 index.
  std::vector<double> sf0(static_cast<std::size_t>(cut) + 2, 0.0);
  for (int n = cut; n >= 0; --n) {
    sf0[static_cast<std::size_t>(n)] =
        sf0[static_cast<std::size_t>(n) + 1] + p0[static_cast<std::size_t>(n)];
  }
  double tail = 0.0;
  double tie = 0.0;
  for (int n = 0; n <= cut; ++n) {
    tail += p1[static_cast<std::size_t>(n)] * sf0[static_cast<std::size_t>(n)];
    tie += p1[static_cast<std::size_t>(n)] * p0[static_cast<std::size_t>(n)];
  }
  return ClickDifferenceStats{std::clamp(tail, 0.0, 1.0), std::clamp(tie, 0.0, 1.0)};
}

Probability click_difference_tail(Rate lambda0, Rate lambda1) {
  return Probability::clamped(click_difference_stats(lambda0, lambda1).tail_ge0);
}

double binary_entropy(double p) {
  if (!(p >= -kProbabilityTolerance && p <= 1.0 + kProbabilityTolerance)) {
    throw std::domain_error("binary_entropy: probability outside [0,1]: " +
                            std::to_string(p));
  }
  p = std::clamp(p, 0.0, 1.0);
  if (p == 0.0 || p == 1.0) {
    return 0.0;
  }
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

double binary_entropy(Probability p) { return binary_entropy(p.value()); }

}  // namespace qkpc
