#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qkpc/wiretap.hpp"

// Mutual informations, private capacity, parameter optimization and
// (gamma, delta) sweeps for every encoding variant.

namespace qkpc {

enum class Scheme {
  kOokThreshold1,  // OOK with a plain threshold detector (k fixed to 1)
  kOokPnr,         // OOK with photon counting, threshold k free
  kPm,             // polarization multiplexing, majority-click receiver
  kPmConstrained,  // same, with practical caps on photons and angle
  kUsdPm,          // polarization states read out by unambiguous discrimination
};

std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

// Search region for the optimizer. Defaults cover the full regime of the
// protocol; the constrained scheme caps mean photons at 20 and the angle at
// 10 degrees. The 2-degree floor is the practical preparation limit and is
// overridable like everything else.
struct OptimizerConstraints {
  double min_mean_photons = 1e-3;
  double max_mean_photons = 1e3;
  int max_threshold_k = 40;
  double min_theta = degrees_to_radians(2.0);
  double max_theta = degrees_to_radians(90.0);
  bool optimize_q0 = false;  // q0 stays at 1/2 unless asked for

  static OptimizerConstraints defaults_for(Scheme scheme);

  void validate() const;  // throws when the feasible set is empty
};

struct CapacityResult {
  Scheme scheme = Scheme::kOokPnr;
  double c_p = 0.0;    // max(i_bob - i_eve, 0)
  double i_bob = 0.0;  // bits/use
  double i_eve = 0.0;  // bits/use
  std::variant<OokParams, PmParams> best_params;
};

// I(X;Y) of the binary-input binary-output channel with input prior q0.
// At q0 = 1/2 it reduces to h((e00+e10)/2) - (h(e00)+h(e10))/2.
double mutual_info_bob(const BinaryChannel& channel, double q0);

// Eve's information 1 - h(eps_gamma); a Helstrom error never exceeds 1/2.
double mutual_info_eve(Probability eps_gamma);

// Single-point evaluation of the private capacity, no optimization.
// The params variant must match the scheme (OOK schemes take OokParams,
// the polarization schemes PmParams; the USD variant requires kappa = 1).
CapacityResult private_capacity_point(Scheme scheme,
                                      const std::variant<OokParams, PmParams>& params,
                                      const LinkEnvironment& env);

// Deterministic two-stage search: a coarse log-spaced grid over the free
// parameters, then two passes of golden-section refinement per continuous
// coordinate (plus an integer rescan of k for the OOK schemes). The photon
// ratio starts from the two candidate values {0, 1} and gets one continuous
// refinement pass.
CapacityResult optimize_private_capacity(
    Scheme scheme, const LinkEnvironment& env,
    const std::optional<OptimizerConstraints>& constraints = std::nullopt);

// Erasure-channel information for unambiguous discrimination: 1 - p_inc with
// p_inc = e^{-eta |alpha|^2 (1 - cos theta)}.
double usd_bob_info(double eta, double mean_photons, double theta);

CapacityResult usd_private_capacity(
    const LinkEnvironment& env,
    const std::optional<OptimizerConstraints>& constraints = std::nullopt);

// Fixed received-photon-number slices used for the strategy comparison
// curves: both maximize over the angle only.
double usd_capacity_at_photons(double received_photons, double gamma,
                               const OptimizerConstraints& constraints = {});

// Ideal minimum-error (Helstrom) receiver for the same polarization pair;
// the benchmark the unambiguous strategy is measured against.
double pm_minimum_error_capacity_at_photons(double received_photons, double gamma,
                                            const OptimizerConstraints& constraints = {});

struct SweepGrid {
  std::vector<double> delta_values;  // nonempty, strictly increasing
  std::vector<double> gamma_values;  // nonempty, strictly increasing
  Scheme scheme = Scheme::kOokPnr;
  std::optional<OptimizerConstraints> constraints;

  void validate() const;
};

struct SweepCell {
  double gamma = 0.0;
  double delta = 0.0;
  CapacityResult result;
  bool failed = false;
  std::string error;
};

// One optimization per (gamma, delta) cell, emitted row-major with gamma as
// the outer index. Cells are independent and evaluated concurrently; results
// are gathered by cell index, so the table is deterministic. A failing cell
// is flagged and does not abort the sweep.
std::vector<SweepCell> capacity_sweep(const SweepGrid& grid, int threads = 0);

// Golden-section maximization of a smooth unimodal objective; exposed
// because the acceptance checks reuse it for per-slice curves.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          int iterations, double* best_x = nullptr);

}  // namespace qkpc
