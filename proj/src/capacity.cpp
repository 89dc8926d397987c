#include "qkpc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace qkpc {

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kOokThreshold1:
      return "ook-k1";
    case Scheme::kOokPnr:
      return "ook-pnr";
    case Scheme::kPm:
      return "pm";
    case Scheme::kPmConstrained:
      return "pm-constrained";
    case Scheme::kUsdPm:
      return "usd";
  }
  throw std::logic_error("unknown scheme");
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "ook-k1") return Scheme::kOokThreshold1;
  if (name == "ook-pnr") return Scheme::kOokPnr;
  if (name == "pm") return Scheme::kPm;
  if (name == "pm-constrained") return Scheme::kPmConstrained;
  if (name == "usd") return Scheme::kUsdPm;
  return std::nullopt;
}

OptimizerConstraints OptimizerConstraints::defaults_for(Scheme scheme) {
  OptimizerConstraints c;
  if (scheme == Scheme::kPmConstrained) {
    c.max_mean_photons = 20.0;
    c.max_theta = degrees_to_radians(10.0);
  }
  return c;
}

void OptimizerConstraints::validate() const {
  if (!(min_mean_photons > 0.0 && min_mean_photons <= max_mean_photons)) {
    throw std::invalid_argument("OptimizerConstraints: empty photon range");
  }
  if (max_threshold_k < 1) {
    throw std::invalid_argument("OptimizerConstraints: max_threshold_k must be >= 1");
  }
  if (!(min_theta >= 0.0 && min_theta <= max_theta && max_theta <= kPi)) {
    throw std::invalid_argument("OptimizerConstraints: empty theta range");
  }
}

double mutual_info_bob(const BinaryChannel& channel, double q0) {
  if (!(q0 > 0.0 && q0 < 1.0)) {
    throw std::domain_error("mutual_info_bob: q0 must be in (0,1)");
  }
  const double q1 = 1.0 - q0;
  const double p_out0 = q0 * channel.eps00 + q1 * channel.eps10;
  const double info = binary_entropy(p_out0) -
                      (q0 * binary_entropy(channel.eps00) +
                       q1 * binary_entropy(channel.eps10));
  return std::max(info, 0.0);
}

double mutual_info_eve(Probability eps_gamma) {
  if (eps_gamma.value() > 0.5 + kProbabilityTolerance) {
    throw std::domain_error("mutual_info_eve: a Helstrom error cannot exceed 1/2");
  }
  return 1.0 - binary_entropy(std::min(eps_gamma.value(), 0.5));
}

double usd_bob_info(double eta, double mean_photons, double theta) {
  if (!(eta > 0.0 && eta <= 1.0) || !(mean_photons >= 0.0)) {
    throw std::domain_error("usd_bob_info: bad efficiency or photon number");
  }
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::domain_error("usd_bob_info: theta must be in [0, pi]");
  }
  const double p_inconclusive = std::exp(-eta * mean_photons * (1.0 - std::cos(theta)));
  return 1.0 - p_inconclusive;
}

namespace {

// i_bob - i_eve before flooring; the optimizer searches this surface.
double ook_objective(const OokParams& params, const LinkEnvironment& env) {
  const double i_b = mutual_info_bob(ook_channel(params, env), params.q0);
  const double i_e = mutual_info_eve(
      eve_error_ook(env.gamma, env.eta, params.mean_photons,
                    env.eve_includes_receiver_efficiency));
  return i_b - i_e;
}

double pm_objective(const PmParams& params, const LinkEnvironment& env) {
  const double i_b = mutual_info_bob(pm_channel(params, env), params.q0);
  const double i_e = mutual_info_eve(
      eve_error_pm_general(env.gamma, env.eta, params.mean_photons, params.theta,
                           params.kappa, env.eve_includes_receiver_efficiency));
  return i_b - i_e;
}

double usd_objective(const PmParams& params, const LinkEnvironment& env) {
  const double i_b = usd_bob_info(env.eta, params.mean_photons, params.theta);
  const double i_e = mutual_info_eve(
      eve_error_pm(env.gamma, env.eta, params.mean_photons, params.theta,
                   env.eve_includes_receiver_efficiency));
  return i_b - i_e;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1 || lo == hi) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    out.push_back(std::exp(llo + (lhi - llo) * i / (count - 1)));
  }
  return out;
}

std::vector<double> lin_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1 || lo == hi) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < count; ++i) {
    out.push_back(lo + (hi - lo) * i / (count - 1));
  }
  return out;
}

constexpr int kAlphaGridPoints = 60;
constexpr int kThetaGridPoints = 45;
constexpr int kGoldenIterations = 40;
constexpr int kKappaGoldenIterations = 25;

constexpr double kQ0SearchLo = 0.02;
constexpr double kQ0SearchHi = 0.98;

template <typename Params, typename Objective>
struct BestTracker {
  double value = -std::numeric_limits<double>::infinity();
  Params params{};

  void consider(double v, const Params& p) {
    if (v > value) {
      value = v;
      params = p;
    }
  }
};

// Refines one continuous coordinate around the incumbent and keeps the
// better of the refined and incumbent points.
template <typename Params, typename Objective>
void refine_coordinate(BestTracker<Params, Objective>& best, Objective objective,
                       const std::function<Params(const Params&, double)>& with,
                       double lo, double hi, int iterations) {
  if (!(lo < hi)) {
    return;
  }
  double x = 0.0;
  const double v = golden_section_max(
      [&](double t) { return objective(with(best.params, t)); }, lo, hi, iterations, &x);
  best.consider(v, with(best.params, x));
}

CapacityResult make_result(Scheme scheme, double diff, double i_bob, double i_eve,
                           std::variant<OokParams, PmParams> params) {
  CapacityResult r;
  r.scheme = scheme;
  r.c_p = std::max(diff, 0.0);
  r.i_bob = i_bob;
  r.i_eve = i_eve;
  r.best_params = std::move(params);
  return r;
}

CapacityResult optimize_ook(Scheme scheme, const LinkEnvironment& env,
                            const OptimizerConstraints& c) {
  const bool k_free = scheme == Scheme::kOokPnr;
  const std::vector<double> alphas =
      log_spaced(c.min_mean_photons, c.max_mean_photons, kAlphaGridPoints);
  auto objective = [&env](const OokParams& p) { return ook_objective(p, env); };
  BestTracker<OokParams, decltype(objective)> best;

  OokParams p;
  const int k_hi = k_free ? c.max_threshold_k : 1;
  for (int k = 1; k <= k_hi; ++k) {
    p.threshold_k = k;
    for (double a2 : alphas) {
      p.mean_photons = a2;
      best.consider(objective(p), p);
    }
  }

  auto with_log_alpha = std::function<OokParams(const OokParams&, double)>(
      [](const OokParams& q, double la) {
        OokParams r = q;
        r.mean_photons = std::exp(la);
        return r;
      });
  auto with_q0 = std::function<OokParams(const OokParams&, double)>(
      [](const OokParams& q, double q0) {
        OokParams r = q;
        r.q0 = q0;
        return r;
      });

  for (int pass = 0; pass < 2; ++pass) {
    const double a2 = best.params.mean_photons;
    refine_coordinate(best, objective, with_log_alpha,
                      std::log(std::max(a2 / 3.0, c.min_mean_photons)),
                      std::log(std::min(a2 * 3.0, c.max_mean_photons)),
                      kGoldenIterations);
    if (k_free) {
      OokParams q = best.params;
      for (int k = 1; k <= c.max_threshold_k; ++k) {
        q.threshold_k = k;
        best.consider(objective(q), q);
      }
    }
    if (c.optimize_q0) {
      refine_coordinate(best, objective, with_q0, kQ0SearchLo, kQ0SearchHi,
                        kGoldenIterations);
    }
  }

  const BinaryChannel ch = ook_channel(best.params, env);
  const double i_b = mutual_info_bob(ch, best.params.q0);
  const double i_e = mutual_info_eve(
      eve_error_ook(env.gamma, env.eta, best.params.mean_photons,
                    env.eve_includes_receiver_efficiency));
  return make_result(scheme, best.value, i_b, i_e, best.params);
}

CapacityResult optimize_pm(Scheme scheme, const LinkEnvironment& env,
                           const OptimizerConstraints& c) {
  const std::vector<double> alphas =
      log_spaced(c.min_mean_photons, c.max_mean_photons, kAlphaGridPoints);
  const std::vector<double> thetas = lin_spaced(c.min_theta, c.max_theta, kThetaGridPoints);
  auto objective = [&env](const PmParams& p) { return pm_objective(p, env); };
  BestTracker<PmParams, decltype(objective)> best;

  PmParams p;
  for (double kappa : {0.0, 1.0}) {
    p.kappa = kappa;
    for (double theta : thetas) {
      p.theta = theta;
      for (double a2 : alphas) {
        p.mean_photons = a2;
        best.consider(objective(p), p);
      }
    }
  }

  auto with_log_alpha = std::function<PmParams(const PmParams&, double)>(
      [](const PmParams& q, double la) {
        PmParams r = q;
        r.mean_photons = std::exp(la);
        return r;
      });
  auto with_theta = std::function<PmParams(const PmParams&, double)>(
      [](const PmParams& q, double th) {
        PmParams r = q;
        r.theta = th;
        return r;
      });
  auto with_q0 = std::function<PmParams(const PmParams&, double)>(
      [](const PmParams& q, double q0) {
        PmParams r = q;
        r.q0 = q0;
        return r;
      });

  const double theta_window = degrees_to_radians(10.0);
  for (int pass = 0; pass < 2; ++pass) {
    const double a2 = best.params.mean_photons;
    refine_coordinate(best, objective, with_log_alpha,
                      std::log(std::max(a2 / 3.0, c.min_mean_photons)),
                      std::log(std::min(a2 * 3.0, c.max_mean_photons)),
                      kGoldenIterations);
    refine_coordinate(best, objective, with_theta,
                      std::max(c.min_theta, best.params.theta - theta_window),
                      std::min(c.max_theta, best.params.theta + theta_window),
                      kGoldenIterations);
    // Continuous pass over the photon ratio; the endpoint candidates stay in
    // the running because the objective can be bimodal in kappa.
    {
      double kx = 0.0;
      PmParams q = best.params;
      const double kv = golden_section_max(
          [&](double kk) {
            q.kappa = kk;
            return objective(q);
          },
          0.0, 1.0, kKappaGoldenIterations, &kx);
      q.kappa = kx;
      best.consider(kv, q);
      for (double kappa : {0.0, 1.0}) {
        q.kappa = kappa;
        best.consider(objective(q), q);
      }
    }
    if (c.optimize_q0) {
      refine_coordinate(best, objective, with_q0, kQ0SearchLo, kQ0SearchHi,
                        kGoldenIterations);
    }
  }

  const BinaryChannel ch = pm_channel(best.params, env);
  const double i_b = mutual_info_bob(ch, best.params.q0);
  const double i_e = mutual_info_eve(eve_error_pm_general(
      env.gamma, env.eta, best.params.mean_photons, best.params.theta,
      best.params.kappa, env.eve_includes_receiver_efficiency));
  return make_result(scheme, best.value, i_b, i_e, best.params);
}

CapacityResult optimize_usd(const LinkEnvironment& env, const OptimizerConstraints& c) {
  const std::vector<double> alphas =
      log_spaced(c.min_mean_photons, c.max_mean_photons, kAlphaGridPoints);
  const std::vector<double> thetas = lin_spaced(c.min_theta, c.max_theta, kThetaGridPoints);
  auto objective = [&env](const PmParams& p) { return usd_objective(p, env); };
  BestTracker<PmParams, decltype(objective)> best;

  PmParams p;
  p.kappa = 1.0;
  for (double theta : thetas) {
    p.theta = theta;
    for (double a2 : alphas) {
      p.mean_photons = a2;
      best.consider(objective(p), p);
    }
  }

  auto with_log_alpha = std::function<PmParams(const PmParams&, double)>(
      [](const PmParams& q, double la) {
        PmParams r = q;
        r.mean_photons = std::exp(la);
        return r;
      });
  auto with_theta = std::function<PmParams(const PmParams&, double)>(
      [](const PmParams& q, double th) {
        PmParams r = q;
        r.theta = th;
        return r;
      });

  const double theta_window = degrees_to_radians(10.0);
  for (int pass = 0; pass < 2; ++pass) {
    const double a2 = best.params.mean_photons;
    refine_coordinate(best, objective, with_log_alpha,
                      std::log(std::max(a2 / 3.0, c.min_mean_photons)),
                      std::log(std::min(a2 * 3.0, c.max_mean_photons)),
                      kGoldenIterations);
    refine_coordinate(best, objective, with_theta,
                      std::max(c.min_theta, best.params.theta - theta_window),
                      std::min(c.max_theta, best.params.theta + theta_window),
                      kGoldenIterations);
  }

  const double i_b = usd_bob_info(env.eta, best.params.mean_photons, best.params.theta);
  const double i_e = mutual_info_eve(
      eve_error_pm(env.gamma, env.eta, best.params.mean_photons, best.params.theta,
                   env.eve_includes_receiver_efficiency));
  return make_result(Scheme::kUsdPm, best.value, i_b, i_e, best.params);
}

}  // namespace

CapacityResult private_capacity_point(Scheme scheme,
                                      const std::variant<OokParams, PmParams>& params,
                                      const LinkEnvironment& env) {
  env.validate();
  switch (scheme) {
    case Scheme::kOokThreshold1:
    case Scheme::kOokPnr: {
      const OokParams* p = std::get_if<OokParams>(&params);
      if (p == nullptr) {
        throw std::invalid_argument("private_capacity_point: OOK scheme needs OokParams");
      }
      if (scheme == Scheme::kOokThreshold1 && p->threshold_k != 1) {
        throw std::invalid_argument(
            "private_capacity_point: threshold scheme requires k = 1");
      }
      const double i_b = mutual_info_bob(ook_channel(*p, env), p->q0);
      const double i_e = mutual_info_eve(
          eve_error_ook(env.gamma, env.eta, p->mean_photons,
                        env.eve_includes_receiver_efficiency));
      return make_result(scheme, i_b - i_e, i_b, i_e, *p);
    }
    case Scheme::kPm:
    case Scheme::kPmConstrained: {
      const PmParams* p = std::get_if<PmParams>(&params);
      if (p == nullptr) {
        throw std::invalid_argument("private_capacity_point: PM scheme needs PmParams");
      }
      const double i_b = mutual_info_bob(pm_channel(*p, env), p->q0);
      const double i_e = mutual_info_eve(eve_error_pm_general(
          env.gamma, env.eta, p->mean_photons, p->theta, p->kappa,
          env.eve_includes_receiver_efficiency));
      return make_result(scheme, i_b - i_e, i_b, i_e, *p);
    }
    case Scheme::kUsdPm: {
      const PmParams* p = std::get_if<PmParams>(&params);
      if (p == nullptr) {
        throw std::invalid_argument("private_capacity_point: USD scheme needs PmParams");
      }
      if (p->kappa != 1.0) {
        throw std::invalid_argument(
            "private_capacity_point: the USD variant is defined for kappa = 1");
      }
      const double i_b = usd_bob_info(env.eta, p->mean_photons, p->theta);
      const double i_e = mutual_info_eve(
          eve_error_pm(env.gamma, env.eta, p->mean_photons, p->theta,
                       env.eve_includes_receiver_efficiency));
      return make_result(scheme, i_b - i_e, i_b, i_e, *p);
    }
  }
  throw std::logic_error("unknown scheme");
}

CapacityResult optimize_private_capacity(
    Scheme scheme, const LinkEnvironment& env,
    const std::optional<OptimizerConstraints>& constraints) {
  env.validate();
  const OptimizerConstraints c =
      constraints.value_or(OptimizerConstraints::defaults_for(scheme));
  c.validate();
  switch (scheme) {
    case Scheme::kOokThreshold1:
    case Scheme::kOokPnr:
      return optimize_ook(scheme, env, c);
    case Scheme::kPm:
    case Scheme::kPmConstrained:
      return optimize_pm(scheme, env, c);
    case Scheme::kUsdPm:
      return optimize_usd(env, c);
  }
  throw std::logic_error("unknown scheme");
}

CapacityResult usd_private_capacity(const LinkEnvironment& env,
                                    const std::optional<OptimizerConstraints>& constraints) {
  return optimize_private_capacity(Scheme::kUsdPm, env, constraints);
}

double usd_capacity_at_photons(double received_photons, double gamma,
                               const OptimizerConstraints& constraints) {
  constraints.validate();
  LinkEnvironment env;
  env.eta = 1.0;
  env.gamma = gamma;
  auto f = [&](double theta) {
    return usd_bob_info(1.0, received_photons, theta) -
           mutual_info_eve(eve_error_pm(gamma, 1.0, received_photons, theta));
  };
  double best = -1.0;
  double best_theta = constraints.min_theta;
  for (double theta : lin_spaced(constraints.min_theta, constraints.max_theta, 91)) {
    const double v = f(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  const double lo = std::max(constraints.min_theta, best_theta - degrees_to_radians(5.0));
  const double hi = std::min(constraints.max_theta, best_theta + degrees_to_radians(5.0));
  if (lo < hi) {
    best = std::max(best, golden_section_max(f, lo, hi, kGoldenIterations));
  }
  return std::max(best, 0.0);
}

double pm_minimum_error_capacity_at_photons(double received_photons, double gamma,
                                            const OptimizerConstraints& constraints) {
  constraints.validate();
  auto f = [&](double theta) {
    // Bob at the Helstrom limit is Eve's bound evaluated at full efficiency.
    const Probability bob_error = eve_error_pm(1.0, 1.0, received_photons, theta);
    return mutual_info_eve(bob_error) -
           mutual_info_eve(eve_error_pm(gamma, 1.0, received_photons, theta));
  };
  double best = -1.0;
  double best_theta = constraints.min_theta;
  for (double theta : lin_spaced(constraints.min_theta, constraints.max_theta, 91)) {
    const double v = f(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  const double lo = std::max(constraints.min_theta, best_theta - degrees_to_radians(5.0));
  const double hi = std::min(constraints.max_theta, best_theta + degrees_to_radians(5.0));
  if (lo < hi) {
    best = std::max(best, golden_section_max(f, lo, hi, kGoldenIterations));
  }
  return std::max(best, 0.0);
}

void SweepGrid::validate() const {
  auto strictly_increasing = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i] > v[i - 1])) return false;
    }
    return !v.empty();
  };
  if (!strictly_increasing(delta_values)) {
    throw std::invalid_argument("SweepGrid: delta_values must be nonempty and increasing");
  }
  if (!strictly_increasing(gamma_values)) {
    throw std::invalid_argument("SweepGrid: gamma_values must be nonempty and increasing");
  }
}

std::vector<SweepCell> capacity_sweep(const SweepGrid& grid, int threads) {
  grid.validate();
  const std::size_t n_cells = grid.gamma_values.size() * grid.delta_values.size();
  std::vector<SweepCell> cells(n_cells);

  auto run_cell = [&](std::size_t index) {
    const std::size_t gi = index / grid.delta_values.size();
    const std::size_t di = index % grid.delta_values.size();
    SweepCell& cell = cells[index];
    cell.gamma = grid.gamma_values[gi];
    cell.delta = grid.delta_values[di];
    try {
      LinkEnvironment env;
      env.gamma = cell.gamma;
      env.delta = cell.delta;
      cell.result = optimize_private_capacity(grid.scheme, env, grid.constraints);
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
      cell.result.scheme = grid.scheme;
    }
  };

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp<int>(n_threads, 1, static_cast<int>(n_cells));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n_cells; ++i) {
      run_cell(i);
    }
    return cells;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1)) {
        run_cell(i);
      }
    });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  return cells;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                          int iterations, double* best_x) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("golden_section_max: empty bracket");
  }
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2.0;
  if (best_x != nullptr) {
    *best_x = x;
  }
  return f(x);
}

}  // namespace qkpc
