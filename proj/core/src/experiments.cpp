#include "dipspin/experiments.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>

#include "dipspin/error.hpp"

namespace dipspin {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, bound) by rejection; avoids the unspecified
// algorithm of std::uniform_int_distribution.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

Vec3 uniform_on_sphere(std::mt19937_64& rng) {
  const double z = 2.0 * uniform01(rng) - 1.0;
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

SimPlan plan_from(const RunSettings& run, Mode mode, double p_d, double t_end) {
  SimPlan plan;
  plan.mode = mode;
  plan.p_d = p_d;
  plan.t_end = t_end;
  plan.integrator = run.integrator;
  plan.dt = run.dt;
  plan.sample_interval = run.sample_interval;
  plan.rtol = run.rtol;
  plan.atol = run.atol;
  plan.norm_abort = run.norm_abort;
  plan.h_x = run.h_x;
  plan.h_y = run.h_y;
  return plan;
}

SpinSystem with_state(SpinSystem sys, const InitialState& init, const RunSettings& run) {
  sys.gamma_sign = run.gamma_sign;
  return prepare_initial(std::move(sys), init);
}

CouplingTable couplings_for(const SpinSystem& sys, const RunSettings& run) {
  if (run.exchange_nn != 0.0) return build_couplings(sys, nearest_neighbour_exchange(run.exchange_nn));
  return build_couplings(sys);
}

}  // namespace

double magic_angle() { return std::acos(1.0 / std::sqrt(3.0)); }

SpinSystem prepare_initial(SpinSystem sys, const InitialState& init) {
  if (!(init.polarization >= 0.0 && init.polarization <= 1.0)) {
    throw InvalidArgument("polarization must lie in [0, 1]");
  }
  const double axis_norm = norm(init.axis);
  if (!(axis_norm > 0.0)) throw InvalidArgument("polarization axis must be nonzero");
  const Vec3 axis = init.axis / axis_norm;

  const std::size_t n = sys.size();
  const auto aligned = static_cast<std::size_t>(std::llround(init.polarization * static_cast<double>(n)));

  std::mt19937_64 rng(init.seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[bounded(rng, i)]);
  }

  sys.moments.assign(n, axis);
  for (std::size_t i = aligned; i < n; ++i) sys.moments[order[i]] = uniform_on_sphere(rng);
  return sys;
}

Trajectory run_fid(const FidParams& p) {
  SpinSystem sys = build_cubic_lattice(p.dims[0], p.dims[1], p.dims[2], p.periodic);
  sys = with_state(std::move(sys), p.init, p.run);
  const CouplingTable table = couplings_for(sys, p.run);
  return integrate(plan_from(p.run, p.mode, p.p_d, p.t_end), table, sys);
}

Trajectory run_echo(const EchoParams& p) {
  if (!(p.k > 0.0 && p.k <= 1.0)) throw InvalidArgument("reversal factor k must lie in (0, 1]");
  if (!(p.tau > 0.0)) throw InvalidArgument("tau must be positive");
  const double t_end = p.t_end > 0.0 ? p.t_end : p.tau + p.tau / p.k + p.tau;
  if (!(p.tau < t_end)) throw InvalidArgument("tau must precede t_end");

  SpinSystem sys = build_cubic_lattice(p.dims[0], p.dims[1], p.dims[2], p.periodic);
  sys = with_state(std::move(sys), p.init, p.run);
  const CouplingTable table = couplings_for(sys, p.run);
  SimPlan plan = plan_from(p.run, Mode::RotatingSecular, p.p_d, t_end);
  plan.reversals.push_back({p.tau, p.k});
  return integrate(plan, table, sys);
}

Trajectory run_pake(const PakeParams& p) {
  SpinSystem sys = build_line(p.n_spins, direction_from_polar(p.theta));
  sys = with_state(std::move(sys), p.init, p.run);
  const CouplingTable table = couplings_for(sys, p.run);
  return integrate(plan_from(p.run, p.mode, p.p_d, p.t_end), table, sys);
}

std::vector<Trajectory> run_scaling(const ScalingParams& p) {
  for (int n : p.counts) {
    if (n < 2) throw InvalidArgument("scaling counts must be >= 2");
  }
  std::vector<std::future<Trajectory>> jobs;
  jobs.reserve(p.counts.size());
  for (int n : p.counts) {
    jobs.push_back(std::async(std::launch::async, [&p, n] {
      SpinSystem sys = build_line(n, Vec3{0.0, 0.0, 1.0});
      sys = with_state(std::move(sys), p.init, p.run);
      const CouplingTable table = couplings_for(sys, p.run);
      return integrate(plan_from(p.run, p.mode, p.p_d, p.t_end), table, sys);
    }));
  }
  std::vector<Trajectory> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace dipspin
