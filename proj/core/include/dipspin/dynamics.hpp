#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dipspin/geometry.hpp"
#include "dipspin/vec3.hpp"

namespace dipspin {

enum class Mode {
  LabFull,          ///< Larmor + transverse field + full dipole tensor.
  RotatingSecular,  ///< Frame rotating at the Larmor frequency, secular part only.
};

enum class IntegratorKind { RK4, RKF45, DP54 };

std::string_view to_string(Mode m);
std::string_view to_string(IntegratorKind k);
Mode parse_mode(std::string_view s);
IntegratorKind parse_integrator(std::string_view s);

/// At time tau the whole right-hand side is multiplied by -k.
struct Reversal {
  double tau = 0.0;
  double k = 1.0;
};

struct SimPlan {
  Mode mode = Mode::RotatingSecular;
  double p_d = 0.01;
  double h_x = 0.0;
  double h_y = 0.0;
  double t_end = 10.0;
  /// Fixed step (RK4) or initial step (adaptive). Zero selects default_step().
  double dt = 0.0;
  IntegratorKind integrator = IntegratorKind::RK4;
  double rtol = 1e-9;
  double atol = 1e-12;
  std::vector<Reversal> reversals;
  /// Spacing of recorded samples. Zero selects default_sample_interval().
  double sample_interval = 0.0;
  /// Abort when max_l | |e_l| - 1 | exceeds this.
  double norm_abort = 1e-6;
  /// Record every spin every `snapshot_every` samples (0 = never).
  std::size_t snapshot_every = 0;

  /// Throws InvalidArgument on p_d <= 0, dt < 0, bad reversal schedule, or
  /// reversal requested in lab-full mode.
  void validate() const;

  /// Overall factor applied to the RHS at time t (product of gamma sign is not included).
  double rhs_factor(double t) const;
};

/// dt = 0.0025 in the rotating frame; min(0.005, 2 pi p_d / 1000) in the lab frame.
double default_step(Mode mode, double p_d);
/// 0.01 in the rotating frame; 2 pi p_d / 16 in the lab frame.
double default_sample_interval(Mode mode, double p_d);

struct Trajectory {
  Mode mode = Mode::RotatingSecular;
  double p_d = 0.0;
  int gamma_sign = +1;
  std::vector<double> times;
  std::vector<Vec3> mean_moment;
  std::vector<double> energy;
  std::vector<double> total_ez;
  std::vector<double> max_norm_drift;
  std::vector<double> snapshot_times;
  std::vector<std::vector<Vec3>> snapshots;
  std::vector<Vec3> final_moments;
  std::size_t steps = 0;
  std::size_t rhs_evaluations = 0;

  std::size_t size() const { return times.size(); }
  std::vector<double> component(int axis) const;
};

/// H_l = -sum_k (D_lk + J_lk I) e_k.
Vec3 dipole_field_full(const CouplingTable& table, std::span<const Vec3> moments, std::size_t l);

/// Field derived from the secular energy
///   E_s = 1/2 sum a_lk [e_l^z e_k^z - (e_l^x e_k^x + e_l^y e_k^y)/2].
Vec3 dipole_field_secular(const CouplingTable& table, std::span<const Vec3> moments, std::size_t l);

/// Fields at every spin. `out` must have the same length as `moments`.
void dipole_fields_full(const CouplingTable& table, std::span<const Vec3> moments, std::span<Vec3> out);
void dipole_fields_secular(const CouplingTable& table, std::span<const Vec3> moments,
                           std::span<Vec3> out);

/// de_l/dt for every spin at time t, including any reversal factor in force.
std::vector<Vec3> rhs(const SimPlan& plan, const CouplingTable& table, std::span<const Vec3> moments,
                      double t, int gamma_sign = +1);

/// Zeeman + dipole energy in lab-full mode; secular energy in rotating mode.
double total_energy(const SimPlan& plan, const CouplingTable& table, std::span<const Vec3> moments);

/// Advances sys.moments over [0, t_end]. Moments are never renormalised.
/// Samples are taken at multiples of the sample interval up to t_end (the
/// fixed step is shortened to divide it); the state at t_end is always
/// available in final_moments.
Trajectory integrate(const SimPlan& plan, const CouplingTable& table, const SpinSystem& sys);

}  // namespace dipspin
