#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dipspin/dynamics.hpp"
#include "dipspin/geometry.hpp"

namespace dipspin {

/// A fraction `polarization` of the spins point exactly along `axis`; the
/// rest are independent uniform draws on the unit sphere. Which spins are
/// aligned is a seeded shuffle, so the state is reproducible.
struct InitialState {
  double polarization = 0.70;
  Vec3 axis{1.0, 0.0, 0.0};
  std::uint64_t seed = 1;
};

SpinSystem prepare_initial(SpinSystem sys, const InitialState& init);

/// Integration settings shared by the scenario builders.
struct RunSettings {
  IntegratorKind integrator = IntegratorKind::RK4;
  double dt = 0.0;               ///< 0 selects default_step().
  double sample_interval = 0.0;  ///< 0 selects default_sample_interval().
  double rtol = 1e-9;
  double atol = 1e-12;
  double norm_abort = 1e-6;
  double h_x = 0.0;
  double h_y = 0.0;
  double exchange_nn = 0.0;  ///< Nearest-neighbour exchange J (0 = none).
  int gamma_sign = +1;
};

struct FidParams {
  std::array<int, 3> dims{10, 10, 10};
  bool periodic = true;
  double p_d = 0.01;
  Mode mode = Mode::RotatingSecular;
  InitialState init{};
  double t_end = 6.0;
  RunSettings run{};
};
Trajectory run_fid(const FidParams& p);

struct EchoParams {
  std::array<int, 3> dims{10, 10, 10};
  bool periodic = true;
  double p_d = 0.01;
  InitialState init{0.98, {1.0, 0.0, 0.0}, 1};
  double tau = 5.0;
  double k = 1.0;
  double t_end = 0.0;  ///< 0 selects tau + tau/k + tau.
  RunSettings run{};
};
Trajectory run_echo(const EchoParams& p);

struct PakeParams {
  int n_spins = 2;
  double theta = 0.0;  ///< Angle between the line and z, radians.
  double p_d = 0.01;
  Mode mode = Mode::LabFull;
  InitialState init{0.5, {1.0, 0.0, 0.0}, 1};
  double t_end = 40.0;
  RunSettings run{};
};
Trajectory run_pake(const PakeParams& p);

struct ScalingParams {
  std::vector<int> counts{2, 25, 50, 1500};
  double p_d = 0.01;
  Mode mode = Mode::RotatingSecular;
  InitialState init{};
  double t_end = 10.0;
  RunSettings run{};
};
/// One z-line FID per entry of `counts`, run concurrently.
std::vector<Trajectory> run_scaling(const ScalingParams& p);

/// arccos(1/sqrt(3)).
double magic_angle();

}  // namespace dipspin
