#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dipspin/dynamics.hpp"
#include "dipspin/error.hpp"
#include "dipspin/experiments.hpp"
#include "dipspin/geometry.hpp"

using namespace dipspin;

namespace {

SpinSystem pair_along(const Vec3& dir, const Vec3& e1, const Vec3& e2) {
  SpinSystem sys = build_line(2, dir);
  sys.moments = {e1, e2};
  return sys;
}

SpinSystem single_spin(const Vec3& e) {
  SpinSystem sys;
  sys.positions = {{0, 0, 0}};
  sys.moments = {e};
  return sys;
}

SpinSystem random_cluster(int n, std::uint64_t seed, bool periodic = false) {
  SpinSystem sys = build_cubic_lattice(n, n, n, periodic);
  return prepare_initial(std::move(sys), {0.5, {1, 0, 0}, seed});
}

double secular_energy_brute(const CouplingTable& t, const std::vector<Vec3>& e) {
  double s = 0.0;
  for (std::size_t l = 0; l < e.size(); ++l)
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (k == l) continue;
      s += 0.5 * t.a(l, k) * (e[l].z * e[k].z - 0.5 * (e[l].x * e[k].x + e[l].y * e[k].y));
    }
  return s;
}

void check_vec(const Vec3& a, const Vec3& b, double tol) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
  CHECK(std::abs(a.z - b.z) <= tol);
}

}  // namespace

TEST_CASE("full and secular fields on the z-line pair") {
  for (const Vec3& e2 : {Vec3{0, 0, 1}, Vec3{1, 0, 0}}) {
    const SpinSystem sys = pair_along({0, 0, 1}, {0, 0, 1}, e2);
    const CouplingTable t = build_couplings(sys);
    const Vec3 expect = e2.z == 1.0 ? Vec3{0, 0, 2} : Vec3{-1, 0, 0};
    check_vec(dipole_field_full(t, sys.moments, 0), expect, 1e-14);
    check_vec(dipole_field_secular(t, sys.moments, 0), expect, 1e-14);
  }
}

TEST_CASE("secular field vanishes for the magic-angle pair") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int i = 0; i < 20; ++i) {
    const Vec3 e2 = normalized({g(rng), g(rng), g(rng)});
    const SpinSystem sys = pair_along(direction_from_polar(magic_angle()), {1, 0, 0}, e2);
    const CouplingTable t = build_couplings(sys);
    check_vec(dipole_field_secular(t, sys.moments, 0), {0, 0, 0}, 1e-12);
  }
}

TEST_CASE("zero moments give zero field") {
  const SpinSystem sys = random_cluster(3, 2);
  const CouplingTable t = build_couplings(sys);
  const std::vector<Vec3> zero(sys.size());
  check_vec(dipole_field_full(t, zero, 4), {0, 0, 0}, 0.0);
  check_vec(dipole_field_secular(t, zero, 4), {0, 0, 0}, 0.0);
}

TEST_CASE("bulk field kernels match the per-spin definitions") {
  const SpinSystem sys = random_cluster(4, 5, true);
  const CouplingTable t = build_couplings(sys, nearest_neighbour_exchange(0.3));
  std::vector<Vec3> full(sys.size()), sec(sys.size());
  dipole_fields_full(t, sys.moments, full);
  dipole_fields_secular(t, sys.moments, sec);
  for (std::size_t l = 0; l < sys.size(); ++l) {
    check_vec(full[l], dipole_field_full(t, sys.moments, l), 1e-12);
    check_vec(sec[l], dipole_field_secular(t, sys.moments, l), 1e-12);
  }
  CHECK_THROWS_AS(dipole_field_full(t, sys.moments, sys.size()), InvalidArgument);
}

TEST_CASE("secular field is minus the gradient of the secular energy") {
  const SpinSystem sys = random_cluster(3, 9);
  const CouplingTable t = build_couplings(sys);
  std::vector<Vec3> e = sys.moments;
  const double h = 1e-6;
  for (std::size_t l : {0u, 7u, 20u}) {
    const Vec3 field = dipole_field_secular(t, e, l);
    double grad[3];
    for (int a = 0; a < 3; ++a) {
      std::vector<Vec3> p = e, m = e;
      double* pp[3] = {&p[l].x, &p[l].y, &p[l].z};
      double* mm[3] = {&m[l].x, &m[l].y, &m[l].z};
      *pp[a] += h;
      *mm[a] -= h;
      grad[a] = (secular_energy_brute(t, p) - secular_energy_brute(t, m)) / (2 * h);
    }
    CHECK(field.x == doctest::Approx(-grad[0]).epsilon(1e-6));
    CHECK(field.y == doctest::Approx(-grad[1]).epsilon(1e-6));
    CHECK(field.z == doctest::Approx(-grad[2]).epsilon(1e-6));
  }
}

TEST_CASE("rhs: pure Larmor precession of a single spin") {
  const SpinSystem sys = single_spin({1, 0, 0});
  const CouplingTable t = build_couplings(sys);
  SimPlan plan;
  plan.mode = Mode::LabFull;
  plan.p_d = 0.01;
  const auto de = rhs(plan, t, sys.moments, 0.0);
  check_vec(de[0], {0, -100, 0}, 1e-12);
  const auto flipped = rhs(plan, t, sys.moments, 0.0, -1);
  check_vec(flipped[0], {0, 100, 0}, 1e-12);
}

TEST_CASE("rhs vanishes when the moment is parallel to its field") {
  const SpinSystem sys = pair_along({0, 0, 1}, {0, 0, 1}, {0, 0, 1});
  const CouplingTable t = build_couplings(sys);
  for (Mode m : {Mode::LabFull, Mode::RotatingSecular}) {
    SimPlan plan;
    plan.mode = m;
    for (const Vec3& d : rhs(plan, t, sys.moments, 0.0)) check_vec(d, {0, 0, 0}, 1e-12);
  }
}

TEST_CASE("rhs changes sign after a k = 1 reversal and scales by k") {
  const SpinSystem sys = random_cluster(3, 4);
  const CouplingTable t = build_couplings(sys);
  SimPlan plan;
  plan.reversals = {{1.0, 1.0}};
  const auto before = rhs(plan, t, sys.moments, 0.5);
  const auto after = rhs(plan, t, sys.moments, 1.5);
  plan.reversals = {{1.0, 0.5}};
  const auto half = rhs(plan, t, sys.moments, 1.0);
  for (std::size_t l = 0; l < sys.size(); ++l) {
    check_vec(after[l], -before[l], 0.0);
    check_vec(half[l], -0.5 * before[l], 1e-15);
  }
  CHECK(plan.rhs_factor(0.99) == 1.0);
}

TEST_CASE("plan validation") {
  SimPlan plan;
  CHECK_NOTHROW(plan.validate());
  plan.reversals = {{2.0, 2.0}};
  CHECK_THROWS_AS(plan.validate(), InvalidArgument);
  plan.reversals = {{3.0, 1.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(plan.validate(), InvalidArgument);
  plan.reversals = {{11.0, 1.0}};
  CHECK_THROWS_AS(plan.validate(), InvalidArgument);
  plan.reversals = {{5.0, 1.0}};
  plan.mode = Mode::LabFull;
  CHECK_THROWS_AS(plan.validate(), InvalidArgument);
  SimPlan bad;
  bad.p_d = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.p_d = 0.01;
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("energy examples") {
  const SpinSystem zz = pair_along({0, 0, 1}, {0, 0, 1}, {0, 0, 1});
  SimPlan lab;
  lab.mode = Mode::LabFull;
  lab.p_d = 0.01;
  CHECK(total_energy(lab, build_couplings(zz), zz.moments) == doctest::Approx(-202.0));

  const SpinSystem magic = pair_along(direction_from_polar(magic_angle()), {0.6, 0, 0.8}, {0.6, 0, 0.8});
  SimPlan rot;
  CHECK(std::abs(total_energy(rot, build_couplings(magic), magic.moments)) < 1e-12);

  const SpinSystem one = single_spin({0, 0, 1});
  CHECK(total_energy(lab, build_couplings(one), one.moments) == doctest::Approx(-100.0));
  CHECK(total_energy(rot, build_couplings(one), one.moments) == 0.0);
}

TEST_CASE("secular energy matches the brute-force sum") {
  const SpinSystem sys = random_cluster(3, 12, true);
  const CouplingTable t = build_couplings(sys);
  SimPlan rot;
  CHECK(total_energy(rot, t, sys.moments) == doctest::Approx(secular_energy_brute(t, sys.moments)).epsilon(1e-12));
}

TEST_CASE("single spin returns after one Larmor period") {
  const SpinSystem sys = single_spin({1, 0, 0});
  SimPlan plan;
  plan.mode = Mode::LabFull;
  plan.p_d = 0.01;
  plan.t_end = 2.0 * std::numbers::pi * plan.p_d;
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  check_vec(traj.final_moments[0], {1, 0, 0}, 1e-8);
  CHECK(traj.times.back() == doctest::Approx(plan.t_end));
  for (std::size_t i = 1; i < traj.size(); ++i)
    CHECK(traj.times[i] - traj.times[i - 1] == doctest::Approx(default_sample_interval(plan.mode, plan.p_d)));
}

TEST_CASE("trajectory monitors have consistent lengths and increasing times") {
  const SpinSystem sys = random_cluster(3, 1);
  SimPlan plan;
  plan.t_end = 1.0;
  plan.snapshot_every = 10;
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  CHECK(traj.size() == 101);
  CHECK(traj.energy.size() == traj.size());
  CHECK(traj.total_ez.size() == traj.size());
  CHECK(traj.max_norm_drift.size() == traj.size());
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
  CHECK(traj.snapshots.size() == traj.snapshot_times.size());
  CHECK(traj.snapshots.size() == 11);
}

TEST_CASE("conservation on a small periodic lattice") {
  const SpinSystem sys = random_cluster(4, 6, true);
  SimPlan plan;
  plan.t_end = 5.0;
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.max_norm_drift[i] < 1e-8);
    CHECK(std::abs(traj.total_ez[i] - traj.total_ez[0]) < 1e-8);
    CHECK(std::abs(traj.energy[i] - traj.energy[0]) < 1e-6 * std::abs(traj.energy[0]));
  }
}

TEST_CASE("forward, reverse and forward again restores the initial state") {
  const SpinSystem sys = random_cluster(3, 8);
  SimPlan plan;
  plan.t_end = 4.0;
  plan.reversals = {{2.0, 1.0}};
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  for (std::size_t l = 0; l < sys.size(); ++l) check_vec(traj.final_moments[l], sys.moments[l], 1e-8);
}

TEST_CASE("reversal with k = 1/2 refocuses at tau + tau/k") {
  const SpinSystem sys = random_cluster(3, 8);
  SimPlan plan;
  plan.t_end = 3.0;
  plan.reversals = {{1.0, 0.5}};
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  for (std::size_t l = 0; l < sys.size(); ++l) check_vec(traj.final_moments[l], sys.moments[l], 1e-8);
}

TEST_CASE("adaptive integrators agree with RK4") {
  const SpinSystem sys = random_cluster(3, 21);
  const CouplingTable t = build_couplings(sys);
  SimPlan plan;
  plan.t_end = 3.0;
  plan.dt = 0.001;
  const Trajectory ref = integrate(plan, t, sys);
  for (IntegratorKind k : {IntegratorKind::RKF45, IntegratorKind::DP54}) {
    SimPlan ad = plan;
    ad.integrator = k;
    ad.dt = 0.0;
    ad.rtol = 1e-11;
    ad.atol = 1e-13;
    const Trajectory traj = integrate(ad, t, sys);
    REQUIRE(traj.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(traj.times[i] == doctest::Approx(ref.times[i]).epsilon(1e-12));
      check_vec(traj.mean_moment[i], ref.mean_moment[i], 1e-8);
    }
  }
}

TEST_CASE("adaptive reversal is applied exactly at tau") {
  const SpinSystem sys = random_cluster(3, 8);
  SimPlan plan;
  plan.integrator = IntegratorKind::DP54;
  plan.rtol = 1e-12;
  plan.atol = 1e-14;
  plan.t_end = 4.0;
  plan.reversals = {{2.0, 1.0}};
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  for (std::size_t l = 0; l < sys.size(); ++l) check_vec(traj.final_moments[l], sys.moments[l], 1e-8);
}

TEST_CASE("norm monitor aborts a step that is far too large") {
  const SpinSystem sys = random_cluster(3, 2);
  SimPlan plan;
  plan.dt = 0.5;
  plan.sample_interval = 0.5;
  plan.t_end = 5.0;
  CHECK_THROWS_AS(integrate(plan, build_couplings(sys), sys), IntegrationError);
}

TEST_CASE("negative gamma reverses the sense of precession") {
  SpinSystem sys = single_spin({1, 0, 0});
  sys.gamma_sign = -1;
  SimPlan plan;
  plan.mode = Mode::LabFull;
  plan.p_d = 0.01;
  plan.t_end = 0.25 * 2.0 * std::numbers::pi * plan.p_d;
  const Trajectory traj = integrate(plan, build_couplings(sys), sys);
  check_vec(traj.final_moments[0], {0, 1, 0}, 1e-8);
}

TEST_CASE("isotropic exchange adds -J e_k to the field") {
  const SpinSystem sys = pair_along({0, 0, 1}, {0, 0, 1}, {1, 0, 0});
  const CouplingTable with = build_couplings(sys, nearest_neighbour_exchange(2.0));
  const CouplingTable without = build_couplings(sys);
  const Vec3 diff = dipole_field_full(with, sys.moments, 0) - dipole_field_full(without, sys.moments, 0);
  check_vec(diff, {-2, 0, 0}, 1e-14);
  const Vec3 sdiff = dipole_field_secular(with, sys.moments, 0) - dipole_field_secular(without, sys.moments, 0);
  check_vec(sdiff, {-2, 0, 0}, 1e-14);
}

TEST_CASE("mode and integrator names round-trip") {
  for (Mode m : {Mode::LabFull, Mode::RotatingSecular}) CHECK(parse_mode(to_string(m)) == m);
  for (IntegratorKind k : {IntegratorKind::RK4, IntegratorKind::RKF45, IntegratorKind::DP54})
    CHECK(parse_integrator(to_string(k)) == k);
  CHECK_THROWS_AS(parse_mode("lab"), InvalidArgument);
  CHECK_THROWS_AS(parse_integrator("euler"), InvalidArgument);
}
