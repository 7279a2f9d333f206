#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "dipspin/dynamics.hpp"
#include "dipspin/error.hpp"
#include "field_kernels.hpp"

namespace dipspin {

namespace {

struct Tableau {
  int stages;
  std::array<double, 7> c;
  std::array<std::array<double, 7>, 7> a;
  std::array<double, 7> b;      // propagated solution
  std::array<double, 7> b_alt;  // embedded solution (error = b - b_alt)
  bool fsal;
};

constexpr Tableau kRK4{
    4,
    {0.0, 0.5, 0.5, 1.0},
    {{{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}}},
    {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0},
    {},
    false,
};

// Fehlberg 4(5), 4th-order solution propagated.
constexpr Tableau kRKF45{
    6,
    {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0},
    {{{},
      {1.0 / 4.0},
      {3.0 / 32.0, 9.0 / 32.0},
      {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0},
      {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0},
      {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0}}},
    {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0},
    {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0},
    false,
};

// Dormand-Prince 5(4), 5th-order solution propagated, first-same-as-last.
constexpr Tableau kDP54{
    7,
    {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0},
    {{{},
      {1.0 / 5.0},
      {3.0 / 40.0, 9.0 / 40.0},
      {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
      {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
      {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0},
      {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0}}},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0},
    {5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0,
     1.0 / 40.0},
    true,
};

const Tableau& tableau_for(IntegratorKind kind) {
  switch (kind) {
    case IntegratorKind::RK4:
      return kRK4;
    case IntegratorKind::RKF45:
      return kRKF45;
    case IntegratorKind::DP54:
      return kDP54;
  }
  return kRK4;
}

class Stepper {
 public:
  Stepper(const CouplingTable& table, const SimPlan& plan, int gamma_sign, std::size_t n)
      : eval_(table, plan.mode),
        external_(detail::external_field(plan)),
        gamma_sign_(gamma_sign),
        tab_(tableau_for(plan.integrator)),
        tmp_(n) {
    for (auto& k : k_) k.resize(n);
  }

  /// One explicit step of size h. Writes the propagated solution to `out`;
  /// returns the scaled error norm for adaptive schemes (0 for RK4).
  double step(const std::vector<Vec3>& y, double h, double factor, std::vector<Vec3>& out,
              double rtol, double atol) {
    const std::size_t n = y.size();
    const double scale = factor * gamma_sign_;
    if (!(tab_.fsal && fsal_valid_)) eval(y, k_[0], scale);
    for (int s = 1; s < tab_.stages; ++s) {
      for (std::size_t l = 0; l < n; ++l) {
        Vec3 acc = y[l];
        for (int j = 0; j < s; ++j) {
          if (tab_.a[s][j] != 0.0) acc += (h * tab_.a[s][j]) * k_[j][l];
        }
        tmp_[l] = acc;
      }
      eval(tmp_, k_[s], scale);
    }
    for (std::size_t l = 0; l < n; ++l) {
      Vec3 acc = y[l];
      for (int j = 0; j < tab_.stages; ++j) {
        if (tab_.b[j] != 0.0) acc += (h * tab_.b[j]) * k_[j][l];
      }
      out[l] = acc;
    }
    if (tab_.stages == 4 && tab_.b_alt[0] == 0.0) return 0.0;

    double sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      Vec3 err;
      for (int j = 0; j < tab_.stages; ++j) {
        const double w = tab_.b[j] - tab_.b_alt[j];
        if (w != 0.0) err += (h * w) * k_[j][l];
      }
      const std::array<double, 3> e{err.x, err.y, err.z};
      const std::array<double, 3> y0{y[l].x, y[l].y, y[l].z};
      const std::array<double, 3> y1{out[l].x, out[l].y, out[l].z};
      for (int c = 0; c < 3; ++c) {
        const double sc = atol + rtol * std::max(std::abs(y0[c]), std::abs(y1[c]));
        sum += (e[c] / sc) * (e[c] / sc);
      }
    }
    return std::sqrt(sum / (3.0 * static_cast<double>(n)));
  }

  /// Call after a step is accepted so FSAL schemes can reuse the last stage.
  void accepted() {
    if (tab_.fsal) {
      std::swap(k_[0], k_[tab_.stages - 1]);
      fsal_valid_ = true;
    }
  }
  void invalidate() { fsal_valid_ = false; }

  double energy(const std::vector<Vec3>& y) { return eval_.energy(y, external_); }
  std::size_t evaluations() const { return evaluations_; }
  bool adaptive() const { return tab_.stages != 4; }

 private:
  void eval(const std::vector<Vec3>& y, std::vector<Vec3>& out, double scale) {
    eval_.rhs(y, out, external_, scale);
    ++evaluations_;
  }

  detail::FieldEvaluator eval_;
  Vec3 external_;
  int gamma_sign_;
  const Tableau& tab_;
  std::array<std::vector<Vec3>, 7> k_;
  std::vector<Vec3> tmp_;
  bool fsal_valid_ = false;
  std::size_t evaluations_ = 0;
};

double max_norm_drift(const std::vector<Vec3>& e) {
  double worst = 0.0;
  for (const Vec3& v : e) worst = std::max(worst, std::abs(norm(v) - 1.0));
  return worst;
}

class Recorder {
 public:
  Recorder(Trajectory& traj, Stepper& stepper, std::size_t snapshot_every)
      : traj_(traj), stepper_(stepper), snapshot_every_(snapshot_every) {}

  void operator()(double t, const std::vector<Vec3>& e) {
    Vec3 mean;
    double ez = 0.0;
    for (const Vec3& v : e) {
      mean += v;
      ez += v.z;
    }
    mean = mean / static_cast<double>(e.size());
    traj_.times.push_back(t);
    traj_.mean_moment.push_back(mean);
    traj_.total_ez.push_back(ez);
    traj_.max_norm_drift.push_back(max_norm_drift(e));
    traj_.energy.push_back(stepper_.energy(e));
    if (snapshot_every_ > 0 && count_ % snapshot_every_ == 0) {
      traj_.snapshot_times.push_back(t);
      traj_.snapshots.push_back(e);
    }
    ++count_;
  }

 private:
  Trajectory& traj_;
  Stepper& stepper_;
  std::size_t snapshot_every_;
  std::size_t count_ = 0;
};

[[noreturn]] void drift_abort(double drift, double t, double h, double threshold) {
  std::ostringstream os;
  os.precision(3);
  os << "moment norm drift " << drift << " exceeds " << threshold << " at t=" << t << " (step " << h
     << "); reduce dt or tighten tolerances";
  throw IntegrationError(os.str());
}

struct Segment {
  double start;
  double end;
  double factor;
};

std::vector<Segment> segments_of(const SimPlan& plan) {
  std::vector<Segment> segs;
  double start = 0.0;
  double factor = 1.0;
  for (const Reversal& r : plan.reversals) {
    segs.push_back({start, r.tau, factor});
    start = r.tau;
    factor = -r.k;
  }
  segs.push_back({start, plan.t_end, factor});
  return segs;
}

void integrate_fixed(const SimPlan& plan, double dt, double sample, std::vector<Vec3>& e, Stepper& stepper,
                     Recorder& record, Trajectory& traj) {
  // Shrink the step so a whole number of steps spans one sample interval.
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::ceil(sample / dt - 1e-9)));
  dt = sample / static_cast<double>(stride);
  std::vector<Vec3> next(e.size());
  std::size_t global = 0;
  record(0.0, e);
  for (const Segment& seg : segments_of(plan)) {
    const double len = seg.end - seg.start;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(len / dt - 1e-9)));
    const double h = len / static_cast<double>(steps);
    for (std::size_t i = 1; i <= steps; ++i) {
      stepper.step(e, h, seg.factor, next, plan.rtol, plan.atol);
      e.swap(next);
      ++global;
      const double t = (i == steps) ? seg.end : seg.start + static_cast<double>(i) * h;
      const double drift = max_norm_drift(e);
      if (drift > plan.norm_abort) drift_abort(drift, t, h, plan.norm_abort);
      if (global % stride == 0) record(t, e);
    }
  }
  traj.steps = global;
}

void integrate_adaptive(const SimPlan& plan, double dt, double sample, std::vector<Vec3>& e,
                        Stepper& stepper, Recorder& record, Trajectory& traj) {
  std::vector<Vec3> next(e.size());
  double h = dt;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  record(0.0, e);
  std::size_t next_sample = 1;
  for (const Segment& seg : segments_of(plan)) {
    stepper.invalidate();
    double t = seg.start;
    while (t < seg.end) {
      double target = seg.end;
      const double sample_t = static_cast<double>(next_sample) * sample;
      bool hits_sample = false;
      if (sample_t <= seg.end + 1e-12 * sample) {
        target = std::min(target, sample_t);
        hits_sample = true;
      }
      double h_try = std::min(h, target - t);
      const bool clipped = h_try < h;
      const double err = stepper.step(e, h_try, seg.factor, next, plan.rtol, plan.atol);
      const double fac = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
      if (err <= 1.0) {
        e.swap(next);
        stepper.accepted();
        const bool landed = (t + h_try >= target - 1e-12 * std::max(1.0, target));
        t = landed ? target : t + h_try;
        ++accepted;
        const double drift = max_norm_drift(e);
        if (drift > plan.norm_abort) drift_abort(drift, t, h_try, plan.norm_abort);
        if (landed && hits_sample && std::abs(t - sample_t) <= 1e-9 * std::max(1.0, sample_t)) {
          record(t, e);
          ++next_sample;
        }
        if (!clipped) h = h_try * fac;
      } else {
        ++rejected;
        h = h_try * fac;
        if (h < 1e-14 * std::max(1.0, t)) {
          throw IntegrationError("adaptive step size underflow at t=" + std::to_string(t));
        }
      }
    }
  }
  traj.steps = accepted;
  (void)rejected;
}

}  // namespace

Trajectory integrate(const SimPlan& plan, const CouplingTable& table, const SpinSystem& sys) {
  plan.validate();
  if (sys.moments.size() != table.size()) {
    throw InvalidArgument("spin system does not match coupling table");
  }
  if (sys.moments.empty()) throw InvalidArgument("empty spin system");

  const double dt = plan.dt > 0.0 ? plan.dt : default_step(plan.mode, plan.p_d);
  const double sample = plan.sample_interval > 0.0 ? plan.sample_interval
                                                   : default_sample_interval(plan.mode, plan.p_d);

  Trajectory traj;
  traj.mode = plan.mode;
  traj.p_d = plan.p_d;
  traj.gamma_sign = sys.gamma_sign;
  std::vector<Vec3> e = sys.moments;
  Stepper stepper(table, plan, sys.gamma_sign, e.size());
  Recorder record(traj, stepper, plan.snapshot_every);

  if (plan.integrator == IntegratorKind::RK4) {
    integrate_fixed(plan, dt, sample, e, stepper, record, traj);
  } else {
    integrate_adaptive(plan, dt, sample, e, stepper, record, traj);
  }
  traj.rhs_evaluations = stepper.evaluations();
  traj.final_moments = std::move(e);
  return traj;
}

}  // namespace dipspin
