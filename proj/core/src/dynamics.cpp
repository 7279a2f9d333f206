#include "dipspin/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dipspin/error.hpp"
#include "field_kernels.hpp"

namespace dipspin {

std::string_view to_string(Mode m) {
  return m == Mode::LabFull ? "lab-full" : "rotating-secular";
}

std::string_view to_string(IntegratorKind k) {
  switch (k) {
    case IntegratorKind::RK4:
      return "rk4";
    case IntegratorKind::RKF45:
      return "rkf45";
    case IntegratorKind::DP54:
      return "dp54";
  }
  return "rk4";
}

Mode parse_mode(std::string_view s) {
  if (s == "lab-full") return Mode::LabFull;
  if (s == "rotating-secular") return Mode::RotatingSecular;
  throw InvalidArgument("unknown mode '" + std::string(s) + "'");
}

IntegratorKind parse_integrator(std::string_view s) {
  if (s == "rk4") return IntegratorKind::RK4;
  if (s == "rkf45") return IntegratorKind::RKF45;
  if (s == "dp54") return IntegratorKind::DP54;
  throw InvalidArgument("unknown integrator '" + std::string(s) + "'");
}

void SimPlan::validate() const {
  if (!(p_d > 0.0)) throw InvalidArgument("p_d must be positive");
  if (!(dt >= 0.0)) throw InvalidArgument("dt must be >= 0");
  if (!(t_end > 0.0)) throw InvalidArgument("t_end must be positive");
  if (!(sample_interval >= 0.0)) throw InvalidArgument("sample_interval must be >= 0");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("tolerances must be positive");
  if (!(norm_abort > 0.0)) throw InvalidArgument("norm_abort must be positive");
  if (!reversals.empty() && mode == Mode::LabFull) {
    throw InvalidArgument("time reversal is only defined in rotating-secular mode");
  }
  double prev = 0.0;
  for (const Reversal& r : reversals) {
    if (!(r.tau > prev)) {
      throw InvalidArgument("reversal times must be positive and strictly increasing");
    }
    if (!(r.tau < t_end)) throw InvalidArgument("reversal time must precede t_end");
    if (!(r.k > 0.0 && r.k <= 1.0)) throw InvalidArgument("reversal factor k must lie in (0, 1]");
    prev = r.tau;
  }
}

double SimPlan::rhs_factor(double t) const {
  double f = 1.0;
  for (const Reversal& r : reversals) {
    if (r.tau <= t) f = -r.k;
  }
  return f;
}

double default_step(Mode mode, double p_d) {
  if (mode == Mode::RotatingSecular) return 0.0025;
  return std::min(0.005, 2.0 * std::numbers::pi * p_d / 1000.0);
}

double default_sample_interval(Mode mode, double p_d) {
  if (mode == Mode::RotatingSecular) return 0.01;
  return 2.0 * std::numbers::pi * p_d / 16.0;
}

std::vector<double> Trajectory::component(int axis) const {
  std::vector<double> out;
  out.reserve(mean_moment.size());
  for (const Vec3& m : mean_moment) out.push_back(axis == 0 ? m.x : (axis == 1 ? m.y : m.z));
  return out;
}

namespace {

void check_index(const CouplingTable& table, std::span<const Vec3> moments, std::size_t l) {
  if (moments.size() != table.size()) throw InvalidArgument("moment count does not match coupling table");
  if (l >= moments.size()) throw InvalidArgument("spin index out of range");
}

}  // namespace

Vec3 dipole_field_full(const CouplingTable& table, std::span<const Vec3> moments, std::size_t l) {
  check_index(table, moments, l);
  Vec3 h;
  for (std::size_t k = 0; k < moments.size(); ++k) {
    if (k == l) continue;
    h -= table.dd(l, k).apply(moments[k]);
    h -= table.j(l, k) * moments[k];
  }
  return h;
}

Vec3 dipole_field_secular(const CouplingTable& table, std::span<const Vec3> moments, std::size_t l) {
  check_index(table, moments, l);
  Vec3 h;
  for (std::size_t k = 0; k < moments.size(); ++k) {
    if (k == l) continue;
    const double a = table.a(l, k);
    const double j = table.j(l, k);
    h.x += (0.5 * a - j) * moments[k].x;
    h.y += (0.5 * a - j) * moments[k].y;
    h.z += (-a - j) * moments[k].z;
  }
  return h;
}

void dipole_fields_full(const CouplingTable& table, std::span<const Vec3> moments, std::span<Vec3> out) {
  if (moments.size() != table.size() || out.size() != moments.size()) {
    throw InvalidArgument("size mismatch in field evaluation");
  }
  detail::FieldEvaluator(table, Mode::LabFull).fields(moments, out);
}

void dipole_fields_secular(const CouplingTable& table, std::span<const Vec3> moments,
                           std::span<Vec3> out) {
  if (moments.size() != table.size() || out.size() != moments.size()) {
    throw InvalidArgument("size mismatch in field evaluation");
  }
  detail::FieldEvaluator(table, Mode::RotatingSecular).fields(moments, out);
}

std::vector<Vec3> rhs(const SimPlan& plan, const CouplingTable& table, std::span<const Vec3> moments,
                      double t, int gamma_sign) {
  if (moments.size() != table.size()) throw InvalidArgument("moment count does not match coupling table");
  std::vector<Vec3> de(moments.size());
  detail::FieldEvaluator eval(table, plan.mode);
  eval.rhs(moments, de, detail::external_field(plan), gamma_sign * plan.rhs_factor(t));
  return de;
}

double total_energy(const SimPlan& plan, const CouplingTable& table, std::span<const Vec3> moments) {
  if (moments.size() != table.size()) throw InvalidArgument("moment count does not match coupling table");
  detail::FieldEvaluator eval(table, plan.mode);
  return eval.energy(moments, detail::external_field(plan));
}

namespace detail {

Vec3 external_field(const SimPlan& plan) {
  if (plan.mode == Mode::RotatingSecular) return {};
  return Vec3{plan.h_x, plan.h_y, 1.0} / plan.p_d;
}

void FieldEvaluator::load(std::span<const Vec3> e) {
  const std::size_t n = e.size();
  ex_.resize(n);
  ey_.resize(n);
  ez_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    ex_[k] = e[k].x;
    ey_[k] = e[k].y;
    ez_[k] = e[k].z;
  }
}

void FieldEvaluator::fields(std::span<const Vec3> e, std::span<Vec3> out) {
  load(e);
  const std::size_t n = e.size();
  const double* ex = ex_.data();
  const double* ey = ey_.data();
  const double* ez = ez_.data();
  const bool exchange = table_.has_exchange();

  if (mode_ == Mode::RotatingSecular) {
#pragma omp parallel for schedule(static)
    for (std::size_t l = 0; l < n; ++l) {
      const double* a = table_.secular_row(l).data();
      double sx = 0.0, sy = 0.0, sz = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sx += a[k] * ex[k];
        sy += a[k] * ey[k];
        sz += a[k] * ez[k];
      }
      Vec3 h{0.5 * sx, 0.5 * sy, -sz};
      if (exchange) {
        const double* j = table_.exchange_row(l).data();
        double jx = 0.0, jy = 0.0, jz = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          jx += j[k] * ex[k];
          jy += j[k] * ey[k];
          jz += j[k] * ez[k];
        }
        h -= Vec3{jx, jy, jz};
      }
      out[l] = h;
    }
    return;
  }

#pragma omp parallel for schedule(static)
  for (std::size_t l = 0; l < n; ++l) {
    const auto r = table_.tensor_row(l);
    const double* xx = r.xx.data();
    const double* xy = r.xy.data();
    const double* xz = r.xz.data();
    const double* yy = r.yy.data();
    const double* yz = r.yz.data();
    const double* zz = r.zz.data();
    double hx = 0.0, hy = 0.0, hz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      hx += xx[k] * ex[k] + xy[k] * ey[k] + xz[k] * ez[k];
      hy += xy[k] * ex[k] + yy[k] * ey[k] + yz[k] * ez[k];
      hz += xz[k] * ex[k] + yz[k] * ey[k] + zz[k] * ez[k];
    }
    if (exchange) {
      const double* j = table_.exchange_row(l).data();
      for (std::size_t k = 0; k < n; ++k) {
        hx += j[k] * ex[k];
        hy += j[k] * ey[k];
        hz += j[k] * ez[k];
      }
    }
    out[l] = Vec3{-hx, -hy, -hz};
  }
}

void FieldEvaluator::rhs(std::span<const Vec3> e, std::span<Vec3> de, const Vec3& external, double scale) {
  h_.resize(e.size());
  fields(e, h_);
  for (std::size_t l = 0; l < e.size(); ++l) {
    de[l] = scale * cross(e[l], external + h_[l]);
  }
}

double FieldEvaluator::energy(std::span<const Vec3> e, const Vec3& external) {
  h_.resize(e.size());
  fields(e, h_);
  double zeeman = 0.0;
  double dip = 0.0;
  for (std::size_t l = 0; l < e.size(); ++l) {
    zeeman -= dot(e[l], external);
    dip -= 0.5 * dot(e[l], h_[l]);
  }
  return zeeman + dip;
}

}  // namespace detail

}  // namespace dipspin
