#include "dipspin/geometry.hpp"

#include <cmath>
#include <string>

#include "dipspin/error.hpp"

namespace dipspin {

namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kCoincidentTol = 1e-12;

// Wraps d into (-L/2, L/2].
double minimum_image(double d, int length) {
  const double len = static_cast<double>(length);
  return d - len * std::ceil(d / len - 0.5);
}

}  // namespace

void SpinSystem::validate() const {
  if (moments.size() != positions.size()) {
    throw InvalidArgument("moments and positions differ in length");
  }
  if (gamma_sign != 1 && gamma_sign != -1) {
    throw InvalidArgument("gamma_sign must be +1 or -1");
  }
  for (std::size_t l = 0; l < moments.size(); ++l) {
    if (std::abs(norm(moments[l]) - 1.0) > kUnitTol) {
      throw InvalidArgument("moment " + std::to_string(l) + " is not a unit vector");
    }
  }
  if (cell) {
    const auto& c = *cell;
    for (std::size_t l = 0; l < positions.size(); ++l) {
      const Vec3& p = positions[l];
      if (p.x < 0 || p.x >= c[0] || p.y < 0 || p.y >= c[1] || p.z < 0 || p.z >= c[2]) {
        throw InvalidArgument("position " + std::to_string(l) + " outside periodic cell");
      }
    }
  }
  for (std::size_t l = 0; l < positions.size(); ++l) {
    for (std::size_t k = l + 1; k < positions.size(); ++k) {
      if (norm(separation(positions[l], positions[k], cell)) < kCoincidentTol) {
        throw CoincidentSpins(l, k);
      }
    }
  }
}

SymTensor3 dipole_tensor(const Vec3& r) {
  const double r2 = dot(r, r);
  if (!(r2 > 0.0)) throw CoincidentSpins(0, 0);
  const double inv_r = 1.0 / std::sqrt(r2);
  const double inv_r3 = inv_r * inv_r * inv_r;
  const double inv_r5 = inv_r3 / r2;
  return {inv_r3 - 3.0 * r.x * r.x * inv_r5,
          -3.0 * r.x * r.y * inv_r5,
          -3.0 * r.x * r.z * inv_r5,
          inv_r3 - 3.0 * r.y * r.y * inv_r5,
          -3.0 * r.y * r.z * inv_r5,
          inv_r3 - 3.0 * r.z * r.z * inv_r5};
}

Vec3 separation(const Vec3& from, const Vec3& to, const std::optional<std::array<int, 3>>& cell) {
  Vec3 d = to - from;
  if (cell) {
    d.x = minimum_image(d.x, (*cell)[0]);
    d.y = minimum_image(d.y, (*cell)[1]);
    d.z = minimum_image(d.z, (*cell)[2]);
  }
  return d;
}

SpinSystem build_cubic_lattice(int n_x, int n_y, int n_z, bool periodic) {
  if (n_x < 1 || n_y < 1 || n_z < 1) {
    throw InvalidArgument("lattice dimensions must be >= 1");
  }
  SpinSystem sys;
  const auto n = static_cast<std::size_t>(n_x) * n_y * n_z;
  sys.positions.reserve(n);
  for (int i = 0; i < n_x; ++i) {
    for (int j = 0; j < n_y; ++j) {
      for (int k = 0; k < n_z; ++k) {
        sys.positions.push_back({double(i), double(j), double(k)});
      }
    }
  }
  sys.moments.assign(n, Vec3{0.0, 0.0, 1.0});
  if (periodic) sys.cell = std::array<int, 3>{n_x, n_y, n_z};
  return sys;
}

SpinSystem build_line(int n, const Vec3& direction) {
  if (n < 2) throw InvalidArgument("a line needs at least two spins");
  if (std::abs(norm(direction) - 1.0) > kUnitTol) {
    throw InvalidArgument("line direction must be a unit vector");
  }
  SpinSystem sys;
  sys.positions.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) sys.positions.push_back(double(j) * direction);
  sys.moments.assign(static_cast<std::size_t>(n), Vec3{0.0, 0.0, 1.0});
  return sys;
}

Vec3 direction_from_polar(double theta) {
  return {std::sin(theta), 0.0, std::cos(theta)};
}

ExchangeFn nearest_neighbour_exchange(double j) {
  return [j](std::size_t, std::size_t, const Vec3& r) {
    return std::abs(norm(r) - 1.0) < 1e-9 ? j : 0.0;
  };
}

CouplingTable build_couplings(const SpinSystem& sys, const ExchangeFn& exchange) {
  if (sys.moments.size() != sys.positions.size()) {
    throw InvalidArgument("moments and positions differ in length");
  }
  const std::size_t n = sys.size();
  CouplingTable t;
  t.n_ = n;
  const std::size_t nn = n * n;
  for (auto* v : {&t.dxx_, &t.dxy_, &t.dxz_, &t.dyy_, &t.dyz_, &t.dzz_, &t.a_}) v->assign(nn, 0.0);
  t.b_.assign(nn, {0.0, 0.0});
  t.c_.assign(nn, {0.0, 0.0});
  if (exchange) t.j_.assign(nn, 0.0);

  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = l + 1; k < n; ++k) {
      const Vec3 r = separation(sys.positions[l], sys.positions[k], sys.cell);
      if (norm(r) < kCoincidentTol) throw CoincidentSpins(l, k);
      const SymTensor3 d = dipole_tensor(r);
      const std::complex<double> b{(d.xx - d.yy) / 4.0, -d.xy / 2.0};
      const std::complex<double> c{d.xz / 2.0, -d.yz / 2.0};
      for (const std::size_t i : {l * n + k, k * n + l}) {
        t.dxx_[i] = d.xx;
        t.dxy_[i] = d.xy;
        t.dxz_[i] = d.xz;
        t.dyy_[i] = d.yy;
        t.dyz_[i] = d.yz;
        t.dzz_[i] = d.zz;
        t.a_[i] = d.zz;
        t.b_[i] = b;
        t.c_[i] = c;
      }
      if (exchange) {
        const double jv = exchange(l, k, r);
        t.j_[l * n + k] = jv;
        t.j_[k * n + l] = jv;
      }
    }
  }
  return t;
}

}  // namespace dipspin
