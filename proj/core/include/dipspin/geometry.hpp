#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dipspin/vec3.hpp"

namespace dipspin {

/// Positions are in units of the lattice constant; moments are unit vectors.
struct SpinSystem {
  std::vector<Vec3> positions;
  std::vector<Vec3> moments;
  /// Periodic box (n_x, n_y, n_z) in lattice units, when periodic.
  std::optional<std::array<int, 3>> cell;
  int gamma_sign = +1;

  std::size_t size() const { return positions.size(); }

  /// Throws InvalidArgument / CoincidentSpins when an invariant is broken.
  void validate() const;
};

/// Reduced dipole tensor delta_ab/r^3 - 3 r_a r_b / r^5.
SymTensor3 dipole_tensor(const Vec3& r);

/// Separation r_k - r_l, wrapped to the nearest image when `cell` is set.
Vec3 separation(const Vec3& from, const Vec3& to, const std::optional<std::array<int, 3>>& cell);

SpinSystem build_cubic_lattice(int n_x, int n_y, int n_z, bool periodic);

/// `n` spins at j * direction, j = 0..n-1. `direction` must be a unit vector.
SpinSystem build_line(int n, const Vec3& direction);

/// Unit vector in the xz-plane at polar angle `theta` from z.
Vec3 direction_from_polar(double theta);

/// Exchange coefficient generator: (l, k, separation) -> J_lk.
using ExchangeFn = std::function<double(std::size_t, std::size_t, const Vec3&)>;

/// Nearest-neighbour exchange: `j` for pairs at unit distance, zero otherwise.
ExchangeFn nearest_neighbour_exchange(double j);

/// Dense pairwise couplings. All N x N arrays are row-major, zero on the diagonal.
class CouplingTable {
 public:
  CouplingTable() = default;

  std::size_t size() const { return n_; }

  SymTensor3 dd(std::size_t l, std::size_t k) const {
    const std::size_t i = l * n_ + k;
    return {dxx_[i], dxy_[i], dxz_[i], dyy_[i], dyz_[i], dzz_[i]};
  }
  double a(std::size_t l, std::size_t k) const { return a_[l * n_ + k]; }
  std::complex<double> b(std::size_t l, std::size_t k) const { return b_[l * n_ + k]; }
  std::complex<double> c(std::size_t l, std::size_t k) const { return c_[l * n_ + k]; }
  bool has_exchange() const { return !j_.empty(); }
  double j(std::size_t l, std::size_t k) const { return j_.empty() ? 0.0 : j_[l * n_ + k]; }

  // Raw rows for the field kernels.
  std::span<const double> secular_row(std::size_t l) const { return row(a_, l); }
  std::span<const double> exchange_row(std::size_t l) const { return row(j_, l); }
  struct TensorRows {
    std::span<const double> xx, xy, xz, yy, yz, zz;
  };
  TensorRows tensor_row(std::size_t l) const {
    return {row(dxx_, l), row(dxy_, l), row(dxz_, l), row(dyy_, l), row(dyz_, l), row(dzz_, l)};
  }

 private:
  friend CouplingTable build_couplings(const SpinSystem&, const ExchangeFn&);

  std::span<const double> row(const std::vector<double>& v, std::size_t l) const {
    if (v.empty()) return {};
    return {v.data() + l * n_, n_};
  }

  std::size_t n_ = 0;
  std::vector<double> dxx_, dxy_, dxz_, dyy_, dyz_, dzz_;
  std::vector<double> a_;
  std::vector<std::complex<double>> b_, c_;
  std::vector<double> j_;
};

/// Precomputes every pairwise tensor (minimum image when periodic), the
/// secular coefficient a = D^zz and the diagnostics
///   b = (D^xx - D^yy - 2i D^xy) / 4,   c = (D^xz - i D^yz) / 2.
CouplingTable build_couplings(const SpinSystem& sys, const ExchangeFn& exchange = {});

}  // namespace dipspin
