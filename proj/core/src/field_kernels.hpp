#pragma once

// Internal: O(N^2) field sums over a structure-of-arrays copy of the moments.

#include <span>
#include <vector>

#include "dipspin/dynamics.hpp"

namespace dipspin::detail {

class FieldEvaluator {
 public:
  FieldEvaluator(const CouplingTable& table, Mode mode) : table_(table), mode_(mode) {}

  /// Dipole (+ exchange) field at every spin.
  void fields(std::span<const Vec3> e, std::span<Vec3> out);

  /// de = scale * e x (external + H_dip). `external` is (z + h)/p_d in lab-full mode, zero otherwise.
  void rhs(std::span<const Vec3> e, std::span<Vec3> de, const Vec3& external, double scale);

  /// Energy consistent with the field: -sum e.external - 1/2 sum e.H_dip.
  double energy(std::span<const Vec3> e, const Vec3& external);

 private:
  void load(std::span<const Vec3> e);

  const CouplingTable& table_;
  Mode mode_;
  std::vector<double> ex_, ey_, ez_;
  std::vector<Vec3> h_;
};

Vec3 external_field(const SimPlan& plan);

}  // namespace dipspin::detail
