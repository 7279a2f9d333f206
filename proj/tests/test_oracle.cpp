#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dipspin/error.hpp"
#include "dipspin/experiments.hpp"
#include "dipspin/oracle.hpp"

using namespace dipspin;

namespace {

constexpr double kPi = std::numbers::pi;

double max_dev(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Characteristic polynomial det(H - x) evaluated by cofactor expansion.
double det4(const std::array<double, 16>& m) {
  auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
    auto at = [&](int r, int c) { return m[4 * r + c]; };
    return at(r0, c0) * (at(r1, c1) * at(r2, c2) - at(r1, c2) * at(r2, c1)) -
           at(r0, c1) * (at(r1, c0) * at(r2, c2) - at(r1, c2) * at(r2, c0)) +
           at(r0, c2) * (at(r1, c0) * at(r2, c1) - at(r1, c1) * at(r2, c0));
  };
  return m[0] * det3(1, 2, 3, 1, 2, 3) - m[1] * det3(1, 2, 3, 0, 2, 3) + m[2] * det3(1, 2, 3, 0, 1, 3) -
         m[3] * det3(1, 2, 3, 0, 1, 2);
}

}  // namespace

TEST_CASE("Hamiltonian is symmetric and its dipolar part traceless") {
  for (double theta = 0.0; theta <= kPi; theta += 0.13) {
    const TwoSpinHamiltonian h = build_hamiltonian(theta, 0.05);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(h(i, j) == h(j, i));
    const auto d = dipolar_part(theta, 0.05);
    CHECK(std::abs(d[0] + d[5] + d[10] + d[15]) < 1e-15);
  }
  CHECK_THROWS_AS(build_hamiltonian(0.0, 0.0), InvalidArgument);
}

TEST_CASE("Zeeman part is diag(-1, 0, 0, 1)") {
  const auto h = build_hamiltonian(0.3, 1e-300);
  CHECK(h(0, 0) == doctest::Approx(-1.0));
  CHECK(h(3, 3) == doctest::Approx(1.0));
  CHECK(h(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("closed forms at theta = 0 and pi/2") {
  for (double w : {0.1, 0.01, 0.001}) {
    CHECK(max_dev(eigenvalues(build_hamiltonian(0.0, w)), closed_form_theta0(w)) < 1e-12);
    CHECK(max_dev(eigenvalues(build_hamiltonian(0.5 * kPi, w)), closed_form_theta_half_pi(w)) < 1e-12);
  }
}

TEST_CASE("first-order forms deviate at second order") {
  double prev = 0.0;
  for (double w : {0.1, 0.01, 0.001}) {
    const double dev = max_dev(eigenvalues(build_hamiltonian(0.5 * kPi, w)), closed_form_theta_half_pi_small(w));
    CHECK(dev < 2.0 * w * w);
    if (prev > 0.0) CHECK(prev / dev == doctest::Approx(100.0).epsilon(0.05));
    prev = dev;
  }
}

TEST_CASE("magic angle spectrum") {
  for (double w : {0.1, 0.01, 0.001}) {
    CHECK(max_dev(eigenvalues(build_hamiltonian(magic_angle(), w)), closed_form_magic()) < 2.0 * w * w);
  }
}

TEST_CASE("eigen solver against trace, determinant and orthogonality") {
  for (double theta = 0.0; theta <= kPi; theta += 0.21) {
    for (double w : {0.5, 0.05}) {
      const TwoSpinHamiltonian h = build_hamiltonian(theta, w);
      const EigenSystem es = diagonalize(h.matrix);
      const double sum = es.values[0] + es.values[1] + es.values[2] + es.values[3];
      CHECK(sum == doctest::Approx(h.trace()).epsilon(1e-12));
      CHECK(es.values[0] * es.values[1] * es.values[2] * es.values[3] ==
            doctest::Approx(det4(h.matrix)).epsilon(1e-10));
      for (int n = 0; n < 4; ++n) {
        for (int m = 0; m < 4; ++m) {
          double d = 0.0;
          for (int k = 0; k < 4; ++k) d += es.vectors[n][k] * es.vectors[m][k];
          CHECK(d == doctest::Approx(n == m ? 1.0 : 0.0).epsilon(1e-12));
        }
        // H v = E v
        for (int r = 0; r < 4; ++r) {
          double hv = 0.0;
          for (int c = 0; c < 4; ++c) hv += h(r, c) * es.vectors[n][c];
          CHECK(std::abs(hv - es.values[n] * es.vectors[n][r]) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("reference matrices differ from direct construction only in the Zeeman corners") {
  const double w = 0.01;
  const auto h0 = build_hamiltonian(0.0, w);
  const auto r0 = reference_matrix_theta0(w);
  const auto h90 = build_hamiltonian(0.5 * kPi, w);
  const auto r90 = reference_matrix_theta_half_pi(w);
  for (int i = 1; i < 15; ++i) {
    CHECK(h0.matrix[i] == doctest::Approx(r0[i]).epsilon(1e-12));
    CHECK(h90.matrix[i] == doctest::Approx(r90[i]).epsilon(1e-12));
  }
  // Corners swapped: the reference puts +1 where the direct build has -1.
  CHECK(r0[0] == doctest::Approx(h0.matrix[15]).epsilon(1e-12));
  CHECK(r0[15] == doctest::Approx(h0.matrix[0]).epsilon(1e-12));
  CHECK(r90[0] == doctest::Approx(h90.matrix[15]).epsilon(1e-12));
  // Same spectrum either way.
  CHECK(max_dev(diagonalize(r0).values, closed_form_theta0(w)) < 1e-12);
  CHECK(max_dev(diagonalize(r90).values, closed_form_theta_half_pi(w)) < 1e-12);
}

TEST_CASE("predicted splitting") {
  const double w = 0.01;
  const double s0 = predicted_splitting(0.0, w);
  const double s90 = predicted_splitting(0.5 * kPi, w);
  CHECK(s0 == doctest::Approx(6.0 * w).epsilon(1e-9));
  CHECK(s90 / s0 == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(predicted_splitting(magic_angle(), w) < 2.0 * w * w);
  CHECK(predicted_splitting(0.0, 1e-2) / predicted_splitting(0.0, 1e-3) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("transitions are ordered by intensity and carry no singlet line") {
  const auto lines = transitions(build_hamiltonian(0.0, 0.01));
  REQUIRE(lines.size() >= 2);
  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(lines[i - 1].intensity >= lines[i].intensity);
  // At theta = 0 only the two triplet lines are allowed; |<T0|Sx|T+>|^2 = 1/2.
  CHECK(lines.size() == 2);
  CHECK(lines[0].intensity == doctest::Approx(0.5));
  CHECK(lines[1].intensity == doctest::Approx(0.5));
}
