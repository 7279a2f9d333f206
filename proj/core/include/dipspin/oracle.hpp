#pragma once

#include <array>
#include <vector>

namespace dipspin {

/// Two spin-1/2 particles in a field along z, in the product basis
/// |uu>, |ud>, |du>, |dd> with hbar = w0 = 1. Azimuth is fixed at zero so
/// the matrix is real.
struct TwoSpinHamiltonian {
  double theta = 0.0;
  double omega_d = 0.0;
  std::array<double, 16> matrix{};  // row-major

  double operator()(int i, int j) const { return matrix[4 * i + j]; }
  double trace() const { return matrix[0] + matrix[5] + matrix[10] + matrix[15]; }
};

TwoSpinHamiltonian build_hamiltonian(double theta, double omega_d);

/// Dipolar part only (traceless for every theta).
std::array<double, 16> dipolar_part(double theta, double omega_d);

struct EigenSystem {
  std::array<double, 4> values{};                   // ascending
  std::array<std::array<double, 4>, 4> vectors{};  // vectors[n] pairs with values[n]
};

/// Cyclic Jacobi rotations on the symmetric 4x4 matrix.
EigenSystem diagonalize(const std::array<double, 16>& m);

std::array<double, 4> eigenvalues(const TwoSpinHamiltonian& h);

struct Transition {
  int lower = 0;
  int upper = 0;
  double freq = 0.0;
  double intensity = 0.0;  ///< |<lower| Sx1 + Sx2 |upper>|^2
};

/// All level pairs with nonzero transverse matrix element, strongest first.
std::vector<Transition> transitions(const TwoSpinHamiltonian& h);

/// Distance between the two strongest transitions with frequency in
/// (0.5, 1.5). Zero when only one line survives there.
double predicted_splitting(double theta, double omega_d);

// Closed forms the numeric spectrum is checked against, sorted ascending.
std::array<double, 4> closed_form_theta0(double omega_d);
std::array<double, 4> closed_form_theta_half_pi(double omega_d);
std::array<double, 4> closed_form_theta_half_pi_small(double omega_d);  // first order in omega_d
std::array<double, 4> closed_form_magic();

/// The reference matrices as they are usually printed for theta = 0 and pi/2.
std::array<double, 16> reference_matrix_theta0(double omega_d);
std::array<double, 16> reference_matrix_theta_half_pi(double omega_d);

}  // namespace dipspin
