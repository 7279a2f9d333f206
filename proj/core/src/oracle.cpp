#include "dipspin/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dipspin/error.hpp"

namespace dipspin {

namespace {

using Mat = std::array<double, 16>;

// The three dipolar blocks, weighted by (1 - 3cos^2), sin cos and sin^2.
constexpr Mat kSecular{1, 0, 0, 0,  0, -1, -1, 0,  0, -1, -1, 0,  0, 0, 0, 1};
constexpr Mat kSingleFlip{0, 1, 1, 0,  1, 0, 0, -1,  1, 0, 0, -1,  0, -1, -1, 0};
constexpr Mat kDoubleFlip{0, 0, 0, 1,  0, 0, 0, 0,  0, 0, 0, 0,  1, 0, 0, 0};

// Sx1 + Sx2 (spin-1/2 operators, factor 1/2 included).
constexpr Mat kSxTotal{0, 0.5, 0.5, 0,  0.5, 0, 0, 0.5,  0.5, 0, 0, 0.5,  0, 0.5, 0.5, 0};

std::array<double, 4> sorted(std::array<double, 4> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

Mat dipolar_part(double theta, double omega_d) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double w1 = 1.0 - 3.0 * c * c;
  const double w2 = -3.0 * s * c;
  const double w3 = -3.0 * s * s;
  Mat m{};
  for (int i = 0; i < 16; ++i) {
    m[i] = 0.5 * omega_d * (w1 * kSecular[i] + w2 * kSingleFlip[i] + w3 * kDoubleFlip[i]);
  }
  return m;
}

TwoSpinHamiltonian build_hamiltonian(double theta, double omega_d) {
  if (!(omega_d > 0.0)) throw InvalidArgument("omega_d must be positive");
  TwoSpinHamiltonian h;
  h.theta = theta;
  h.omega_d = omega_d;
  h.matrix = dipolar_part(theta, omega_d);
  h.matrix[0] -= 1.0;
  h.matrix[15] += 1.0;
  return h;
}

EigenSystem diagonalize(const Mat& input) {
  Mat a = input;
  Mat v{};
  for (int i = 0; i < 4; ++i) v[5 * i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += a[4 * p + q] * a[4 * p + q];
    if (off < 1e-300) break;

    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        const double apq = a[4 * p + q];
        if (apq == 0.0) continue;
        const double theta = (a[4 * q + q] - a[4 * p + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[4 * k + p];
          const double akq = a[4 * k + q];
          a[4 * k + p] = c * akp - s * akq;
          a[4 * k + q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[4 * p + k];
          const double aqk = a[4 * q + k];
          a[4 * p + k] = c * apk - s * aqk;
          a[4 * q + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 4; ++k) {
          const double vkp = v[4 * k + p];
          const double vkq = v[4 * k + q];
          v[4 * k + p] = c * vkp - s * vkq;
          v[4 * k + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a[5 * x] < a[5 * y]; });
  EigenSystem es;
  for (int n = 0; n < 4; ++n) {
    es.values[n] = a[5 * order[n]];
    for (int k = 0; k < 4; ++k) es.vectors[n][k] = v[4 * k + order[n]];
  }
  return es;
}

std::array<double, 4> eigenvalues(const TwoSpinHamiltonian& h) { return diagonalize(h.matrix).values; }

std::vector<Transition> transitions(const TwoSpinHamiltonian& h) {
  const EigenSystem es = diagonalize(h.matrix);
  std::vector<Transition> out;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      double amp = 0.0;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) amp += es.vectors[i][r] * kSxTotal[4 * r + c] * es.vectors[j][c];
      const double intensity = amp * amp;
      if (intensity < 1e-12) continue;
      out.push_back({i, j, es.values[j] - es.values[i], intensity});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Transition& x, const Transition& y) { return x.intensity > y.intensity; });
  return out;
}

double predicted_splitting(double theta, double omega_d) {
  std::vector<double> lines;
  for (const Transition& t : transitions(build_hamiltonian(theta, omega_d))) {
    if (t.freq > 0.5 && t.freq < 1.5) lines.push_back(t.freq);
    if (lines.size() == 2) break;
  }
  if (lines.empty()) throw AnalysisError("no transition near the Larmor frequency");
  if (lines.size() == 1) return 0.0;
  return std::abs(lines[0] - lines[1]);
}

std::array<double, 4> closed_form_theta0(double w) { return sorted({0.0, 1.0 - w, 2.0 * w, -(1.0 + w)}); }

std::array<double, 4> closed_form_theta_half_pi(double w) {
  const double r = std::sqrt(9.0 * w * w + 4.0);
  return sorted({0.0, -w, 0.5 * (w - r), 0.5 * (w + r)});
}

std::array<double, 4> closed_form_theta_half_pi_small(double w) {
  return sorted({0.0, -w, 0.5 * w - 1.0, 0.5 * w + 1.0});
}

std::array<double, 4> closed_form_magic() { return {-1.0, 0.0, 0.0, 1.0}; }

Mat reference_matrix_theta0(double w) {
  Mat m{-1.0 / w + 1.0, 0, 0, 0,  0, -1, -1, 0,  0, -1, -1, 0,  0, 0, 0, 1.0 / w + 1.0};
  for (double& x : m) x *= -w;
  return m;
}

Mat reference_matrix_theta_half_pi(double w) {
  Mat m{1.0 + 2.0 / w, 0, 0, -3,  0, -1, -1, 0,  0, -1, -1, 0,  -3, 0, 0, 1.0 - 2.0 / w};
  for (double& x : m) x *= 0.5 * w;
  return m;
}

}  // namespace dipspin
