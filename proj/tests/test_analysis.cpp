#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dipspin/analysis.hpp"
#include "dipspin/error.hpp"

using namespace dipspin;

namespace {

constexpr double kPi = std::numbers::pi;

Trajectory lab_signal(double p_d, int n, double (*f)(double, double)) {
  Trajectory t;
  t.mode = Mode::LabFull;
  t.p_d = p_d;
  const double dt = 2.0 * kPi * p_d / 16.0;
  for (int i = 0; i < n; ++i) {
    const double time = i * dt;
    t.times.push_back(time);
    t.mean_moment.push_back({f(time, p_d), 0.0, 0.0});
  }
  return t;
}

Trajectory rotating_signal(const std::vector<double>& times, const std::vector<double>& x) {
  Trajectory t;
  t.mode = Mode::RotatingSecular;
  t.p_d = 0.01;
  t.times = times;
  for (double v : x) t.mean_moment.push_back({v, 0.0, 0.0});
  return t;
}

std::vector<double> grid(double t_end, double dt) {
  std::vector<double> t;
  for (int i = 0; i * dt <= t_end + 1e-12; ++i) t.push_back(i * dt);
  return t;
}

}  // namespace

TEST_CASE("pure Larmor tone gives one peak at 1") {
  const Trajectory t = lab_signal(0.01, 4096, [](double time, double p) { return std::cos(time / p); });
  const Spectrum s = spectrum(t);
  REQUIRE(s.peaks.size() == 1);
  CHECK(s.peaks[0].freq == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(s.peaks[0].width > 0.0);
  CHECK_FALSE(peak_split(s).has_value());
}

TEST_CASE("two tones split by 2 p_d about 1") {
  const Trajectory t = lab_signal(0.01, 4096, [](double time, double p) {
    return 0.5 * std::cos((1 + p) * time / p) + 0.5 * std::cos((1 - p) * time / p);
  });
  const Spectrum s = spectrum(t);
  const auto split = peak_split(s);
  REQUIRE(split.has_value());
  CHECK(*split == doctest::Approx(0.02).epsilon(0.02));
}

TEST_CASE("peak split ignores uniform rescaling") {
  const Trajectory t = lab_signal(0.01, 4096, [](double time, double p) {
    return 0.7 * std::cos((1 + p) * time / p) + 0.3 * std::cos((1 - 2 * p) * time / p);
  });
  Spectrum s = spectrum(t);
  const auto before = peak_split(s);
  for (double& a : s.amps) a *= 17.0;
  for (Peak& p : s.peaks) p.height *= 17.0;
  CHECK(peak_split(s) == before);
  Spectrum rescaled = spectrum_of(t.component(0), t.times[1] - t.times[0], Window::None, 4, 0.01);
  for (double& a : rescaled.amps) a *= 3.0;
  rescaled.peaks = detect_peaks(rescaled.freqs, rescaled.amps);
  CHECK(*peak_split(rescaled) == doctest::Approx(*before).epsilon(1e-12));
}

TEST_CASE("peak split with an empty window throws") {
  Spectrum s;
  s.freqs = {0.0, 0.1, 0.2};
  s.amps = {1.0, 0.5, 0.1};
  s.peaks = detect_peaks(s.freqs, s.amps);
  CHECK_THROWS_AS(peak_split(s), AnalysisError);
}

TEST_CASE("Parseval holds without a window") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int n : {100, 101, 256}) {
    std::vector<double> x(n);
    double energy = 0.0;
    for (double& v : x) {
      v = g(rng);
      energy += v * v;
    }
    for (int pad : {1, 3, 4}) {
      const Spectrum s = spectrum_of(x, 0.1, Window::None, pad);
      CHECK(s.parseval_energy() == doctest::Approx(energy).epsilon(1e-10));
    }
  }
}

TEST_CASE("spectrum grid is increasing and amplitudes non-negative") {
  std::vector<double> x(300);
  for (int i = 0; i < 300; ++i) x[i] = std::sin(0.3 * i) + 0.2;
  for (Window w : {Window::None, Window::Hann}) {
    const Spectrum s = spectrum_of(x, 0.05, w);
    CHECK(s.freqs.front() == 0.0);
    for (std::size_t k = 1; k < s.freqs.size(); ++k) CHECK(s.freqs[k] > s.freqs[k - 1]);
    for (double a : s.amps) CHECK(a >= 0.0);
    for (const Peak& p : s.peaks) {
      CHECK(p.freq >= s.freqs.front());
      CHECK(p.freq <= s.freqs.back());
    }
  }
}

TEST_CASE("spectrum rejects non-uniform sampling") {
  Trajectory t = rotating_signal({0.0, 0.1, 0.25, 0.3}, {1, 1, 1, 1});
  CHECK_THROWS_AS(spectrum(t), InvalidArgument);
}

TEST_CASE("half-life: linear decay crosses at 1.5") {
  const auto t = grid(6.0, 0.01);
  std::vector<double> x;
  for (double v : t) x.push_back(0.7 * std::max(0.0, 1.0 - v / 3.0));
  const auto h = half_life(rotating_signal(t, x));
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("half-life: constant signal never decays") {
  const auto t = grid(10.0, 0.01);
  const std::vector<double> x(t.size(), 0.7);
  CHECK_FALSE(half_life(rotating_signal(t, x)).has_value());
}

TEST_CASE("half-life: a dip that recovers within the hold is skipped") {
  const auto t = grid(20.0, 0.01);
  std::vector<double> env;
  for (double v : t) env.push_back(v < 1.0 ? 1.0 - 0.7 * v : (v < 3.0 ? 0.6 : 0.1));
  const auto h = half_life(t, env);
  REQUIRE(h.has_value());
  CHECK(*h == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("half-life is invariant under sign flip and rejects a zero start") {
  const auto t = grid(6.0, 0.01);
  std::vector<double> x, y;
  for (double v : t) {
    x.push_back(std::exp(-v * v));
    y.push_back(-std::exp(-v * v));
  }
  CHECK(half_life(rotating_signal(t, x)) == half_life(rotating_signal(t, y)));
  std::vector<double> zero(t.size(), 0.0);
  CHECK_THROWS_AS(half_life(rotating_signal(t, zero)), AnalysisError);
}

TEST_CASE("spectral moments of simple lines") {
  Spectrum two;
  two.freqs = {0.8, 1.0, 1.2};
  two.amps = {1.0, 0.0, 1.0};
  const SpectralMoments m = spectral_moments(two, 1.0);
  CHECK(m.m2 == doctest::Approx(0.04));
  CHECK(m.m4 == doctest::Approx(0.0016));
  CHECK(m.ratio() == doctest::Approx(1.0));

  Spectrum gauss;
  const double sigma = 0.05;
  for (int i = -4000; i <= 4000; ++i) {
    const double f = 1.0 + i * 1e-4;
    gauss.freqs.push_back(f);
    gauss.amps.push_back(std::exp(-0.5 * (f - 1.0) * (f - 1.0) / (sigma * sigma)));
  }
  const SpectralMoments g = spectral_moments(gauss, 1.0);
  CHECK(g.m2 == doctest::Approx(sigma * sigma).epsilon(1e-6));
  CHECK(g.ratio() == doctest::Approx(3.0).epsilon(1e-6));

  Spectrum empty;
  empty.freqs = {0.0, 1.0};
  empty.amps = {0.0, 0.0};
  CHECK_THROWS_AS(spectral_moments(empty, 0.0), AnalysisError);
}

TEST_CASE("Abragam function handles bt = 0") {
  CHECK(abragam(0.0, 0.7, 1.0, 2.0) == 0.7);
  CHECK(abragam(1e-12, 0.7, 1.0, 2.0) == doctest::Approx(0.7));
  CHECK(abragam(1.0, 1.0, 0.0, kPi) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("Abragam fit round trip") {
  const std::pair<double, double> cases[] = {{0.1, 0.5}, {1.0, 5.0}, {1.5, 3.0}, {0.5, 0.3}, {2.0, 1.0}};
  for (const auto& [a, b] : cases) {
    const double t_end = 10.0 / std::max(a, 0.2);
    const auto t = grid(t_end, t_end / 1000);
    std::vector<double> x;
    for (double v : t) x.push_back(abragam(v, 0.7, a, b));
    const AbragamFit fit = fit_abragam(t, x);
    CAPTURE(a);
    CAPTURE(b);
    CHECK(fit.a_param == doctest::Approx(a).epsilon(1e-2));
    CHECK(fit.b_param == doctest::Approx(b).epsilon(1e-2));
    CHECK(fit.prefactor == 0.7);
    CHECK(fit.residual < 1e-6);
  }
}

TEST_CASE("Abragam fit rejects a flat signal") {
  const auto t = grid(5.0, 0.01);
  const std::vector<double> x(t.size(), 0.7);
  CHECK_THROWS_AS(fit_abragam(t, x), AnalysisError);
}

TEST_CASE("lab-frame signal is demodulated before fitting") {
  Trajectory t;
  t.mode = Mode::LabFull;
  t.p_d = 0.01;
  const double dt = 2 * kPi * t.p_d / 16;
  for (int i = 0; i < 8000; ++i) {
    const double time = i * dt;
    const double env = abragam(time, 0.7, 1.2, 3.0);
    t.times.push_back(time);
    t.mean_moment.push_back({env * std::cos(time / t.p_d), -env * std::sin(time / t.p_d), 0.0});
  }
  const auto rot = rotating_frame_signal(t);
  for (std::size_t i = 0; i < rot.size(); i += 97) CHECK(rot[i] == doctest::Approx(abragam(t.times[i], 0.7, 1.2, 3.0)).epsilon(1e-9));
  const AbragamFit fit = fit_abragam(t);
  CHECK(fit.b_param / fit.a_param == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("interpolation, echo width and tail difference") {
  const auto t = grid(20.0, 0.01);
  std::vector<double> env;
  for (double v : t) env.push_back(std::exp(-(v - 10.0) * (v - 10.0) / 2.0));
  CHECK(value_at(t, env, 10.0) == doctest::Approx(1.0));
  CHECK(value_at(t, env, -1.0) == env.front());
  const auto w = echo_width(t, env, 10.0);
  REQUIRE(w.has_value());
  CHECK(*w == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-4));

  std::vector<double> shifted(env);
  for (double& v : shifted) v += 0.1;
  CHECK(rms_difference(t, env, shifted, 5.0) == doctest::Approx(0.1));
}

TEST_CASE("physical units") {
  CHECK(to_physical_time(1.0, 2.5, kProtonGamma) == doctest::Approx(1.4953e-5).epsilon(1e-4));
  CHECK(to_physical_time(1.0, 1.25, kProtonGamma) == doctest::Approx(2.0 * to_physical_time(1.0, 2.5, kProtonGamma)));
  CHECK(to_physical_time(0.0, 2.5, kProtonGamma) == 0.0);
  CHECK_THROWS_AS(to_physical_time(1.0, 0.0, kProtonGamma), InvalidArgument);
  CHECK_THROWS_AS(to_physical_time(1.0, 2.5, -1.0), InvalidArgument);
  CHECK(dipolar_linewidth_hz(2.5, kProtonGamma) == doctest::Approx(10643.5).epsilon(1e-4));
}

TEST_CASE("dominant period of periodic and aperiodic series") {
  const auto t = grid(60.0, 0.01);
  std::vector<double> x, flat, decay;
  for (double v : t) {
    x.push_back(std::abs(std::cos(v / 2.0)) + 0.3 * std::cos(v));
    flat.push_back(1.0);
    decay.push_back(std::exp(-v));
  }
  const auto p = dominant_period(t, x);
  REQUIRE(p.has_value());
  CHECK(*p == doctest::Approx(2.0 * kPi).epsilon(5e-3));
  CHECK_FALSE(dominant_period(t, flat).has_value());
}
