#include "dipspin/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>

#include "dipspin/error.hpp"

namespace dipspin {

namespace {

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwDeleter> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwDeleter>(p);
}

double interpolate_crossing(double t0, double v0, double t1, double v1, double level) {
  if (v1 == v0) return t1;
  return t0 + (level - v0) * (t1 - t0) / (v1 - v0);
}

}  // namespace

double Spectrum::parseval_energy() const {
  if (n_fft == 0 || amps.empty()) return 0.0;
  double sum = amps[0] * amps[0];
  const std::size_t last = amps.size() - 1;
  for (std::size_t k = 1; k < amps.size(); ++k) {
    const bool nyquist = (n_fft % 2 == 0) && k == last;
    sum += (nyquist ? 1.0 : 2.0) * amps[k] * amps[k];
  }
  return sum / static_cast<double>(n_fft);
}

std::vector<Peak> detect_peaks(const std::vector<double>& freqs, const std::vector<double>& amps,
                               double threshold, double resolution) {
  std::vector<Peak> peaks;
  const std::size_t n = amps.size();
  if (n < 2) return peaks;
  const double top = *std::max_element(amps.begin(), amps.end());
  if (!(top > 0.0)) return peaks;
  const double floor = threshold * top;
  const double df = freqs[1] - freqs[0];

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double left = i == 0 ? amps[1] : amps[i - 1];  // spectrum of a real signal is even
    const double mid = amps[i];
    const double right = amps[i + 1];
    if (!(mid > left && mid >= right && mid > floor)) continue;

    double delta = 0.0;
    const double denom = left - 2.0 * mid + right;
    if (denom != 0.0) delta = std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
    Peak p;
    p.freq = std::max(0.0, freqs[i] + delta * df);
    p.height = mid - 0.25 * (left - right) * delta;

    const double half = 0.5 * p.height;
    std::optional<double> lo, hi;
    for (std::size_t j = i; j + 1 < n; ++j) {
      if (amps[j + 1] < half) {
        hi = interpolate_crossing(freqs[j], amps[j], freqs[j + 1], amps[j + 1], half);
        break;
      }
    }
    for (std::size_t j = i; j > 0; --j) {
      if (amps[j - 1] < half) {
        lo = interpolate_crossing(freqs[j], amps[j], freqs[j - 1], amps[j - 1], half);
        break;
      }
    }
    if (lo && hi) {
      p.width = *hi - *lo;
    } else if (hi && i == 0) {
      p.width = 2.0 * *hi;
    }
    peaks.push_back(p);
  }
  if (resolution <= 0.0 || peaks.size() < 2) return peaks;

  std::vector<Peak> kept;
  for (const Peak& p : peaks) {
    bool sidelobe = false;
    for (const Peak& q : peaks) {
      if (q.height <= p.height) continue;
      const double bins = std::abs(p.freq - q.freq) / resolution;
      if (bins > 0.0 && p.height < 1.2 * q.height / (std::numbers::pi * bins)) {
        sidelobe = true;
        break;
      }
    }
    if (!sidelobe) kept.push_back(p);
  }
  return kept;
}

Spectrum spectrum_of(const std::vector<double>& samples, double dt, Window window, int zero_pad,
                     double freq_scale) {
  if (samples.size() < 2) throw InvalidArgument("spectrum needs at least two samples");
  if (!(dt > 0.0)) throw InvalidArgument("sample spacing must be positive");
  if (zero_pad < 1) throw InvalidArgument("zero padding factor must be >= 1");

  const std::size_t n = samples.size();
  const std::size_t m = n * static_cast<std::size_t>(zero_pad);
  const std::size_t bins = m / 2 + 1;
  auto in = fftw_buffer<double>(m);
  auto out = fftw_buffer<fftw_complex>(bins);

  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::Hann) {
      w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    in[i] = w * samples[i];
  }
  std::fill(in.get() + n, in.get() + m, 0.0);

  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Spectrum spec;
  spec.n_fft = m;
  spec.freqs.resize(bins);
  spec.amps.resize(bins);
  const double dw = 2.0 * std::numbers::pi / (static_cast<double>(m) * dt) * freq_scale;
  for (std::size_t k = 0; k < bins; ++k) {
    spec.freqs[k] = static_cast<double>(k) * dw;
    spec.amps[k] = std::hypot(out[k][0], out[k][1]);
  }
  const double resolution = window == Window::None ? dw * zero_pad : 0.0;
  spec.peaks = detect_peaks(spec.freqs, spec.amps, 0.05, resolution);
  return spec;
}

Spectrum spectrum(const Trajectory& traj, Window window, int zero_pad) {
  if (traj.size() < 2) throw InvalidArgument("trajectory too short for a spectrum");
  const double dt = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double step = traj.times[i] - traj.times[i - 1];
    if (std::abs(step - dt) > 1e-6 * dt) throw InvalidArgument("trajectory is not uniformly sampled");
  }
  const double scale = traj.mode == Mode::LabFull ? traj.p_d : 1.0;
  return spectrum_of(traj.component(0), dt, window, zero_pad, scale);
}

std::vector<double> rotating_frame_signal(const Trajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.size());
  if (traj.mode != Mode::LabFull) {
    for (const Vec3& m : traj.mean_moment) out.push_back(m.x);
    return out;
  }
  const double w = traj.gamma_sign / traj.p_d;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double phase = w * traj.times[i];
    const Vec3& m = traj.mean_moment[i];
    out.push_back(m.x * std::cos(phase) - m.y * std::sin(phase));
  }
  return out;
}

std::vector<double> transverse_envelope(const Trajectory& traj) {
  std::vector<double> env;
  env.reserve(traj.size());
  for (const Vec3& m : traj.mean_moment) env.push_back(std::hypot(m.x, m.y));
  return env;
}

std::optional<double> half_life(const std::vector<double>& times, const std::vector<double>& envelope,
                                double hold) {
  if (times.size() != envelope.size() || times.empty()) {
    throw InvalidArgument("times and envelope must be non-empty and equally long");
  }
  const double e0 = std::abs(envelope[0]);
  if (e0 == 0.0) throw AnalysisError("half-life of a zero initial signal is undefined");
  const double level = 0.5 * e0;

  std::size_t i = 1;
  while (i < times.size()) {
    if (std::abs(envelope[i]) >= level) {
      ++i;
      continue;
    }
    const double crossing =
        interpolate_crossing(times[i - 1], std::abs(envelope[i - 1]), times[i], std::abs(envelope[i]), level);
    std::size_t j = i;
    bool stays = true;
    for (; j < times.size() && times[j] <= crossing + hold; ++j) {
      if (std::abs(envelope[j]) >= level) {
        stays = false;
        break;
      }
    }
    if (stays) return crossing;
    i = j + 1;
  }
  return std::nullopt;
}

std::optional<double> half_life(const Trajectory& traj, double hold) {
  return half_life(traj.times, transverse_envelope(traj), hold);
}

double value_at(const std::vector<double>& times, const std::vector<double>& y, double t) {
  if (times.empty() || times.size() != y.size()) throw InvalidArgument("times and values must match");
  if (t <= times.front()) return y.front();
  if (t >= times.back()) return y.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * y[lo] + w * y[hi];
}

std::optional<double> echo_width(const std::vector<double>& times, const std::vector<double>& envelope,
                                 double t_center, double search) {
  if (times.empty() || times.size() != envelope.size()) throw InvalidArgument("times and values must match");
  std::optional<std::size_t> peak;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - t_center) > search) continue;
    if (!peak || envelope[i] > envelope[*peak]) peak = i;
  }
  if (!peak) throw AnalysisError("no samples near the requested echo time");
  const double half = 0.5 * envelope[*peak];

  std::optional<double> right;
  for (std::size_t j = *peak; j + 1 < times.size(); ++j) {
    if (envelope[j + 1] < half) {
      right = interpolate_crossing(times[j], envelope[j], times[j + 1], envelope[j + 1], half);
      break;
    }
  }
  std::optional<double> left;
  for (std::size_t j = *peak; j > 0; --j) {
    if (envelope[j - 1] < half) {
      left = interpolate_crossing(times[j], envelope[j], times[j - 1], envelope[j - 1], half);
      break;
    }
  }
  if (!left || !right) return std::nullopt;
  return *right - *left;
}

double rms_difference(const std::vector<double>& times, const std::vector<double>& a,
                      const std::vector<double>& b, double t_from) {
  if (a.size() != times.size() || b.size() != times.size()) throw InvalidArgument("series lengths differ");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_from) continue;
    sum += (a[i] - b[i]) * (a[i] - b[i]);
    ++n;
  }
  if (n == 0) throw AnalysisError("no samples after the requested start time");
  return std::sqrt(sum / static_cast<double>(n));
}

std::optional<double> dominant_period(const std::vector<double>& times, const std::vector<double>& y) {
  if (times.size() != y.size() || times.size() < 8) throw InvalidArgument("period needs at least eight samples");
  const std::size_t n = y.size();
  const double dt = times[1] - times[0];
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - mean;

  // Unbiased estimate so late lags are not penalised by the shrinking overlap.
  const std::size_t max_lag = n / 2;
  std::vector<double> r(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += d[i] * d[i + lag];
    r[lag] = s / static_cast<double>(n - lag);
  }
  if (!(r[0] > 0.0)) return std::nullopt;

  std::size_t start = 1;
  while (start <= max_lag && r[start] > 0.0) ++start;
  if (start > max_lag) return std::nullopt;

  double top = 0.0;
  for (std::size_t lag = start; lag < max_lag; ++lag) top = std::max(top, r[lag]);
  if (!(top > 0.0)) return std::nullopt;
  // Multiples of the period score almost as high; take the first maximum near the top.
  std::size_t best = 0;
  for (std::size_t lag = start + 1; lag < max_lag; ++lag) {
    if (r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] >= 0.9 * top) {
      best = lag;
      break;
    }
  }
  if (best == 0) return std::nullopt;

  double delta = 0.0;
  const double denom = r[best - 1] - 2.0 * r[best] + r[best + 1];
  if (denom != 0.0) delta = std::clamp(0.5 * (r[best - 1] - r[best + 1]) / denom, -0.5, 0.5);
  return (static_cast<double>(best) + delta) * dt;
}

SpectralMoments spectral_moments(const Spectrum& spec, double center) {
  double total = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t k = 0; k < spec.amps.size(); ++k) {
    const double d = spec.freqs[k] - center;
    const double d2 = d * d;
    total += spec.amps[k];
    m2 += d2 * spec.amps[k];
    m4 += d2 * d2 * spec.amps[k];
  }
  if (!(total > 0.0)) throw AnalysisError("moments of an all-zero spectrum are undefined");
  return {m2 / total, m4 / total};
}

double abragam(double t, double f0, double a, double b) {
  const double bt = b * t;
  const double sinc = std::abs(bt) < 1e-8 ? 1.0 - bt * bt / 6.0 : std::sin(bt) / bt;
  return f0 * std::exp(-0.5 * a * a * t * t) * sinc;
}

namespace {

using Point = std::array<double, 2>;

struct NelderMeadResult {
  Point x;
  double f;
  int iterations;
  bool converged;
};

template <class F>
NelderMeadResult nelder_mead(F&& f, Point start, double step, int max_iter) {
  std::array<Point, 3> s{start, start, start};
  s[1][0] += step;
  s[2][1] += step;
  std::array<double, 3> fs{f(s[0]), f(s[1]), f(s[2])};

  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    const Point best = s[idx[0]], mid = s[idx[1]], worst = s[idx[2]];
    const double fb = fs[idx[0]], fm = fs[idx[1]], fw = fs[idx[2]];

    const double size = std::max({std::abs(mid[0] - best[0]), std::abs(mid[1] - best[1]),
                                  std::abs(worst[0] - best[0]), std::abs(worst[1] - best[1])});
    if (size < 1e-10 || (fw - fb) <= 1e-15 * (std::abs(fb) + 1e-300)) {
      converged = true;
      break;
    }

    const Point centroid{0.5 * (best[0] + mid[0]), 0.5 * (best[1] + mid[1])};
    auto along = [&](double t) {
      return Point{centroid[0] + t * (worst[0] - centroid[0]), centroid[1] + t * (worst[1] - centroid[1])};
    };
    const Point xr = along(-1.0);
    const double fr = f(xr);
    if (fr < fb) {
      const Point xe = along(-2.0);
      const double fe = f(xe);
      s[idx[2]] = fe < fr ? xe : xr;
      fs[idx[2]] = std::min(fe, fr);
    } else if (fr < fm) {
      s[idx[2]] = xr;
      fs[idx[2]] = fr;
    } else {
      const bool outside = fr < fw;
      const Point xc = along(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fw)) {
        s[idx[2]] = xc;
        fs[idx[2]] = fc;
      } else {
        for (int i : {idx[1], idx[2]}) {
          s[i] = Point{best[0] + 0.5 * (s[i][0] - best[0]), best[1] + 0.5 * (s[i][1] - best[1])};
          fs[i] = f(s[i]);
        }
      }
    }
  }
  const int b = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  return {s[b], fs[b], it, converged};
}

}  // namespace

AbragamFit fit_abragam(const std::vector<double>& times, const std::vector<double>& signal, double t_max) {
  if (times.size() != signal.size() || times.size() < 4) {
    throw InvalidArgument("fit needs at least four samples");
  }
  std::vector<double> t, y;
  for (std::size_t i = 0; i < times.size() && times[i] <= t_max; ++i) {
    t.push_back(times[i]);
    y.push_back(signal[i]);
  }
  if (t.size() < 4) throw InvalidArgument("fit window holds fewer than four samples");
  const double f0 = y[0];
  if (f0 == 0.0) throw AnalysisError("cannot fit a signal that starts at zero");
  double spread = 0.0;
  for (double v : y) spread = std::max(spread, std::abs(v - f0));
  if (spread < 0.05 * std::abs(f0)) throw AnalysisError("signal shows no decay to fit");

  auto rms = [&](const Point& p) {
    const double a = std::exp(p[0]);
    const double b = std::exp(p[1]);
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double r = abragam(t[i], f0, a, b) - y[i];
      s += r * r;
    }
    return std::sqrt(s / static_cast<double>(t.size()));
  };

  const double span = t.back() - t.front();
  const double dt = t[1] - t[0];
  const double lo = std::log(0.01 / span);
  const double hi = std::log(std::min(1000.0 / span, std::numbers::pi / dt));
  constexpr int kGrid = 40;
  Point seed{lo, lo};
  double seed_f = rms(seed);
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const Point p{lo + (hi - lo) * i / (kGrid - 1), lo + (hi - lo) * j / (kGrid - 1)};
      const double v = rms(p);
      if (v < seed_f) {
        seed = p;
        seed_f = v;
      }
    }
  }

  NelderMeadResult r = nelder_mead(rms, seed, 0.1, 4000);
  // Restart from the optimum to escape a collapsed simplex.
  const NelderMeadResult polish = nelder_mead(rms, r.x, 0.02, 4000);
  const int iterations = r.iterations + polish.iterations;
  if (polish.f <= r.f) r = polish;

  AbragamFit fit;
  fit.a_param = std::exp(r.x[0]);
  fit.b_param = std::exp(r.x[1]);
  fit.prefactor = f0;
  fit.residual = r.f;
  fit.iterations = iterations;
  fit.converged = polish.converged;
  return fit;
}

AbragamFit fit_abragam(const Trajectory& traj, double t_max) {
  return fit_abragam(traj.times, rotating_frame_signal(traj), t_max);
}

std::optional<double> peak_split(const Spectrum& spec, double lo, double hi) {
  std::vector<Peak> inside;
  for (const Peak& p : spec.peaks) {
    if (p.freq > lo && p.freq < hi) inside.push_back(p);
  }
  if (inside.empty()) throw AnalysisError("no spectral peak inside the splitting window");
  if (inside.size() == 1) return std::nullopt;
  std::partial_sort(inside.begin(), inside.begin() + 2, inside.end(),
                    [](const Peak& a, const Peak& b) { return a.height > b.height; });
  return std::abs(inside[0].freq - inside[1].freq);
}

double to_physical_time(double t_reduced, double h_d_gauss, double gamma) {
  if (!(h_d_gauss > 0.0) || !(gamma > 0.0)) {
    throw InvalidArgument("H_d and gamma must be positive");
  }
  return t_reduced / (gamma * h_d_gauss);
}

double dipolar_linewidth_hz(double h_d_gauss, double gamma) {
  if (!(h_d_gauss > 0.0) || !(gamma > 0.0)) {
    throw InvalidArgument("H_d and gamma must be positive");
  }
  return gamma * h_d_gauss / (2.0 * std::numbers::pi);
}

}  // namespace dipspin
