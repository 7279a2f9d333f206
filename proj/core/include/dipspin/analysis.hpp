#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dipspin/dynamics.hpp"

namespace dipspin {

enum class Window { None, Hann };

struct Peak {
  double freq = 0.0;
  double height = 0.0;
  double width = 0.0;  ///< Full width at half height; 0 if not resolvable.
};

/// Positive-frequency magnitude spectrum of e^x(t).
///
/// Frequencies are w/w0 for lab-frame trajectories (Larmor at 1) and offsets
/// in units of w_d for rotating-frame ones. `amps` are raw DFT magnitudes of
/// the windowed, zero-padded series, so `parseval_energy()` equals sum x_n^2
/// when no window is applied.
struct Spectrum {
  std::vector<double> freqs;
  std::vector<double> amps;
  std::vector<Peak> peaks;
  std::size_t n_fft = 0;

  double parseval_energy() const;
};

/// Local maxima above `threshold` x global maximum, refined by a parabola
/// through the three bins around each maximum.
///
/// With `resolution` > 0 (the unpadded bin width 2 pi / T) a maximum is also
/// dropped when it sits under the rectangular-window sidelobe envelope
/// 1.2 H / (pi |df| / resolution) of a higher peak H. Unwindowed spectra of
/// undamped lines otherwise report their sidelobes as lines.
std::vector<Peak> detect_peaks(const std::vector<double>& freqs, const std::vector<double>& amps,
                               double threshold = 0.05, double resolution = 0.0);

/// Spectrum of a uniformly sampled series (frequencies in radians per unit time).
Spectrum spectrum_of(const std::vector<double>& samples, double dt, Window window = Window::None,
                     int zero_pad = 4, double freq_scale = 1.0);

Spectrum spectrum(const Trajectory& traj, Window window = Window::None, int zero_pad = 4);

/// e^x seen from the frame rotating at the Larmor frequency. Lab-frame
/// series are demodulated; rotating-frame ones are returned as is.
std::vector<double> rotating_frame_signal(const Trajectory& traj);

/// sqrt(e_x^2 + e_y^2): identical in the lab and rotating frames.
std::vector<double> transverse_envelope(const Trajectory& traj);

/// First time the envelope falls below half its initial value and stays
/// below for `hold` (default one w_d period, 2 pi). nullopt if never.
std::optional<double> half_life(const Trajectory& traj, double hold = 6.283185307179586);
std::optional<double> half_life(const std::vector<double>& times, const std::vector<double>& envelope,
                                double hold = 6.283185307179586);

/// Linear interpolation of y(t); clamps outside the sampled range.
double value_at(const std::vector<double>& times, const std::vector<double>& y, double t);

/// Full width at half maximum of the envelope bump whose maximum lies
/// within `search` of `t_center`. nullopt if either half-height crossing
/// falls outside the record.
std::optional<double> echo_width(const std::vector<double>& times, const std::vector<double>& envelope,
                                 double t_center, double search = 1.0);

/// RMS of a - b over samples with t >= t_from (same time grid assumed).
double rms_difference(const std::vector<double>& times, const std::vector<double>& a,
                      const std::vector<double>& b, double t_from);

/// Period of the strongest repetition in a uniformly sampled series: the
/// first autocorrelation maximum after the first zero crossing that reaches
/// 90% of the largest later value, refined by a parabola. nullopt if the autocorrelation never turns negative.
std::optional<double> dominant_period(const std::vector<double>& times, const std::vector<double>& y);

struct SpectralMoments {
  double m2 = 0.0;
  double m4 = 0.0;
  double ratio() const { return m4 / (m2 * m2); }
};
SpectralMoments spectral_moments(const Spectrum& spec, double center);

/// f(t) = f0 exp(-a^2 t^2 / 2) sin(bt)/(bt).
double abragam(double t, double f0, double a, double b);

struct AbragamFit {
  double a_param = 0.0;
  double b_param = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  ///< RMS misfit over the fit window.
  int iterations = 0;
  bool converged = false;
};

/// Least-squares fit of the rotating-frame e^x(t) for t <= t_max by a Nelder-Mead search
/// seeded from a coarse logarithmic grid. The prefactor is e^x(0).
AbragamFit fit_abragam(const Trajectory& traj, double t_max = 1e300);
AbragamFit fit_abragam(const std::vector<double>& times, const std::vector<double>& signal,
                       double t_max = 1e300);

/// Distance between the two highest peaks inside (lo, hi); nullopt if only one.
/// Throws AnalysisError when the window holds no peak.
std::optional<double> peak_split(const Spectrum& spec, double lo = 0.5, double hi = 1.5);

/// t = t_reduced / (gamma H_d), H_d in gauss, gamma in rad s^-1 G^-1.
double to_physical_time(double t_reduced, double h_d_gauss, double gamma);

/// Frequency spread gamma H_d / 2 pi in Hz.
double dipolar_linewidth_hz(double h_d_gauss, double gamma);

inline constexpr double kProtonGamma = 2.675e4;  // rad s^-1 G^-1

}  // namespace dipspin
