#include "dipspin/runner.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dipspin/error.hpp"
#include "dipspin/experiments.hpp"
#include "dipspin/oracle.hpp"

namespace dipspin {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> config_comments(const RunConfig& cfg) {
  std::vector<std::string> out;
  std::istringstream in(to_text(cfg));
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }

std::string peak_list(const Spectrum& spec) {
  std::string s;
  for (std::size_t i = 0; i < spec.peaks.size(); ++i) {
    if (i) s += ' ';
    s += format_double(spec.peaks[i].freq);
  }
  return s.empty() ? "none" : s;
}

void add_run_stats(Summary& s, const Trajectory& traj) {
  double drift = 0.0;
  for (double d : traj.max_norm_drift) drift = std::max(drift, d);
  s.emplace_back("samples", std::to_string(traj.size()));
  s.emplace_back("steps", std::to_string(traj.steps));
  s.emplace_back("rhs_evaluations", std::to_string(traj.rhs_evaluations));
  s.emplace_back("max_norm_drift", format_double(drift));
  s.emplace_back("energy_drift", format_double(traj.energy.back() - traj.energy.front()));
  s.emplace_back("total_ez_drift", format_double(traj.total_ez.back() - traj.total_ez.front()));
}

void add_decay(Summary& s, const RunConfig& cfg, const Trajectory& traj) {
  s.emplace_back("e_x0", format_double(traj.mean_moment.front().x));
  s.emplace_back("half_life", opt(half_life(traj)));
  try {
    const AbragamFit fit = fit_abragam(traj, cfg.fit_t_max > 0.0 ? cfg.fit_t_max : 1e300);
    s.emplace_back("fit_a", format_double(fit.a_param));
    s.emplace_back("fit_b", format_double(fit.b_param));
    s.emplace_back("fit_b_over_a", format_double(fit.b_param / fit.a_param));
    s.emplace_back("fit_residual", format_double(fit.residual));
    s.emplace_back("fit_converged", fit.converged ? "true" : "false");
  } catch (const AnalysisError& e) {
    s.emplace_back("fit", std::string("failed: ") + e.what());
  }
}

void add_spectrum(Summary& s, const Spectrum& spec, const Trajectory& traj) {
  const bool lab = traj.mode == Mode::LabFull;
  s.emplace_back("spectrum_peaks", peak_list(spec));
  try {
    const SpectralMoments m = spectral_moments(spec, lab ? 1.0 : 0.0);
    s.emplace_back("moment_m2", format_double(m.m2));
    s.emplace_back("moment_m4", format_double(m.m4));
    s.emplace_back("moment_ratio", format_double(m.ratio()));
  } catch (const AnalysisError& e) {
    s.emplace_back("moments", std::string("failed: ") + e.what());
  }
  if (lab) {
    try {
      s.emplace_back("peak_split", opt(peak_split(spec)));
    } catch (const AnalysisError& e) {
      s.emplace_back("peak_split", std::string("failed: ") + e.what());
    }
  }
}

void add_units(Summary& s, const RunConfig& cfg) {
  s.emplace_back("seconds_per_unit_time", format_double(to_physical_time(1.0, cfg.h_d_gauss, cfg.gamma)));
  s.emplace_back("dipolar_linewidth_hz", format_double(dipolar_linewidth_hz(cfg.h_d_gauss, cfg.gamma)));
}

class Writer {
 public:
  explicit Writer(const RunConfig& cfg) : dir_(cfg.out_dir), comments_(config_comments(cfg)) {
    fs::create_directories(dir_);
  }

  void table(const std::string& name, Table t) {
    t.comments = comments_;
    save(name, write_table(t));
  }
  void summary(const Summary& s) { save("summary.txt", write_summary(s)); }
  std::vector<fs::path> files() const { return files_; }

 private:
  void save(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    save_text(p, text);
    files_.push_back(p);
  }
  fs::path dir_;
  std::vector<std::string> comments_;
  std::vector<fs::path> files_;
};

Summary single_run(const RunConfig& cfg, const Trajectory& traj, Writer& out) {
  Summary s;
  s.emplace_back("experiment", std::string(to_string(cfg.experiment)));
  s.emplace_back("mode", std::string(to_string(traj.mode)));
  const Spectrum spec = spectrum(traj, cfg.window, cfg.zero_pad);
  out.table("trajectory.tsv", trajectory_table(traj));
  out.table("spectrum.tsv", spectrum_table(spec));
  add_decay(s, cfg, traj);
  add_spectrum(s, spec, traj);
  return s;
}

RunOutput run_fid_config(const RunConfig& cfg) {
  FidParams p;
  p.dims = cfg.dims;
  p.periodic = cfg.periodic;
  p.p_d = cfg.p_d;
  p.mode = cfg.mode;
  p.init = cfg.init;
  p.t_end = cfg.t_end;
  p.run = cfg.run;
  const Trajectory traj = run_fid(p);

  Writer out(cfg);
  Summary s = single_run(cfg, traj, out);
  add_units(s, cfg);
  add_run_stats(s, traj);
  out.summary(s);
  return {out.files(), s};
}

RunOutput run_echo_config(const RunConfig& cfg) {
  EchoParams p;
  p.dims = cfg.dims;
  p.periodic = cfg.periodic;
  p.p_d = cfg.p_d;
  p.init = cfg.init;
  p.tau = cfg.tau;
  p.k = cfg.k;
  p.t_end = cfg.t_end;
  p.run = cfg.run;
  const Trajectory traj = run_echo(p);

  Writer out(cfg);
  Summary s = single_run(cfg, traj, out);
  const double t_echo = cfg.tau + cfg.tau / cfg.k;
  const auto env = transverse_envelope(traj);
  s.emplace_back("echo_time", format_double(t_echo));
  s.emplace_back("echo_recovery", format_double(value_at(traj.times, env, t_echo) / env.front()));
  s.emplace_back("echo_width", opt(echo_width(traj.times, env, t_echo)));
  add_run_stats(s, traj);
  out.summary(s);
  return {out.files(), s};
}

RunOutput run_pake_config(const RunConfig& cfg) {
  PakeParams p;
  p.n_spins = cfg.n_spins;
  p.theta = cfg.theta;
  p.p_d = cfg.p_d;
  p.mode = cfg.mode;
  p.init = cfg.init;
  p.t_end = cfg.t_end;
  p.run = cfg.run;
  const Trajectory traj = run_pake(p);

  Writer out(cfg);
  Summary s = single_run(cfg, traj, out);
  if (cfg.n_spins == 2) {
    const double predicted = predicted_splitting(cfg.theta, cfg.p_d);
    s.emplace_back("oracle_splitting", format_double(predicted));
  }
  add_run_stats(s, traj);
  out.summary(s);
  return {out.files(), s};
}

RunOutput run_scaling_config(const RunConfig& cfg) {
  ScalingParams p;
  p.counts = cfg.counts;
  p.p_d = cfg.p_d;
  p.mode = cfg.mode;
  p.init = cfg.init;
  p.t_end = cfg.t_end;
  p.run = cfg.run;
  const std::vector<Trajectory> trajs = run_scaling(p);

  Writer out(cfg);
  Summary s;
  s.emplace_back("experiment", "scaling");
  std::vector<double> previous;
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const std::string n = std::to_string(cfg.counts[i]);
    out.table("trajectory_" + n + ".tsv", trajectory_table(trajs[i]));
    out.table("spectrum_" + n + ".tsv", spectrum_table(spectrum(trajs[i], cfg.window, cfg.zero_pad)));
    const auto env = transverse_envelope(trajs[i]);
    s.emplace_back("half_life_" + n, opt(half_life(trajs[i])));
    if (!previous.empty() && previous.size() == env.size()) {
      const double tail = rms_difference(trajs[i].times, previous, env, 0.5 * cfg.t_end);
      s.emplace_back("tail_rms_vs_previous_" + n, format_double(tail));
    }
    previous = env;
  }
  out.summary(s);
  return {out.files(), s};
}

RunOutput run_oracle_config(const RunConfig& cfg) {
  Table t;
  t.columns = {"theta", "E1", "E2", "E3", "E4", "splitting"};
  for (int i = 0; i < cfg.theta_steps; ++i) {
    const double theta = 0.5 * std::numbers::pi * i / (cfg.theta_steps - 1);
    const auto e = eigenvalues(build_hamiltonian(theta, cfg.omega_d));
    t.add_row({theta, e[0], e[1], e[2], e[3], predicted_splitting(theta, cfg.omega_d)});
  }

  auto max_dev = [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double d = 0.0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  auto matrix_dev = [](const std::array<double, 16>& a, const std::array<double, 16>& b) {
    double d = 0.0;
    for (int i = 0; i < 16; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  const double w = cfg.omega_d;
  const auto h0 = build_hamiltonian(0.0, w);
  const auto h90 = build_hamiltonian(0.5 * std::numbers::pi, w);
  const auto hm = build_hamiltonian(magic_angle(), w);

  Summary s;
  s.emplace_back("experiment", "oracle");
  s.emplace_back("omega_d", format_double(w));
  s.emplace_back("eigen_dev_theta0", format_double(max_dev(eigenvalues(h0), closed_form_theta0(w))));
  s.emplace_back("eigen_dev_theta90", format_double(max_dev(eigenvalues(h90), closed_form_theta_half_pi(w))));
  s.emplace_back("eigen_dev_theta90_first_order",
                 format_double(max_dev(eigenvalues(h90), closed_form_theta_half_pi_small(w))));
  s.emplace_back("eigen_dev_magic", format_double(max_dev(eigenvalues(hm), closed_form_magic())));
  s.emplace_back("matrix_dev_theta0_reference", format_double(matrix_dev(h0.matrix, reference_matrix_theta0(w))));
  s.emplace_back("matrix_dev_theta90_reference",
                 format_double(matrix_dev(h90.matrix, reference_matrix_theta_half_pi(w))));
  s.emplace_back("splitting_theta0", format_double(predicted_splitting(0.0, w)));
  s.emplace_back("splitting_theta90", format_double(predicted_splitting(0.5 * std::numbers::pi, w)));
  s.emplace_back("splitting_magic", format_double(predicted_splitting(magic_angle(), w)));

  Writer out(cfg);
  out.table("oracle.tsv", t);
  out.summary(s);
  return {out.files(), s};
}

}  // namespace

Table trajectory_table(const Trajectory& traj, std::vector<std::string> comments) {
  Table t;
  t.comments = std::move(comments);
  t.columns = {"t", "e_x", "e_y", "e_z", "energy", "total_ez", "max_norm_drift"};
  t.rows.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec3& m = traj.mean_moment[i];
    t.rows.push_back({traj.times[i], m.x, m.y, m.z, traj.energy[i], traj.total_ez[i], traj.max_norm_drift[i]});
  }
  return t;
}

Table spectrum_table(const Spectrum& spec, std::vector<std::string> comments) {
  Table t;
  t.comments = std::move(comments);
  t.columns = {"omega", "amplitude"};
  t.rows.reserve(spec.freqs.size());
  for (std::size_t k = 0; k < spec.freqs.size(); ++k) t.rows.push_back({spec.freqs[k], spec.amps[k]});
  return t;
}

RunOutput run(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.experiment) {
    case Experiment::Fid: return run_fid_config(cfg);
    case Experiment::Echo: return run_echo_config(cfg);
    case Experiment::Pake: return run_pake_config(cfg);
    case Experiment::Scaling: return run_scaling_config(cfg);
    case Experiment::Oracle: return run_oracle_config(cfg);
  }
  throw InvalidArgument("unknown experiment");
}

}  // namespace dipspin
