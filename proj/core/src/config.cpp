#include "dipspin/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "dipspin/error.hpp"

namespace dipspin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == ',' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != ',' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(const std::string& key, std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key, "expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

long long to_int(const std::string& key, std::string_view v) {
  if (v.size() > 1 && v.front() == '+') v.remove_prefix(1);
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'");
  }
  return x;
}

int to_int32(const std::string& key, std::string_view v) {
  const long long x = to_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& key, std::string_view v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected an unsigned integer, got '" + std::string(v) + "'");
  }
  return x;
}

bool to_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'");
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"experiment",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.experiment = wrap(k, [&] { return parse_experiment(v); });
       }},
      {"nx", [](RunConfig& c, const std::string& k, std::string_view v) { c.dims[0] = to_int32(k, v); }},
      {"ny", [](RunConfig& c, const std::string& k, std::string_view v) { c.dims[1] = to_int32(k, v); }},
      {"nz", [](RunConfig& c, const std::string& k, std::string_view v) { c.dims[2] = to_int32(k, v); }},
      {"periodic", [](RunConfig& c, const std::string& k, std::string_view v) { c.periodic = to_bool(k, v); }},
      {"n_spins", [](RunConfig& c, const std::string& k, std::string_view v) { c.n_spins = to_int32(k, v); }},
      {"theta", [](RunConfig& c, const std::string& k, std::string_view v) { c.theta = to_double(k, v); }},
      {"theta_deg",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.theta = to_double(k, v) * std::numbers::pi / 180.0;
       }},
      {"counts",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.counts.clear();
         for (auto item : split_list(v)) c.counts.push_back(to_int32(k, item));
       }},
      {"p_d", [](RunConfig& c, const std::string& k, std::string_view v) { c.p_d = to_double(k, v); }},
      {"mode",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.mode = wrap(k, [&] { return parse_mode(v); });
       }},
      {"polarization",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.init.polarization = to_double(k, v); }},
      {"axis",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         const auto parts = split_list(v);
         if (parts.size() != 3) throw ConfigError(k, "expected three components");
         c.init.axis = {to_double(k, parts[0]), to_double(k, parts[1]), to_double(k, parts[2])};
       }},
      {"seed", [](RunConfig& c, const std::string& k, std::string_view v) { c.init.seed = to_u64(k, v); }},
      {"integrator",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         c.run.integrator = wrap(k, [&] { return parse_integrator(v); });
       }},
      {"dt", [](RunConfig& c, const std::string& k, std::string_view v) { c.run.dt = to_double(k, v); }},
      {"rtol", [](RunConfig& c, const std::string& k, std::string_view v) { c.run.rtol = to_double(k, v); }},
      {"atol", [](RunConfig& c, const std::string& k, std::string_view v) { c.run.atol = to_double(k, v); }},
      {"t_end", [](RunConfig& c, const std::string& k, std::string_view v) { c.t_end = to_double(k, v); }},
      {"sample_interval",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.run.sample_interval = to_double(k, v); }},
      {"norm_abort",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.run.norm_abort = to_double(k, v); }},
      {"tau", [](RunConfig& c, const std::string& k, std::string_view v) { c.tau = to_double(k, v); }},
      {"k", [](RunConfig& c, const std::string& k, std::string_view v) { c.k = to_double(k, v); }},
      {"hx", [](RunConfig& c, const std::string& k, std::string_view v) { c.run.h_x = to_double(k, v); }},
      {"hy", [](RunConfig& c, const std::string& k, std::string_view v) { c.run.h_y = to_double(k, v); }},
      {"exchange_nn",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.run.exchange_nn = to_double(k, v); }},
      {"gamma_sign",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.run.gamma_sign = to_int32(k, v); }},
      {"window",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         if (v == "none") {
           c.window = Window::None;
         } else if (v == "hann") {
           c.window = Window::Hann;
         } else {
           throw ConfigError(k, "expected none or hann");
         }
       }},
      {"zero_pad", [](RunConfig& c, const std::string& k, std::string_view v) { c.zero_pad = to_int32(k, v); }},
      {"fit_t_max", [](RunConfig& c, const std::string& k, std::string_view v) { c.fit_t_max = to_double(k, v); }},
      {"omega_d", [](RunConfig& c, const std::string& k, std::string_view v) { c.omega_d = to_double(k, v); }},
      {"theta_steps",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.theta_steps = to_int32(k, v); }},
      {"h_d_gauss", [](RunConfig& c, const std::string& k, std::string_view v) { c.h_d_gauss = to_double(k, v); }},
      {"gamma", [](RunConfig& c, const std::string& k, std::string_view v) { c.gamma = to_double(k, v); }},
      {"out", [](RunConfig& c, const std::string&, std::string_view v) { c.out_dir = std::string(v); }},
  };
  return table;
}

struct Entry {
  std::string key;
  std::string value;
  int line;
};

std::pair<std::string, std::string> split_assignment(std::string_view s, int line) {
  const auto eq = s.find('=');
  const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  if (eq == std::string_view::npos) {
    throw ConfigError("", where + "expected 'key = value', got '" + std::string(s) + "'");
  }
  std::string key(trim(s.substr(0, eq)));
  std::string value(trim(s.substr(eq + 1)));
  if (key.empty()) throw ConfigError("", where + "missing key");
  if (value.empty()) throw ConfigError(key, where + "missing value");
  return {key, value};
}

std::vector<Entry> tokenize(std::string_view text) {
  std::vector<Entry> out;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto [key, value] = split_assignment(line, line_no);
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(key, "repeated on lines " + std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    seen.emplace(key, line_no);
    out.push_back({std::move(key), std::move(value), line_no});
  }
  return out;
}

void apply_entry(RunConfig& cfg, const std::string& key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second(cfg, key, value);
}

RunConfig build(const std::vector<Entry>& entries, std::optional<Experiment> forced,
                const std::vector<std::string>& overrides) {
  std::optional<Experiment> exp = forced;
  for (const Entry& e : entries) {
    if (e.key != "experiment") continue;
    const Experiment named = wrap(e.key, [&] { return parse_experiment(e.value); });
    if (exp && *exp != named) {
      throw ConfigError(e.key, "config names '" + e.value + "' but '" + std::string(to_string(*exp)) +
                                   "' was requested");
    }
    exp = named;
  }
  if (!exp) throw ConfigError("experiment", "missing");

  RunConfig cfg = defaults_for(*exp);
  for (const Entry& e : entries) apply_entry(cfg, e.key, e.value);
  for (const std::string& o : overrides) {
    const auto [key, value] = split_assignment(o, 0);
    if (key == "experiment") throw ConfigError(key, "cannot be overridden");
    apply_entry(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

void require(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Fid: return "fid";
    case Experiment::Echo: return "echo";
    case Experiment::Pake: return "pake";
    case Experiment::Scaling: return "scaling";
    case Experiment::Oracle: return "oracle";
  }
  return "?";
}

Experiment parse_experiment(std::string_view s) {
  for (Experiment e : {Experiment::Fid, Experiment::Echo, Experiment::Pake, Experiment::Scaling,
                       Experiment::Oracle}) {
    if (s == to_string(e)) return e;
  }
  throw InvalidArgument("unknown experiment '" + std::string(s) + "'");
}

RunConfig defaults_for(Experiment e) {
  RunConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::Fid:
      break;
    case Experiment::Echo:
      c.init.polarization = 0.98;
      c.t_end = 0.0;  // tau + tau/k + tau
      break;
    case Experiment::Pake:
      c.mode = Mode::LabFull;
      c.init.polarization = 0.5;
      c.t_end = 40.0;
      break;
    case Experiment::Scaling:
      c.t_end = 10.0;
      break;
    case Experiment::Oracle:
      break;
  }
  return c;
}

void RunConfig::validate() const {
  for (int i = 0; i < 3; ++i) require(dims[i] >= 1, "nx/ny/nz", "lattice dimensions must be >= 1");
  require(n_spins >= 2, "n_spins", "must be >= 2");
  require(!counts.empty(), "counts", "must list at least one spin count");
  for (int n : counts) require(n >= 2, "counts", "every count must be >= 2");
  require(p_d > 0.0, "p_d", "must be positive");
  require(init.polarization >= 0.0 && init.polarization <= 1.0, "polarization", "must lie in [0, 1]");
  require(norm(init.axis) > 0.0, "axis", "must be nonzero");
  require(run.dt >= 0.0, "dt", "must be >= 0");
  require(run.rtol > 0.0, "rtol", "must be positive");
  require(run.atol > 0.0, "atol", "must be positive");
  require(run.sample_interval >= 0.0, "sample_interval", "must be >= 0");
  require(run.norm_abort > 0.0, "norm_abort", "must be positive");
  require(run.gamma_sign == 1 || run.gamma_sign == -1, "gamma_sign", "must be +1 or -1");
  require(zero_pad >= 1, "zero_pad", "must be >= 1");
  require(fit_t_max >= 0.0, "fit_t_max", "must be >= 0");
  require(omega_d > 0.0, "omega_d", "must be positive");
  require(theta_steps >= 2, "theta_steps", "must be >= 2");
  require(h_d_gauss > 0.0, "h_d_gauss", "must be positive");
  require(gamma > 0.0, "gamma", "must be positive");
  require(tau > 0.0, "tau", "must be positive");
  require(k > 0.0 && k <= 1.0, "k", "must lie in (0, 1]");
  if (experiment == Experiment::Echo) {
    require(mode == Mode::RotatingSecular, "mode", "echo runs in the rotating frame only");
    require(t_end == 0.0 || t_end > tau, "t_end", "must exceed tau (or be 0 for automatic)");
  } else {
    require(t_end > 0.0, "t_end", "must be positive");
  }
}

RunConfig parse_config(std::string_view text) { return build(tokenize(text), std::nullopt, {}); }

RunConfig parse_config(std::string_view text, Experiment forced, const std::vector<std::string>& overrides) {
  return build(tokenize(text), forced, overrides);
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto [key, value] = split_assignment(trim(assignment), 0);
  if (key == "experiment") throw ConfigError(key, "cannot be overridden");
  apply_entry(cfg, key, value);
  cfg.validate();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
  auto num = [&](const char* key, double v) { kv(key, format_double(v)); };

  kv("experiment", std::string(to_string(c.experiment)));
  kv("nx", std::to_string(c.dims[0]));
  kv("ny", std::to_string(c.dims[1]));
  kv("nz", std::to_string(c.dims[2]));
  kv("periodic", c.periodic ? "true" : "false");
  kv("n_spins", std::to_string(c.n_spins));
  num("theta", c.theta);
  std::string counts;
  for (std::size_t i = 0; i < c.counts.size(); ++i) counts += (i ? "," : "") + std::to_string(c.counts[i]);
  kv("counts", counts);
  num("p_d", c.p_d);
  kv("mode", std::string(to_string(c.mode)));
  num("polarization", c.init.polarization);
  kv("axis", format_double(c.init.axis.x) + " " + format_double(c.init.axis.y) + " " +
                 format_double(c.init.axis.z));
  kv("seed", std::to_string(c.init.seed));
  kv("integrator", std::string(to_string(c.run.integrator)));
  num("dt", c.run.dt);
  num("rtol", c.run.rtol);
  num("atol", c.run.atol);
  num("t_end", c.t_end);
  num("sample_interval", c.run.sample_interval);
  num("norm_abort", c.run.norm_abort);
  num("tau", c.tau);
  num("k", c.k);
  num("hx", c.run.h_x);
  num("hy", c.run.h_y);
  num("exchange_nn", c.run.exchange_nn);
  kv("gamma_sign", std::to_string(c.run.gamma_sign));
  kv("window", c.window == Window::Hann ? "hann" : "none");
  kv("zero_pad", std::to_string(c.zero_pad));
  num("fit_t_max", c.fit_t_max);
  num("omega_d", c.omega_d);
  kv("theta_steps", std::to_string(c.theta_steps));
  num("h_d_gauss", c.h_d_gauss);
  num("gamma", c.gamma);
  kv("out", c.out_dir);
  return os.str();
}

}  // namespace dipspin
