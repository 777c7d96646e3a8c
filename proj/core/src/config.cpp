#include "maxstab/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "maxstab/errors.hpp"
#include "maxstab/io.hpp"

namespace maxstab {

Command command_from_string(const std::string& s) {
  if (s == "simulate") return Command::simulate;
  if (s == "theta") return Command::theta;
  if (s == "nu-decay") return Command::nu_decay;
  if (s == "clt") return Command::clt;
  if (s == "risk") return Command::risk;
  throw config_error({"unknown command '" + s + "'"});
}

std::string to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::theta: return "theta";
    case Command::nu_decay: return "nu-decay";
    case Command::clt: return "clt";
    case Command::risk: return "risk";
  }
  return "unknown";
}

std::vector<std::array<long, 3>> default_nu_lags(int dim) {
  std::vector<std::array<long, 3>> out;
  for (long k : {1, 2, 3, 4, 6, 8}) out.push_back({k, 0, 0});
  if (dim >= 2)
    for (long k : {1, 2, 3}) out.push_back({k, k, 0});
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.c_str();
  char* e = nullptr;
  errno = 0;
  v = std::strtod(b, &e);
  return e != b && *e == '\0' && errno == 0 && std::isfinite(v);
}

bool parse_long(const std::string& s, long& v) {
  const char* b = s.c_str();
  char* e = nullptr;
  errno = 0;
  v = std::strtol(b, &e, 10);
  return e != b && *e == '\0' && errno == 0;
}

bool parse_u64(const std::string& s, std::uint64_t& v) {
  if (s.empty() || s[0] == '-') return false;
  const char* b = s.c_str();
  char* e = nullptr;
  errno = 0;
  v = std::strtoull(b, &e, 10);
  return e != b && *e == '\0' && errno == 0;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct Entry {
  std::string value;
  long line = 0;
  bool used = false;
};

struct Parser {
  std::map<std::string, Entry> kv;
  std::vector<std::string> errors;

  void note(long line, const std::string& msg) {
    if (line > 0)
      errors.push_back("line " + std::to_string(line) + ": " + msg);
    else
      errors.push_back(msg);
  }

  Entry* take(const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  void reject(const std::string& key, const std::string& why) {
    if (Entry* e = take(key)) note(e->line, "'" + key + "' " + why);
  }

  bool get_double(const std::string& key, double& out) {
    Entry* e = take(key);
    if (!e) return false;
    if (!parse_double(e->value, out))
      note(e->line, "'" + key + "' expects a number, got '" + e->value + "'");
    return true;
  }

  bool get_long(const std::string& key, long& out) {
    Entry* e = take(key);
    if (!e) return false;
    if (!parse_long(e->value, out))
      note(e->line, "'" + key + "' expects an integer, got '" + e->value + "'");
    return true;
  }

  bool get_u64(const std::string& key, std::uint64_t& out) {
    Entry* e = take(key);
    if (!e) return false;
    if (!parse_u64(e->value, out))
      note(e->line, "'" + key + "' expects a nonnegative integer, got '" + e->value + "'");
    return true;
  }

  bool get_bool(const std::string& key, bool& out) {
    Entry* e = take(key);
    if (!e) return false;
    if (e->value == "true")
      out = true;
    else if (e->value == "false")
      out = false;
    else
      note(e->line, "'" + key + "' expects true or false, got '" + e->value + "'");
    return true;
  }

  bool get_string(const std::string& key, std::string& out) {
    Entry* e = take(key);
    if (!e) return false;
    out = e->value;
    return true;
  }

  bool get_doubles(const std::string& key, std::vector<double>& out) {
    Entry* e = take(key);
    if (!e) return false;
    std::vector<double> vals;
    for (const std::string& tok : split_ws(e->value)) {
      double v;
      if (!parse_double(tok, v)) {
        note(e->line, "'" + key + "' expects numbers, got '" + tok + "'");
        return true;
      }
      vals.push_back(v);
    }
    if (vals.empty()) {
      note(e->line, "'" + key + "' expects at least one number");
      return true;
    }
    out = std::move(vals);
    return true;
  }

  // Integer lag vectors, one per ';' group, exactly dim components each.
  bool get_lags(const std::string& key, int dim,
                std::vector<std::array<long, 3>>& out) {
    Entry* e = take(key);
    if (!e) return false;
    std::vector<std::array<long, 3>> vals;
    std::istringstream groups(e->value);
    std::string group;
    while (std::getline(groups, group, ';')) {
      group = trim(group);
      if (group.empty()) continue;
      const std::vector<std::string> toks = split_ws(group);
      if (static_cast<int>(toks.size()) != dim) {
        note(e->line, "'" + key + "' expects " + std::to_string(dim) +
                          " components per lag, got '" + group + "'");
        return true;
      }
      std::array<long, 3> lag = {0, 0, 0};
      for (int k = 0; k < dim; ++k) {
        if (!parse_long(toks[static_cast<std::size_t>(k)], lag[k])) {
          note(e->line, "'" + key + "' expects integers, got '" + toks[k] + "'");
          return true;
        }
      }
      vals.push_back(lag);
    }
    if (vals.empty()) {
      note(e->line, "'" + key + "' expects at least one lag");
      return true;
    }
    out = std::move(vals);
    return true;
  }

  long line_of(const std::string& key) const {
    auto it = kv.find(key);
    return it == kv.end() ? 0 : it->second.line;
  }
};

void parse_model(Parser& p, ExperimentConfig& c) {
  std::string type = "smith";
  p.get_string("model.type", type);
  const long type_line = p.line_of("model.type");
  if (type != "smith" && type != "brown-resnick") {
    p.note(type_line, "model.type must be smith or brown-resnick, got '" + type + "'");
    return;
  }
  long dim = c.dim;
  p.get_long("model.dim", dim);
  if (dim < 1 || dim > 3) {
    p.note(p.line_of("model.dim"), "model.dim must be 1, 2 or 3");
    return;
  }
  c.dim = static_cast<int>(dim);

  if (type == "smith") {
    p.reject("model.eta", "does not apply to model.type = smith");
    p.reject("model.alpha", "does not apply to model.type = smith");
    const bool has_var = p.kv.count("model.variance") != 0;
    const bool has_sigma = p.kv.count("model.sigma") != 0;
    if (has_var && has_sigma)
      p.note(p.line_of("model.sigma"),
             "give model.variance or model.sigma, not both");
    SmithModel m = SmithModel::isotropic(c.dim, 1.0);
    double variance = 1.0;
    if (p.get_double("model.variance", variance)) {
      if (!(variance > 0.0)) {
        p.note(p.line_of("model.variance"), "model.variance must be positive");
        return;
      }
      m = SmithModel::isotropic(c.dim, variance);
    }
    std::vector<double> sigma;
    if (p.get_doubles("model.sigma", sigma)) {
      if (sigma.size() != static_cast<std::size_t>(c.dim) * c.dim) {
        p.note(p.line_of("model.sigma"),
               "model.sigma expects dim*dim row-major entries");
        return;
      }
      m.dim = c.dim;
      m.sigma = sigma;
    }
    try {
      m.validate();
    } catch (const input_error& err) {
      p.note(p.line_of(has_sigma ? "model.sigma" : "model.variance"), err.what());
      return;
    }
    c.model = m;
  } else {
    p.reject("model.variance", "does not apply to model.type = brown-resnick");
    p.reject("model.sigma", "does not apply to model.type = brown-resnick");
    BrownResnickModel m;
    p.get_double("model.eta", m.variogram.eta);
    p.get_double("model.alpha", m.variogram.alpha);
    try {
      m.validate();
    } catch (const input_error& err) {
      const long ln = p.line_of(p.kv.count("model.alpha") ? "model.alpha" : "model.eta");
      p.note(ln, err.what());
      return;
    }
    c.model = m;
  }
}

void parse_control(Parser& p, ExperimentConfig& c) {
  p.get_u64("control.seed", c.control.seed);
  std::string method = "auto";
  if (p.get_string("control.method", method)) {
    if (method == "auto")
      c.control.method.reset();
    else if (method == "smith-exact")
      c.control.method = SimMethod::smith_exact;
    else if (method == "br-threshold")
      c.control.method = SimMethod::br_threshold;
    else if (method == "br-extremal")
      c.control.method = SimMethod::br_extremal;
    else
      p.note(p.line_of("control.method"),
             "control.method must be auto, smith-exact, br-threshold or br-extremal");
  }
  p.get_double("control.padding", c.control.padding);
  p.get_double("control.quantile_bound", c.control.quantile_bound);
  p.get_long("control.pilot_draws", c.control.pilot_draws);
  p.get_long("control.max_spectral_draws", c.control.max_spectral_draws);
  long threads = static_cast<long>(c.control.threads);
  if (p.get_long("control.threads", threads)) {
    if (threads < 0)
      p.note(p.line_of("control.threads"), "control.threads must be >= 0");
    else
      c.control.threads = static_cast<unsigned>(threads);
  }
  if (p.get_long("control.replicates", c.replicates) && c.replicates < 1)
    p.note(p.line_of("control.replicates"), "control.replicates must be >= 1");

  // Method/model compatibility is a config-level fact; fail here, not deep
  // inside a run.
  if (c.control.method) {
    const bool smith = std::holds_alternative<SmithModel>(c.model);
    const bool wants_smith = *c.control.method == SimMethod::smith_exact;
    if (smith != wants_smith)
      p.note(p.line_of("control.method"),
             "control.method does not match model.type");
  }
  try {
    c.control.validate();
  } catch (const input_error& err) {
    p.note(0, err.what());
  }
}

void check_divides(Parser& p, long line, double side, double delta,
                   const std::string& what) {
  const long q = std::lround(side / delta);
  if (q < 1 || std::abs(static_cast<double>(q) * delta - side) > 1e-9 * std::max(1.0, side))
    p.note(line, "grid.delta must divide " + what);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, Command command) {
  Parser p;
  std::istringstream lines(text);
  std::string raw;
  long ln = 0;
  while (std::getline(lines, raw)) {
    ++ln;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.note(ln, "expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      p.note(ln, "empty key");
      continue;
    }
    if (val.empty()) {
      p.note(ln, "empty value for '" + key + "'");
      continue;
    }
    if (p.kv.count(key)) {
      p.note(ln, "duplicate key '" + key + "'");
      continue;
    }
    p.kv.emplace(key, Entry{val, ln, false});
  }

  ExperimentConfig c;
  c.command = command;
  parse_model(p, c);
  parse_control(p, c);

  const bool needs_delta = command != Command::theta;
  if (needs_delta) {
    if (p.get_double("grid.delta", c.delta) && !(c.delta > 0.0))
      p.note(p.line_of("grid.delta"), "grid.delta must be positive");
  } else {
    p.reject("grid.delta", "is not used by command 'theta'");
  }
  if (command == Command::simulate) {
    if (p.get_double("grid.extent", c.extent) && !(c.extent > 0.0))
      p.note(p.line_of("grid.extent"), "grid.extent must be positive");
    std::vector<double> origin;
    if (p.get_doubles("grid.origin", origin)) {
      if (origin.size() != static_cast<std::size_t>(c.dim))
        p.note(p.line_of("grid.origin"), "grid.origin expects dim components");
      else
        for (int k = 0; k < c.dim; ++k) c.origin[static_cast<std::size_t>(k)] = origin[static_cast<std::size_t>(k)];
    }
    if (c.delta > 0.0 && c.extent > 0.0)
      check_divides(p, p.line_of("grid.extent"), c.extent, c.delta, "grid.extent");
  } else {
    p.reject("grid.extent", "is only used by command 'simulate'");
    p.reject("grid.origin", "is only used by command 'simulate'");
  }

  switch (command) {
    case Command::simulate:
      break;
    case Command::theta: {
      if (p.get_doubles("theta.lags", c.theta_lags))
        for (double h : c.theta_lags)
          if (!(h > 0.0)) {
            p.note(p.line_of("theta.lags"), "theta.lags must be positive");
            break;
          }
      break;
    }
    case Command::nu_decay: {
      if (p.get_lags("nu.lags", c.dim, c.nu_lags))
        for (const auto& lag : c.nu_lags)
          if (lag[0] == 0 && lag[1] == 0 && lag[2] == 0) {
            p.note(p.line_of("nu.lags"), "nu.lags must be nonzero");
            break;
          }
      if (p.get_double("nu.delta_moment", c.nu_delta_moment) &&
          !(c.nu_delta_moment > 0.0))
        p.note(p.line_of("nu.delta_moment"), "nu.delta_moment must be positive");
      break;
    }
    case Command::clt: {
      if (p.get_doubles("clt.lengths", c.clt_lengths)) {
        double prev = 0.0;
        for (double len : c.clt_lengths) {
          if (!(len > prev)) {
            p.note(p.line_of("clt.lengths"),
                   "clt.lengths must be positive and strictly increasing");
            break;
          }
          prev = len;
        }
      }
      std::string fun = "deductible-log";
      p.get_string("clt.functional", fun);
      const long fun_line = p.line_of("clt.functional");
      CostFunctional F = c.functional;
      if (fun == "deductible-log") {
        p.reject("clt.z0", "does not apply to functional 'deductible-log'");
        p.reject("clt.c", "does not apply to functional 'deductible-log'");
        double u = 2.718281828459045;
        p.get_double("clt.u", u);
        if (!(u > 0.0))
          p.note(p.line_of("clt.u"), "clt.u must be positive");
        else
          F = CostFunctional::deductible_log(u);
      } else if (fun == "threshold") {
        p.reject("clt.u", "does not apply to functional 'threshold'");
        p.reject("clt.c", "does not apply to functional 'threshold'");
        double z0 = 2.0;
        p.get_double("clt.z0", z0);
        if (!(z0 > 0.0))
          p.note(p.line_of("clt.z0"), "clt.z0 must be positive");
        else
          F = CostFunctional::threshold_indicator(z0);
      } else if (fun == "log") {
        p.reject("clt.u", "does not apply to functional 'log'");
        p.reject("clt.z0", "does not apply to functional 'log'");
        p.reject("clt.c", "does not apply to functional 'log'");
        F = CostFunctional::log_identity();
      } else if (fun == "constant") {
        p.reject("clt.u", "does not apply to functional 'constant'");
        p.reject("clt.z0", "does not apply to functional 'constant'");
        double cc = 1.0;
        p.get_double("clt.c", cc);
        F = CostFunctional::constant(cc);
      } else {
        p.note(fun_line,
               "clt.functional must be deductible-log, threshold, log or constant");
      }
      c.functional = F;
      if (p.get_long("clt.sigma2_n", c.clt_options.sigma2_n) &&
          c.clt_options.sigma2_n < 100)
        p.note(p.line_of("clt.sigma2_n"), "clt.sigma2_n must be >= 100");
      p.get_double("clt.sigma2_max_radius", c.clt_options.sigma2_max_radius);
      p.get_long("clt.cubes_max_window", c.clt_options.cubes_max_window);
      p.get_bool("clt.plug_in_mu", c.clt_options.plug_in_mu);
      if (c.delta > 0.0) {
        const long q = std::lround(1.0 / c.delta);
        if (q < 1 || std::abs(static_cast<double>(q) * c.delta - 1.0) > 1e-9)
          p.note(p.line_of("grid.delta"),
                 "grid.delta must divide 1 for the cell decomposition");
      }
      break;
    }
    case Command::risk: {
      if (p.get_double("risk.u", c.risk.u) && !(c.risk.u > 0.0))
        p.note(p.line_of("risk.u"), "risk.u must be positive");
      p.get_doubles("risk.levels", c.risk.levels);
      p.get_doubles("risk.lengths", c.risk.lengths);
      p.get_bool("risk.synthetic", c.risk.synthetic_null);
      p.get_long("risk.sigma2_n", c.risk.sigma2_n);
      p.get_double("risk.sigma2_max_radius", c.risk.sigma2_max_radius);
      c.risk.replicates = c.replicates;
      try {
        c.risk.validate();
      } catch (const input_error& err) {
        p.note(0, err.what());
      }
      break;
    }
  }

  for (const auto& [key, entry] : p.kv)
    if (!entry.used)
      p.note(entry.line, "unknown or misplaced key '" + key + "'");

  if (!p.errors.empty()) throw config_error(p.errors);

  if (command == Command::nu_decay && c.nu_lags.empty())
    c.nu_lags = default_nu_lags(c.dim);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, Command command) {
  return parse_config(read_text(path), command);
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "# canonical configuration for command '" << to_string(c.command) << "'\n";
  if (const auto* s = std::get_if<SmithModel>(&c.model)) {
    os << "model.type = smith\n";
    os << "model.dim = " << c.dim << "\n";
    os << "model.sigma =";
    for (double v : s->sigma) os << ' ' << format_double(v);
    os << "\n";
  } else {
    const auto& b = std::get<BrownResnickModel>(c.model);
    os << "model.type = brown-resnick\n";
    os << "model.dim = " << c.dim << "\n";
    os << "model.eta = " << format_double(b.variogram.eta) << "\n";
    os << "model.alpha = " << format_double(b.variogram.alpha) << "\n";
  }
  os << "control.seed = " << c.control.seed << "\n";
  os << "control.method = "
     << (c.control.method ? to_string(*c.control.method) : "auto") << "\n";
  os << "control.replicates = " << c.replicates << "\n";
  os << "control.padding = " << format_double(c.control.padding) << "\n";
  os << "control.quantile_bound = " << format_double(c.control.quantile_bound) << "\n";
  os << "control.pilot_draws = " << c.control.pilot_draws << "\n";
  os << "control.max_spectral_draws = " << c.control.max_spectral_draws << "\n";
  os << "control.threads = " << c.control.threads << "\n";
  if (c.command != Command::theta)
    os << "grid.delta = " << format_double(c.delta) << "\n";
  switch (c.command) {
    case Command::simulate: {
      os << "grid.extent = " << format_double(c.extent) << "\n";
      os << "grid.origin =";
      for (int k = 0; k < c.dim; ++k)
        os << ' ' << format_double(c.origin[static_cast<std::size_t>(k)]);
      os << "\n";
      break;
    }
    case Command::theta:
      os << "theta.lags = " << join_doubles(c.theta_lags) << "\n";
      break;
    case Command::nu_decay: {
      os << "nu.lags = ";
      for (std::size_t i = 0; i < c.nu_lags.size(); ++i) {
        if (i) os << "; ";
        for (int k = 0; k < c.dim; ++k) {
          if (k) os << ' ';
          os << c.nu_lags[i][k];
        }
      }
      os << "\n";
      os << "nu.delta_moment = " << format_double(c.nu_delta_moment) << "\n";
      break;
    }
    case Command::clt: {
      os << "clt.lengths = " << join_doubles(c.clt_lengths) << "\n";
      switch (c.functional.kind) {
        case CostFunctional::Kind::deductible_log:
          os << "clt.functional = deductible-log\n";
          os << "clt.u = " << format_double(c.functional.param) << "\n";
          break;
        case CostFunctional::Kind::threshold_indicator:
          os << "clt.functional = threshold\n";
          os << "clt.z0 = " << format_double(c.functional.param) << "\n";
          break;
        case CostFunctional::Kind::log_identity:
          os << "clt.functional = log\n";
          break;
        case CostFunctional::Kind::constant:
          os << "clt.functional = constant\n";
          os << "clt.c = " << format_double(c.functional.param) << "\n";
          break;
      }
      os << "clt.sigma2_n = " << c.clt_options.sigma2_n << "\n";
      os << "clt.sigma2_max_radius = "
         << format_double(c.clt_options.sigma2_max_radius) << "\n";
      os << "clt.cubes_max_window = " << c.clt_options.cubes_max_window << "\n";
      os << "clt.plug_in_mu = " << (c.clt_options.plug_in_mu ? "true" : "false")
         << "\n";
      break;
    }
    case Command::risk: {
      os << "risk.u = " << format_double(c.risk.u) << "\n";
      os << "risk.levels = " << join_doubles(c.risk.levels) << "\n";
      os << "risk.lengths = " << join_doubles(c.risk.lengths) << "\n";
      os << "risk.synthetic = " << (c.risk.synthetic_null ? "true" : "false") << "\n";
      os << "risk.sigma2_n = " << c.risk.sigma2_n << "\n";
      os << "risk.sigma2_max_radius = "
         << format_double(c.risk.sigma2_max_radius) << "\n";
      break;
    }
  }
  return os.str();
}

}  // namespace maxstab
