#include "hnoma/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hnoma {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& t) {
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || t.empty() || !std::isfinite(v))
    throw std::invalid_argument("'" + t + "' is not a finite number");
  return v;
}

long long to_ll(const std::string& t) {
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || t.empty())
    throw std::invalid_argument("'" + t + "' is not an integer");
  return v;
}

std::uint64_t to_u64(const std::string& t) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || t.empty() || t[0] == '-')
    throw std::invalid_argument("'" + t + "' is not a nonnegative integer");
  return v;
}

bool to_bool(const std::string& t) {
  if (t == "true") return true;
  if (t == "false") return false;
  throw std::invalid_argument("'" + t + "' is not true/false");
}

std::vector<double> to_double_list(const std::string& v) {
  std::vector<double> out;
  for (const std::string& t : split_ws(v)) out.push_back(to_double(t));
  if (out.empty()) throw std::invalid_argument("expected at least one number");
  return out;
}

std::vector<int> to_int_list(const std::string& v) {
  std::vector<int> out;
  for (const std::string& t : split_ws(v)) out.push_back(int(to_ll(t)));
  if (out.empty()) throw std::invalid_argument("expected at least one integer");
  return out;
}

// "start:stop:step" (inclusive) or an explicit whitespace-separated list
std::vector<double> to_snr_grid(const std::string& v) {
  const std::string t = trim(v);
  if (t.find(':') != std::string::npos) {
    const std::size_t c1 = t.find(':');
    const std::size_t c2 = t.find(':', c1 + 1);
    if (c2 == std::string::npos || t.find(':', c2 + 1) != std::string::npos)
      throw std::invalid_argument("range must be start:stop:step");
    const double start = to_double(trim(t.substr(0, c1)));
    const double stop = to_double(trim(t.substr(c1 + 1, c2 - c1 - 1)));
    const double step = to_double(trim(t.substr(c2 + 1)));
    if (!(step > 0.0)) throw std::invalid_argument("range step must be > 0");
    if (stop < start) throw std::invalid_argument("range stop before start");
    std::vector<double> out;
    for (double x = start; x <= stop + 1e-9; x += step) out.push_back(x);
    return out;
  }
  return to_double_list(v);
}

Scheme to_scheme(const std::string& t) {
  if (t == "tnoma") return Scheme::tnoma;
  if (t == "hnoma") return Scheme::hnoma;
  if (t == "unoma") return Scheme::unoma;
  throw std::invalid_argument("'" + t + "' is not tnoma/hnoma/unoma");
}

FadingModel to_fading(const std::string& t) {
  if (t == "rayleigh") return FadingModel::rayleigh;
  if (t == "nakagami") return FadingModel::nakagami;
  if (t == "awgn") return FadingModel::awgn;
  throw std::invalid_argument("'" + t + "' is not rayleigh/nakagami/awgn");
}

CsiMode to_csi(const std::string& t) {
  if (t == "literal") return CsiMode::literal;
  if (t == "variance_consistent") return CsiMode::variance_consistent;
  throw std::invalid_argument("'" + t + "' is not literal/variance_consistent");
}

// Applies one dotted key; throws invalid_argument for unknown keys or
// unparseable values. Shared by the file parser and --set overrides.
void set_key(RunConfig& cfg, const std::string& full, const std::string& val) {
  ScenarioConfig& sc = cfg.scenario;
  if (full == "run.label") {
    cfg.label = val;
  } else if (full == "run.schemes") {
    cfg.schemes.clear();
    for (const std::string& t : split_ws(val))
      cfg.schemes.push_back(to_scheme(t));
    if (cfg.schemes.empty())
      throw std::invalid_argument("expected at least one scheme");
  } else if (full == "run.target_ber") {
    cfg.target_ber = to_double(val);
    if (!(cfg.target_ber > 0.0 && cfg.target_ber < 0.5))
      throw std::invalid_argument("target BER must lie in (0, 0.5)");
  } else if (full == "scenario.users") {
    sc.user_count = int(to_ll(val));
  } else if (full == "scenario.distances") {
    sc.distances = to_double_list(val);
  } else if (full == "scenario.alphas") {
    sc.alphas = to_double_list(val);
  } else if (full == "scenario.modulation") {
    sc.modulation_orders = to_int_list(val);
  } else if (full == "scenario.fading") {
    sc.fading = to_fading(val);
  } else if (full == "scenario.nakagami_m") {
    sc.nakagami_m = to_double(val);
  } else if (full == "scenario.path_loss_exponent") {
    sc.path_loss_exponent = to_double(val);
  } else if (full == "scenario.sigma_e2") {
    sc.sigma_e2 = to_double(val);
  } else if (full == "scenario.csi_mode") {
    sc.csi_mode = to_csi(val);
  } else if (full == "scenario.residual_rho") {
    sc.residual_rho = to_double(val);
  } else if (full == "scenario.ring_levels") {
    sc.hnoma_ring_levels = to_bool(val);
  } else if (full == "scenario.soft_combine") {
    sc.hnoma_soft_combine = to_bool(val);
  } else if (full == "scenario.snr_db") {
    sc.snr_grid_db = to_snr_grid(val);
  } else if (full == "scenario.seed") {
    sc.seed = to_u64(val);
  } else if (full == "scenario.bandwidth_hz") {
    sc.bandwidth_hz = to_double(val);
  } else if (full == "scenario.min_errors") {
    sc.stop.min_errors = to_ll(val);
  } else if (full == "scenario.max_bits") {
    sc.stop.max_bits = to_ll(val);
  } else if (full == "scenario.chunk_blocks") {
    sc.chunk_blocks = int(to_ll(val));
  } else if (full == "scenario.workers") {
    sc.workers = int(to_ll(val));
  } else if (full == "analytic.halved_pc") {
    cfg.halved_tail_average = to_bool(val);
  } else {
    throw std::invalid_argument("unknown key '" + full + "'");
  }
}

const std::set<std::string> kSections = {"run", "scenario", "analytic"};
const std::vector<std::string> kRequired = {
    "run.schemes", "scenario.users", "scenario.distances", "scenario.alphas",
    "scenario.snr_db"};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <class T, class F>
std::string join_list(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += f(v[i]);
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(
    const std::string& text,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  std::vector<std::string> errs;
  std::set<std::string> seen;

  std::istringstream is(text);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    if (const std::size_t hash = raw.find('#'); hash != std::string::npos)
      raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.push_back(at + "unterminated section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section)) {
        errs.push_back(at + "unknown section [" + section + "]");
        section.clear();
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errs.push_back(at + "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) {
      errs.push_back(at + "key '" + key + "' outside any section");
      continue;
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) {
      errs.push_back(at + "duplicate key '" + full + "'");
      continue;
    }
    try {
      set_key(cfg, full, val);
    } catch (const std::invalid_argument& e) {
      errs.push_back(at + full + ": " + e.what());
    }
  }

  for (const auto& [key, val] : overrides) {
    try {
      set_key(cfg, key, val);
      seen.insert(key);
    } catch (const std::invalid_argument& e) {
      errs.push_back("override " + key + ": " + e.what());
    }
  }

  for (const std::string& req : kRequired)
    if (!seen.count(req)) errs.push_back("missing required key '" + req + "'");

  if (errs.empty()) {
    // a single shared order may be written once and broadcast to all users
    if (cfg.scenario.modulation_orders.size() == 1 &&
        cfg.scenario.user_count > 1)
      cfg.scenario.modulation_orders.assign(cfg.scenario.user_count,
                                            cfg.scenario.modulation_orders[0]);
    std::set<std::string> dedup;
    for (Scheme s : cfg.schemes) {
      ScenarioConfig probe = cfg.scenario;
      probe.scheme = s;
      try {
        validate_scenario(probe);
      } catch (const std::invalid_argument& e) {
        const std::string msg =
            std::string("for scheme ") + scheme_name(s) + ": " + e.what();
        if (dedup.insert(msg).second) errs.push_back(msg);
      }
    }
    if (!cfg.schemes.empty()) cfg.scenario.scheme = cfg.schemes.front();
  }

  if (!errs.empty()) {
    std::string all = "config error: ";
    for (std::size_t i = 0; i < errs.size(); ++i) {
      if (i) all += "; ";
      all += errs[i];
    }
    throw std::invalid_argument(all);
  }
  return cfg;
}

RunConfig load_run_config(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_run_config(os.str(), overrides);
}

std::string serialize_run_config(const RunConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  std::ostringstream os;
  os << "[run]\n";
  if (!cfg.label.empty()) os << "label = " << cfg.label << '\n';
  os << "schemes = "
     << join_list(cfg.schemes, [](Scheme s) { return std::string(scheme_name(s)); })
     << '\n';
  os << "target_ber = " << fmt(cfg.target_ber) << '\n';
  os << "\n[scenario]\n";
  os << "users = " << sc.user_count << '\n';
  os << "distances = " << join_list(sc.distances, fmt) << '\n';
  os << "alphas = " << join_list(sc.alphas, fmt) << '\n';
  if (!sc.modulation_orders.empty())
    os << "modulation = "
       << join_list(sc.modulation_orders,
                    [](int m) { return std::to_string(m); })
       << '\n';
  os << "fading = " << fading_name(sc.fading) << '\n';
  os << "nakagami_m = " << fmt(sc.nakagami_m) << '\n';
  os << "path_loss_exponent = " << fmt(sc.path_loss_exponent) << '\n';
  os << "sigma_e2 = " << fmt(sc.sigma_e2) << '\n';
  os << "csi_mode = "
     << (sc.csi_mode == CsiMode::literal ? "literal" : "variance_consistent")
     << '\n';
  os << "residual_rho = " << fmt(sc.residual_rho) << '\n';
  os << "ring_levels = " << (sc.hnoma_ring_levels ? "true" : "false") << '\n';
  os << "soft_combine = " << (sc.hnoma_soft_combine ? "true" : "false")
     << '\n';
  os << "snr_db = " << join_list(sc.snr_grid_db, fmt) << '\n';
  os << "seed = " << sc.seed << '\n';
  os << "bandwidth_hz = " << fmt(sc.bandwidth_hz) << '\n';
  os << "min_errors = " << sc.stop.min_errors << '\n';
  os << "max_bits = " << sc.stop.max_bits << '\n';
  os << "chunk_blocks = " << sc.chunk_blocks << '\n';
  os << "workers = " << sc.workers << '\n';
  os << "\n[analytic]\n";
  os << "halved_pc = " << (cfg.halved_tail_average ? "true" : "false") << '\n';
  return os.str();
}

AnalyticConfig analytic_from_run(const RunConfig& cfg) {
  const ScenarioConfig& sc = cfg.scenario;
  std::string why;
  if (sc.user_count != 2)
    why = "needs a two-user scenario";
  else if (sc.modulation_orders.size() != 2)
    why = "needs per-user modulation orders";
  else if (sc.fading != FadingModel::rayleigh)
    why = "models rayleigh fading only";
  else if (sc.sigma_e2 != 0.0)
    why = "assumes perfect channel knowledge";
  if (!why.empty())
    throw std::invalid_argument("closed-form counterpart: " + why);

  AnalyticConfig an;
  an.m1 = sc.modulation_orders[0];
  an.m2 = sc.modulation_orders[1];
  an.alpha1 = sc.alphas[0];
  an.alpha2 = sc.alphas[1];
  an.q1 = sc.distances[0];
  an.q2 = sc.distances[1];
  an.zeta = sc.path_loss_exponent;
  an.e1 = default_alphabet_energy(an.m1);
  an.e2 = default_alphabet_energy(an.m2);
  an.es_over_n0_db_grid = sc.snr_grid_db;
  validate_analytic_config(an);
  return an;
}

}  // namespace hnoma
