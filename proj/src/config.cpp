#include "swipt/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "swipt/errors.hpp"

namespace swipt {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

template <class T>
T parse_number(const std::string& text, int line, const std::string& key) {
  T value{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw ConfigError(line, "'" + key + "' expects a number, got '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text, int line, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(line, "'" + key + "' expects true or false, got '" + text + "'");
}

std::vector<double> parse_doubles(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_number<double>(item, line, key));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

// Values given as dBm in [jointpa], applied after the whole file is read.
struct PendingPower {
  std::optional<double> p_max_dbm, p_ave_dbm, p_max_w, p_ave_w;
};

struct Field {
  const char* section;
  const char* key;
  std::function<void(RunConfig&, PendingPower&, const std::string&, int)> set;
  // Empty result: the key is omitted when rendering.
  std::function<std::string(const RunConfig&)> get;
};

#define NUM_FIELD(sec, name, member, type)                                                  \
  Field {                                                                                   \
    sec, #name,                                                                             \
        [](RunConfig& c, PendingPower&, const std::string& v, int line) {                   \
          c.member = parse_number<type>(v, line, #name);                                    \
        },                                                                                  \
        [](const RunConfig& c) {                                                            \
          if constexpr (std::is_floating_point_v<type>) return format_double(c.member);     \
          else return std::to_string(c.member);                                             \
        }                                                                                   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      NUM_FIELD("env", n_users, system.n_users, int),
      NUM_FIELD("env", tx_power_dbm, system.tx_power_dbm, double),
      NUM_FIELD("env", noise_power_dbm, system.noise_power_dbm, double),
      NUM_FIELD("env", conversion_efficiency, system.conversion_efficiency, double),
      NUM_FIELD("env", path_loss_exponent, system.path_loss_exponent, double),
      NUM_FIELD("env", max_distance_m, system.max_distance_m, double),
      NUM_FIELD("env", ref_distance_m, system.ref_distance_m, double),
      NUM_FIELD("env", ap_gain_dbi, system.ap_gain_dbi, double),
      NUM_FIELD("env", ut_gain_dbi, system.ut_gain_dbi, double),
      NUM_FIELD("env", carrier_hz, system.carrier_hz, double),
      NUM_FIELD("env", bandwidth_hz, system.bandwidth_hz, double),
      NUM_FIELD("env", n_slots, system.n_slots, std::int64_t),
      NUM_FIELD("env", rng_seed, system.rng_seed, std::uint64_t),
      Field{"env", "efficiency_per_user",
            [](RunConfig& c, PendingPower&, const std::string& v, int line) {
              c.system.efficiency_per_user = parse_doubles(v, line, "efficiency_per_user");
            },
            [](const RunConfig& c) { return join(c.system.efficiency_per_user); }},
      Field{"env", "noise_dbm_per_user",
            [](RunConfig& c, PendingPower&, const std::string& v, int line) {
              c.system.noise_dbm_per_user = parse_doubles(v, line, "noise_dbm_per_user");
            },
            [](const RunConfig& c) { return join(c.system.noise_dbm_per_user); }},
      Field{"env", "distances_m",
            [](RunConfig& c, PendingPower&, const std::string& v, int line) {
              c.distances_m = parse_doubles(v, line, "distances_m");
            },
            [](const RunConfig& c) { return join(c.distances_m); }},

      NUM_FIELD("calibrate", batch_slots, calibration.batch_slots, std::int64_t),
      NUM_FIELD("calibrate", step_nu, calibration.step_nu, double),
      NUM_FIELD("calibrate", step_gamma, calibration.step_gamma, double),
      NUM_FIELD("calibrate", step_theta, calibration.step_theta, double),
      NUM_FIELD("calibrate", step_mu, calibration.step_mu, double),
      NUM_FIELD("calibrate", max_iters, calibration.max_iters, int),
      NUM_FIELD("calibrate", tol_feasibility, calibration.tol_feasibility, double),
      NUM_FIELD("calibrate", tol_fairness, calibration.tol_fairness, double),
      NUM_FIELD("calibrate", q_req_w, calibration.q_req_w, double),
      NUM_FIELD("calibrate", stable_iters, calibration.stable_iters, int),

      Field{"jointpa", "p_max_dbm",
            [](RunConfig&, PendingPower& p, const std::string& v, int line) {
              p.p_max_dbm = parse_number<double>(v, line, "p_max_dbm");
            },
            [](const RunConfig&) { return std::string(); }},
      Field{"jointpa", "p_ave_dbm",
            [](RunConfig&, PendingPower& p, const std::string& v, int line) {
              p.p_ave_dbm = parse_number<double>(v, line, "p_ave_dbm");
            },
            [](const RunConfig&) { return std::string(); }},
      Field{"jointpa", "p_max_w",
            [](RunConfig&, PendingPower& p, const std::string& v, int line) {
              p.p_max_w = parse_number<double>(v, line, "p_max_w");
            },
            [](const RunConfig& c) { return format_double(c.power.p_max_w); }},
      Field{"jointpa", "p_ave_w",
            [](RunConfig&, PendingPower& p, const std::string& v, int line) {
              p.p_ave_w = parse_number<double>(v, line, "p_ave_w");
            },
            [](const RunConfig& c) { return format_double(c.power.p_ave_w); }},
      NUM_FIELD("jointpa", q_req_w, power.q_req_w, double),
      NUM_FIELD("jointpa", oracle_slots, oracle.n_slots, std::int64_t),
      NUM_FIELD("jointpa", oracle_grid, oracle.grid, int),
      Field{"jointpa", "oracle_inject",
            [](RunConfig& c, PendingPower&, const std::string& v, int line) {
              c.oracle.inject = parse_bool(v, line, "oracle_inject");
            },
            [](const RunConfig& c) { return std::string(c.oracle.inject ? "true" : "false"); }},

      Field{"experiment", "policies",
            [](RunConfig& c, PendingPower&, const std::string& v, int) {
              c.sweep.policies = split_list(v);
            },
            [](const RunConfig& c) { return join(c.sweep.policies); }},
      Field{"experiment", "q_grid_w",
            [](RunConfig& c, PendingPower&, const std::string& v, int line) {
              c.sweep.q_grid_w = parse_doubles(v, line, "q_grid_w");
            },
            [](const RunConfig& c) { return join(c.sweep.q_grid_w); }},
      NUM_FIELD("experiment", grid_points, sweep.grid_points, int),
      NUM_FIELD("experiment", grid_top_fraction, sweep.grid_top_fraction, double),
      NUM_FIELD("experiment", eval_slots, sweep.eval_slots, std::int64_t),
      NUM_FIELD("experiment", repetitions, sweep.repetitions, int),
      Field{"experiment", "baselines",
            [](RunConfig& c, PendingPower&, const std::string& v, int line) {
              c.sweep.baselines = parse_bool(v, line, "baselines");
            },
            [](const RunConfig& c) { return std::string(c.sweep.baselines ? "true" : "false"); }},

      Field{"cli", "out_dir",
            [](RunConfig& c, PendingPower&, const std::string& v, int) { c.out_dir = v; },
            [](const RunConfig& c) { return c.out_dir; }},
      NUM_FIELD("cli", threads, threads, int),
  };
  return table;
}

#undef NUM_FIELD

const char* const kSections[] = {"env", "calibrate", "jointpa", "experiment", "cli"};

}  // namespace

void RunConfig::validate() const {
  try {
    system.validate();
    calibration.validate();
    power.validate();
    sweep.validate();
    if (!distances_m.empty() && static_cast<int>(distances_m.size()) != system.n_users)
      throw std::invalid_argument("distances_m must list one distance per user");
    if (oracle.n_slots < 1) throw std::invalid_argument("oracle_slots must be at least 1");
    if (oracle.grid < 1) throw std::invalid_argument("oracle_grid must be at least 1");
    if (threads < 0) throw std::invalid_argument("threads must be non-negative");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  PendingPower power;
  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
        throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    if (section.empty()) throw ConfigError(line, "key outside of any section");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    std::string value = trim(std::string_view(s).substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
      return section == f.section && key == f.key;
    });
    if (it == table.end()) throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert(section + "." + key).second)
      throw ConfigError(line, "duplicate key '" + key + "' in [" + section + "]");
    it->set(cfg, power, value, line);
  }
  if (power.p_max_w) cfg.power.p_max_w = *power.p_max_w;
  else if (power.p_max_dbm) cfg.power.p_max_w = dbm_to_watts(*power.p_max_dbm);
  if (power.p_ave_w) cfg.power.p_ave_w = *power.p_ave_w;
  else if (power.p_ave_dbm) cfg.power.p_ave_w = dbm_to_watts(*power.p_ave_dbm);
  if (!seen.count("experiment.eval_slots")) cfg.sweep.eval_slots = cfg.system.n_slots;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(0, "cannot open config file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const Field& f : fields()) {
    const std::string value = f.get(cfg);
    if (value.empty()) continue;
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << value << '\n';
  }
  return out.str();
}

UserGeometry make_geometry(const RunConfig& cfg) {
  if (cfg.distances_m.empty()) return place_users(cfg.system);
  return geometry_from_distances(cfg.system, cfg.distances_m);
}

}  // namespace swipt
