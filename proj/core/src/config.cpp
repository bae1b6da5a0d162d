#include "ionxy/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ionxy/errors.hpp"

namespace ionxy {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    cfg.entries_[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : to_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const long long v = to_integer(key, it->second);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError("key '" + key + "' out of range");
  return static_cast<int>(v);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::uint64_t v = 0;
  const std::string& t = it->second;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': '" + t + "' is not an unsigned integer");
  }
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + it->second + "' is not a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  if (it->second.empty()) return out;
  for (const auto& item : split(it->second, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<int> out;
  if (it->second.empty()) return out;
  for (const auto& item : split(it->second, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(static_cast<int>(to_integer(key, item)));
    } else if (parts.size() == 2 || parts.size() == 3) {
      const long long a = to_integer(key, parts[0]);
      const long long b = to_integer(key, parts[1]);
      const long long step = parts.size() == 3 ? to_integer(key, parts[2]) : 1;
      if (step <= 0 || b < a) throw ConfigError("key '" + key + "': bad range '" + item + "'");
      for (long long v = a; v <= b; v += step) out.push_back(static_cast<int>(v));
    } else {
      throw ConfigError("key '" + key + "': bad range '" + item + "'");
    }
  }
  return out;
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : entries_) {
    if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) continue;
    std::vector<std::string> sorted = allowed;
    std::sort(sorted.begin(), sorted.end());
    std::string list;
    for (const auto& a : sorted) list += (list.empty() ? "" : ", ") + a;
    throw ConfigError("unknown config key '" + k + "'; valid keys: " + list);
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<std::string>& trap_keys() {
  static const std::vector<std::string> keys = {
      "n_ions",         "mass_amu",     "omega_x_mhz",   "omega_y_mhz",   "omega_z_mhz",    "delta_k",
      "rabi_total_mhz", "mu_mhz",       "angular",       "alpha_target",  "axial_safety",   "axial_points",
      "axial_min_mhz",  "axial_max_mhz", "detuning_ratio", "fit_convention", "alpha_tolerance"};
  return keys;
}

namespace {

double frequency_unit(const Config& c) { return c.get_bool("angular", false) ? 1e6 : constants::two_pi * 1e6; }

}  // namespace

TrapConfig trap_from_config(const Config& c) {
  const int n = c.get_int("n_ions", 10);
  if (n < 1) throw ConfigError("n_ions must be at least 1");
  TrapConfig t = default_trap(n);
  const double unit = frequency_unit(c);
  t.ion_mass = c.get_double("mass_amu", t.ion_mass / constants::atomic_mass_unit) * constants::atomic_mass_unit;
  t.omega_x = c.get_double("omega_x_mhz", t.omega_x / unit) * unit;
  t.omega_y = c.get_double("omega_y_mhz", t.omega_y / unit) * unit;
  t.omega_z = c.get_double("omega_z_mhz", 0.0) * unit;
  t.delta_k = c.get_double("delta_k", t.delta_k);
  t.rabi_total = c.get_double("rabi_total_mhz", t.rabi_total / unit) * unit;
  t.detuning_mu = c.get_double("mu_mhz", 0.0) * unit;
  return t;
}

SetupOptions setup_from_config(const Config& c) {
  SetupOptions s;
  s.trap = trap_from_config(c);
  const double unit = frequency_unit(c);
  s.alpha_target = c.get_double("alpha_target", s.alpha_target);
  s.axial.safety_factor = c.get_double("axial_safety", s.axial.safety_factor);
  s.axial.points = c.get_int("axial_points", s.axial.points);
  s.axial.omega_min = c.get_double("axial_min_mhz", s.axial.omega_min / unit) * unit;
  s.axial.omega_max = c.get_double("axial_max_mhz", s.axial.omega_max / unit) * unit;
  s.axial.detuning_ratio = c.get_double("detuning_ratio", s.axial.detuning_ratio);
  if (c.has("fit_convention")) {
    try {
      s.axial.convention = fit_convention_from_string(c.get_string("fit_convention", ""));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    s.detuning.convention = s.axial.convention;
  }
  s.detuning.alpha_tolerance = c.get_double("alpha_tolerance", s.detuning.alpha_tolerance);
  return s;
}

}  // namespace ionxy
