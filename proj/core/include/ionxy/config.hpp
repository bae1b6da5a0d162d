#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ionxy/experiment.hpp"

namespace ionxy {

/// Flat `key = value` configuration. `#` starts a comment; blank lines are
/// ignored; a repeated key keeps the last value. Lists are comma separated,
/// and integer lists also accept `start:stop:step` ranges (inclusive).
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  /// Entries of `other` replace entries of this config.
  void merge(const Config& other);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  /// Throws ConfigError naming the first unknown key and listing `allowed`.
  void require_known(const std::vector<std::string>& allowed) const;

  /// Sorted `key = value` lines.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Keys read by trap_from_config / setup_from_config.
///   n_ions, mass_amu, omega_x_mhz, omega_y_mhz, omega_z_mhz, delta_k (1/m),
///   rabi_total_mhz, mu_mhz, angular (frequencies given in 10⁶ rad/s when
///   true, in MHz otherwise), alpha_target, axial_safety, axial_points,
///   axial_min_mhz, axial_max_mhz, detuning_ratio, fit_convention,
///   alpha_tolerance.
const std::vector<std::string>& trap_keys();

/// Defaults come from default_trap(); absent omega_z_mhz / mu_mhz stay 0.
TrapConfig trap_from_config(const Config& config);
SetupOptions setup_from_config(const Config& config);

}  // namespace ionxy
