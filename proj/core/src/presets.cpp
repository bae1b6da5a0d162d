#include "ionxy/presets.hpp"

#include "ionxy/errors.hpp"

namespace ionxy {

namespace {

const char* const chain_block =
    "n_ions = 10\n"
    "mass_amu = 171\n"
    "omega_x_mhz = 6\n"
    "omega_y_mhz = 5\n"
    "rabi_total_mhz = 1\n"
    "delta_k = 3.5399e7\n"
    "axial_safety = 1.0\n"
    "axial_points = 2000\n"
    "alpha_tolerance = 1e-8\n";

std::string leakage(const std::string& alpha, int modes, int excitations) {
  return std::string(chain_block) + "alpha_target = " + alpha + "\nmodes = " + std::to_string(modes) +
         "\nexcitations = " + std::to_string(excitations) + "\nperiods = 12\nsamples = 3000\n";
}

std::vector<Preset> build() {
  std::vector<Preset> p;
  p.push_back({"2a", "leakage", "N = 10 leakage, COM mode only, alpha 0.8", leakage("0.8", 1, 1)});
  p.push_back({"2b", "leakage", "N = 10 leakage, COM mode only, alpha 0.4", leakage("0.4", 1, 1)});
  p.push_back({"2c", "leakage", "N = 10 leakage with shifted-frequency fit, alpha 0.2", leakage("0.2", 1, 1)});
  p.push_back({"2d", "leakage", "N = 10 two-mode average leakage, alpha 0.2", leakage("0.2", 2, 1)});
  p.push_back({"3a", "leakage", "N = 10 phonon number, one excitation, alpha 0.2", leakage("0.2", 1, 1)});
  p.push_back({"3b", "leakage", "N = 10 phonon number, two excitations, alpha 0.2", leakage("0.2", 1, 2)});
  p.push_back({"3c", "leakage", "N = 10 phonon number, five excitations, alpha 0.2", leakage("0.2", 1, 5)});
  p.push_back({"4", "transfer", "state transfer fidelity and scaled time, N = 8 to 52",
               std::string(chain_block) + "n_list = 8:52:4\nalpha_list = 0.2, 0.4\nexperimental = true\n"});
  p.push_back({"5", "noise", "dephased transfer, t2 = 10 ms, 500 samples",
               std::string(chain_block) +
                   "n_list = 8:52:4\nalpha_list = 0.2, 0.4, 0.6\nt2 = 0.01\nn_samples = 500\n"});
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(const std::string& id) {
  for (const auto& p : presets()) {
    if (p.id == id) return p;
  }
  std::string list;
  for (const auto& p : presets()) list += (list.empty() ? "" : ", ") + p.id;
  throw ConfigError("unknown preset '" + id + "'; valid: " + list);
}

}  // namespace ionxy
