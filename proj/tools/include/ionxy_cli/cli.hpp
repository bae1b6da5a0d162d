#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ionxy/config.hpp"
#include "ionxy/table_io.hpp"

namespace ionxy::cli {

enum ExitCode : int { Success = 0, NumericalFailure = 1, ConfigFailure = 2 };

struct GlobalOptions {
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::Csv;
  std::uint64_t seed = 0;
  int threads = 1;
  int verbosity = 0;
};

/// Everything a subcommand needs: merged configuration, global flags and
/// the streams for progress messages and the list of written files.
struct Context {
  Config config;
  GlobalOptions global;
  std::string command;
  std::ostream* log = nullptr;  // progress (verbosity > 0)
  std::ostream* out = nullptr;  // one line per written file

  RunMetadata metadata() const;
  void note(const std::string& message) const;
  std::filesystem::path emit(const std::string& stem, const Table& table, const Scalars& summary = {}) const;
  std::filesystem::path emit_report(const std::string& stem, const Scalars& summary,
                                    const std::vector<std::pair<std::string, std::vector<double>>>& arrays = {}) const;
};

using Command = std::function<void(const Context&)>;

struct CommandInfo {
  std::string name;
  std::string description;
  std::vector<std::string> keys;
  Command run;
};

/// All subcommands in display order.
const std::vector<CommandInfo>& commands();
const CommandInfo& find_command(const std::string& name);

/// Parses the arguments (without the program name), runs the subcommand and
/// maps errors to exit codes: 2 for configuration and usage errors, 1 for
/// numerical failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ionxy::cli
