#include "ionxy_cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ionxy/errors.hpp"
#include "ionxy/presets.hpp"

namespace ionxy::cli {

RunMetadata Context::metadata() const {
  RunMetadata m;
  m.command = command;
  m.config_hash = config.hash();
  m.seed = global.seed;
  return m;
}

void Context::note(const std::string& message) const {
  if (global.verbosity > 0 && log != nullptr) *log << "[" << command << "] " << message << '\n';
}

std::filesystem::path Context::emit(const std::string& stem, const Table& table, const Scalars& summary) const {
  const auto path = write_table(global.out_dir, stem, global.format, table, metadata(), summary);
  if (out != nullptr) *out << path.string() << '\n';
  return path;
}

std::filesystem::path Context::emit_report(const std::string& stem, const Scalars& summary,
                                           const std::vector<std::pair<std::string, std::vector<double>>>& arrays) const {
  std::filesystem::create_directories(global.out_dir);
  const auto path = global.out_dir / (stem + ".json");
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write " + path.string());
  write_report(file, metadata(), summary, arrays);
  if (out != nullptr) *out << path.string() << '\n';
  return path;
}

const CommandInfo& find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown subcommand '" + name + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-range XY models in trapped-ion chains: chains, couplings, leakage and transfer protocols",
               "ionxy"};
  app.set_version_flag("--version", version_string());
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string paper_fig;
  int threads = 1;
  int verbosity = 0;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--paper-fig", paper_fig, "load a stored parameter set (2a 2b 2c 2d 3a 3b 3c 4 5)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("-v,--verbose", verbosity, "progress messages on stderr");

  for (const auto& c : commands()) app.add_subcommand(c.name, c.description);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return ConfigFailure;
  }

  try {
    std::string name;
    if (!app.get_subcommands().empty()) name = app.get_subcommands().front()->get_name();

    Context ctx;
    if (!paper_fig.empty()) {
      const Preset& preset = find_preset(paper_fig);
      if (name.empty()) name = preset.command;
      if (name != preset.command) {
        throw ConfigError("preset " + preset.id + " belongs to '" + preset.command + "', not '" + name + "'");
      }
      ctx.config = preset.config();
    }
    if (name.empty()) {
      err << app.help();
      return ConfigFailure;
    }
    if (!config_path.empty()) ctx.config.merge(Config::load(config_path));

    const CommandInfo& info = find_command(name);
    ctx.config.require_known(info.keys);
    ctx.command = name;
    ctx.global.out_dir = out_dir;
    ctx.global.format = output_format_from_string(format);
    ctx.global.seed = seed;
    ctx.global.threads = threads;
    ctx.global.verbosity = verbosity;
    ctx.log = &err;
    ctx.out = &out;
    info.run(ctx);
    return Success;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return ConfigFailure;
  } catch (const InvalidArgument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return ConfigFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return NumericalFailure;
  }
}

}  // namespace ionxy::cli
