#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ionxy {

/// Provenance written at the top of every output file.
struct RunMetadata {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

/// Column-major names, row-major numeric data.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit Table(std::vector<std::string> names = {}) : columns(std::move(names)) {}
  /// Throws InvalidArgument on a width mismatch.
  void add(std::vector<double> row);
};

using Scalars = std::vector<std::pair<std::string, double>>;

enum class OutputFormat { Csv, Json };
OutputFormat output_format_from_string(const std::string& name);
std::string extension(OutputFormat format);

/// Shortest round-trip decimal; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

/// `# key: value` header lines, a header row, then data; LF endings.
void write_csv(std::ostream& out, const Table& table, const RunMetadata& meta);
/// {"meta": {...}, "summary": {...}, "columns": [...], "rows": [[...], ...]}.
void write_json(std::ostream& out, const Table& table, const RunMetadata& meta, const Scalars& summary = {});
/// JSON object with metadata and named scalars/vectors only.
void write_report(std::ostream& out, const RunMetadata& meta, const Scalars& summary,
                  const std::vector<std::pair<std::string, std::vector<double>>>& arrays = {});

/// Writes `dir/stem.csv` or `dir/stem.json`, creating `dir`. Returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, OutputFormat format,
                                  const Table& table, const RunMetadata& meta, const Scalars& summary = {});

std::string version_string();

}  // namespace ionxy
