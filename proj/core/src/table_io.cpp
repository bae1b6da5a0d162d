#include "ionxy/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ionxy/errors.hpp"

namespace ionxy {

using ordered_json = nlohmann::ordered_json;

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw InvalidArgument("row width does not match the column count");
  rows.push_back(std::move(row));
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ConfigError("unknown output format '" + name + "' (csv, json)");
}

std::string extension(OutputFormat format) { return format == OutputFormat::Csv ? ".csv" : ".json"; }

std::string version_string() { return IONXY_VERSION_STRING; }

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

namespace {

ordered_json meta_json(const RunMetadata& meta) {
  ordered_json m;
  m["tool"] = "ionxy";
  m["version"] = version_string();
  m["command"] = meta.command;
  m["config_hash"] = meta.config_hash;
  m["seed"] = meta.seed;
  for (const auto& [k, v] : meta.extra) m[k] = v;
  return m;
}

ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

void write_csv(std::ostream& out, const Table& table, const RunMetadata& meta) {
  out << "# ionxy " << version_string() << '\n';
  out << "# command: " << meta.command << '\n';
  out << "# config_hash: " << meta.config_hash << '\n';
  out << "# seed: " << meta.seed << '\n';
  for (const auto& [k, v] : meta.extra) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& table, const RunMetadata& meta, const Scalars& summary) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  ordered_json s = ordered_json::object();
  for (const auto& [k, v] : summary) s[k] = number_json(v);
  j["summary"] = s;
  j["columns"] = table.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r = ordered_json::array();
    for (double v : row) r.push_back(number_json(v));
    rows.push_back(r);
  }
  j["rows"] = rows;
  out << j.dump(2) << '\n';
}

void write_report(std::ostream& out, const RunMetadata& meta, const Scalars& summary,
                  const std::vector<std::pair<std::string, std::vector<double>>>& arrays) {
  ordered_json j;
  j["meta"] = meta_json(meta);
  for (const auto& [k, v] : summary) j[k] = number_json(v);
  for (const auto& [k, values] : arrays) {
    ordered_json a = ordered_json::array();
    for (double v : values) a.push_back(number_json(v));
    j[k] = a;
  }
  out << j.dump(2) << '\n';
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem, OutputFormat format,
                                  const Table& table, const RunMetadata& meta, const Scalars& summary) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + extension(format));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  if (format == OutputFormat::Csv) {
    write_csv(out, table, meta);
  } else {
    write_json(out, table, meta, summary);
  }
  return path;
}

}  // namespace ionxy
