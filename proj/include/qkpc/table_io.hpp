#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

// Tidy-table output for the command-line front end: one observation per row,
// identical records behind both the CSV and JSON encodings, and a manifest
// that pins down how a file was produced.

namespace qkpc {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Numbers cross the serialization boundary as %.9g text; values are rounded
// through that text before they enter a record so the CSV and JSON encodings
// of a table parse back to bit-identical doubles.
std::string format_number(double x);
double round_through_text(double x);

struct TableValue {
  std::variant<double, std::int64_t, std::string> data;

  static TableValue number(double x);
  static TableValue integer(std::int64_t x);
  static TableValue text(std::string s);

  // Numeric view of either numeric alternative; throws on text.
  double as_number() const;

  std::string to_csv() const;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<TableValue>> rows;

  void add_row(std::vector<TableValue> row);
};

std::string to_csv(const Table& table);
std::string to_json(const Table& table);  // array of objects, keyed by column

// Round trip used by the determinism checks: parsing our own CSV and
// re-emitting it must reproduce the bytes.
Table parse_csv(const std::string& text);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string version = kArtifactVersion;
  std::string timestamp;  // filled at write time
};

std::string to_json(const RunManifest& manifest);

// Writes the table in the requested format ("csv" or "json") plus a sibling
// `<path>.manifest.json`. The data file itself carries no timestamp, so
// reruns with the same parameters and seed are byte-identical. Output is
// staged in memory and written in one shot; a failure leaves no partial file.
void write_table_with_manifest(const std::string& path, const std::string& format,
                               const Table& table, RunManifest manifest);

}  // namespace qkpc
