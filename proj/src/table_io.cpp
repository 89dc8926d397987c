#include "qkpc/table_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qkpc {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

double round_through_text(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

TableValue TableValue::number(double x) { return TableValue{round_through_text(x)}; }

TableValue TableValue::integer(std::int64_t x) { return TableValue{x}; }

TableValue TableValue::text(std::string s) { return TableValue{std::move(s)}; }

std::string TableValue::to_csv() const {
  if (const double* d = std::get_if<double>(&data)) {
    return format_number(*d);
  }
  if (const std::int64_t* i = std::get_if<std::int64_t>(&data)) {
    return std::to_string(*i);
  }
  return std::get<std::string>(data);
}

void Table::add_row(std::vector<TableValue> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("Table: row width does not match header");
  }
  rows.push_back(std::move(row));
}

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << row[c].to_csv();
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const Table& table) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json rec = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      const TableValue& v = row[c];
      if (const double* d = std::get_if<double>(&v.data)) {
        rec[table.columns[c]] = *d;
      } else if (const std::int64_t* i = std::get_if<std::int64_t>(&v.data)) {
        rec[table.columns[c]] = *i;
      } else {
        rec[table.columns[c]] = std::get<std::string>(v.data);
      }
    }
    records.push_back(std::move(rec));
  }
  return records.dump(2) + "\n";
}

Table parse_csv(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (header) {
      table.columns = fields;
      header = false;
      continue;
    }
    std::vector<TableValue> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) {
      // Numbers re-enter as numbers so a re-emit reproduces %.9g text;
      // anything that does not fully parse stays text.
      char* end = nullptr;
      const double d = std::strtod(f.c_str(), &end);
      if (!f.empty() && end == f.c_str() + f.size()) {
        if (f.find_first_of(".eE") == std::string::npos && f.size() < 18) {
          row.push_back(TableValue::integer(std::strtoll(f.c_str(), nullptr, 10)));
        } else {
          row.push_back(TableValue{d});
        }
      } else {
        row.push_back(TableValue::text(f));
      }
    }
    table.add_row(std::move(row));
  }
  return table;
}

std::string to_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : manifest.parameters) {
    params[key] = value;
  }
  j["parameters"] = params;
  if (manifest.has_seed) {
    j["seed"] = manifest.seed;
  }
  j["version"] = manifest.version;
  j["timestamp"] = manifest.timestamp;
  return j.dump(2) + "\n";
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace

void write_table_with_manifest(const std::string& path, const std::string& format,
                               const Table& table, RunManifest manifest) {
  std::string content;
  if (format == "csv") {
    content = to_csv(table);
  } else if (format == "json") {
    content = to_json(table);
  } else {
    throw std::invalid_argument("unknown format: " + format + " (expected csv or json)");
  }
  manifest.timestamp = utc_timestamp();
  const std::string manifest_json = to_json(manifest);
  write_file(path, content);
  write_file(path + ".manifest.json", manifest_json);
}

}  // namespace qkpc
