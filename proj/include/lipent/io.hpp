#pragma once

// Result tables, CSV output and small file helpers shared by the experiment
// runners and the command-line tool.

#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace lipent {

inline constexpr const char* kVersion = "0.1.0";

using Cell = std::variant<std::int64_t, double, std::string>;

/// Ordered rows of named columns plus free-form metadata. CSV output follows
/// RFC 4180 with LF line endings and reals printed with 17 significant digits.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json metadata = nlohmann::json::object();
  bool pass = true;

  void add_row(std::vector<Cell> row);
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_real(double x);
std::string csv_escape(const std::string& field);

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Throws ConfigError unless `j` is an object whose keys all appear in `allowed`.
void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& what);

nlohmann::json read_json_file(const std::string& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace lipent
