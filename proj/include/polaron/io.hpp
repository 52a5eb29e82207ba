#pragma once

// Run artifacts: tab-separated tables, flat binary checkpoints.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polaron/grid.hpp"

namespace polaron {

inline constexpr int kSchemaVersion = 1;

/// Column-major numeric table with string metadata. Rows are appended in order.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> meta;   // written as "# key=value"

  void add_row(std::vector<double> row);
  std::size_t column(const std::string& name) const;       // throws ConfigError when absent
  std::vector<double> values(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Format: "# schema_version=1", further "# key=value" lines, a header row,
/// then one line per row. Numbers use %.17g; non-finite values are "nan"/"inf".
std::string format_tsv(const Table& t);
void write_tsv(const std::string& path, const Table& t);
Table parse_tsv(const std::string& text);
Table read_tsv(const std::string& path);

/// Writes bytes atomically enough for our purposes (temp file + rename).
void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

struct Checkpoint {
  int d = 1;
  int N = 0;
  double L = 0.0;
  double alpha = 1.0;
  double t = 0.0;
  std::vector<cplx> psi;   // position basis, N^d entries
  std::vector<cplx> phi;   // momentum basis, N^d entries
};

/// Layout (little endian):
///   "PLRNCKPT" | u32 version | u32 d | u32 N | f64 L | f64 alpha | f64 t
///   | u64 n | n x (f64 re, f64 im) psi | u64 n | n x (f64 re, f64 im) phi
///   | u32 crc32 of everything before it
std::string encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(const std::string& bytes);
void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace polaron
