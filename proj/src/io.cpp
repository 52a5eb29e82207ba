#include "polaron/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace polaron {

static_assert(std::endian::native == std::endian::little, "checkpoint encoding assumes a little-endian host");

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw BasisMismatch("table row width does not match the header");
  rows.push_back(std::move(row));
}

bool Table::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("table has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ConfigError("not a number in table: '" + s + "'");
  return v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::string format_tsv(const Table& t) {
  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << '\n';
  for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "\t" : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << fmt(r[i]);
    os << '\n';
  }
  return os.str();
}

void write_tsv(const std::string& path, const Table& t) { write_file(path, format_tsv(t)); }

Table parse_tsv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool schema = false, header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = body.substr(0, eq), value = body.substr(eq + 1);
      if (key == "schema_version") {
        if (value != std::to_string(kSchemaVersion)) throw ConfigError("unsupported table schema_version " + value);
        schema = true;
      } else {
        t.meta.emplace_back(key, value);
      }
      continue;
    }
    if (!header) {
      t.columns = split_tabs(line);
      header = true;
      continue;
    }
    const auto cells = split_tabs(line);
    if (cells.size() != t.columns.size()) throw ConfigError("table row has the wrong number of cells");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c));
    t.rows.push_back(std::move(row));
  }
  if (!schema) throw ConfigError("table lacks a schema_version line");
  if (!header) throw ConfigError("table lacks a header row");
  return t;
}

Table read_tsv(const std::string& path) { return parse_tsv(read_file(path)); }

void write_file(const std::string& path, const std::string& bytes) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("write failed for '" + path + "'");
  }
  std::filesystem::rename(tmp, p);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

constexpr char kMagic[8] = {'P', 'L', 'R', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_array(std::string& out, const std::vector<cplx>& a) {
  put<std::uint64_t>(out, a.size());
  out.append(reinterpret_cast<const char*>(a.data()), a.size() * sizeof(cplx));
}

struct Reader {
  const std::string& s;
  std::size_t pos = 0;

  template <class T>
  T get() {
    if (pos + sizeof(T) > s.size()) throw ConfigError("checkpoint is truncated");
    T v;
    std::memcpy(&v, s.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }

  std::vector<cplx> array(std::uint64_t expected) {
    const auto n = get<std::uint64_t>();
    if (n != expected) throw ConfigError("checkpoint array length does not match its grid");
    if (pos + n * sizeof(cplx) > s.size()) throw ConfigError("checkpoint is truncated");
    std::vector<cplx> a(n);
    std::memcpy(a.data(), s.data() + pos, n * sizeof(cplx));
    pos += n * sizeof(cplx);
    return a;
  }
};

std::uint32_t crc_of(const char* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(crc32(crc, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  std::size_t points = 1;
  for (int i = 0; i < c.d; ++i) points *= static_cast<std::size_t>(c.N);
  if (c.psi.size() != points || c.phi.size() != points) throw BasisMismatch("checkpoint arrays do not match N^d");
  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.N));
  put<double>(out, c.L);
  put<double>(out, c.alpha);
  put<double>(out, c.t);
  put_array(out, c.psi);
  put_array(out, c.phi);
  put<std::uint32_t>(out, crc_of(out.data(), out.size()));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw ConfigError("not a checkpoint file (bad magic)");
  }
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (stored != crc_of(bytes.data(), bytes.size() - 4)) throw ConfigError("checkpoint checksum mismatch");
  Reader r{bytes, sizeof kMagic};
  if (r.get<std::uint32_t>() != kCheckpointVersion) throw ConfigError("unsupported checkpoint version");
  Checkpoint c;
  c.d = static_cast<int>(r.get<std::uint32_t>());
  c.N = static_cast<int>(r.get<std::uint32_t>());
  if (c.d < 1 || c.d > 3 || c.N < 1) throw ConfigError("checkpoint has invalid grid dimensions");
  c.L = r.get<double>();
  c.alpha = r.get<double>();
  c.t = r.get<double>();
  std::uint64_t points = 1;
  for (int i = 0; i < c.d; ++i) points *= static_cast<std::uint64_t>(c.N);
  c.psi = r.array(points);
  c.phi = r.array(points);
  if (r.pos + 4 != bytes.size()) throw ConfigError("checkpoint has trailing bytes");
  return c;
}

void write_checkpoint(const std::string& path, const Checkpoint& c) { write_file(path, encode_checkpoint(c)); }

Checkpoint read_checkpoint(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace polaron
