#include "grasseig_bench/trace_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "grasseig/errors.hpp"

namespace grasseig::bench {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hash_matrix(const Matrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  const std::size_t len = static_cast<std::size_t>(m.size()) * sizeof(double);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_trace_csv(std::ostream& out, const Metadata& meta, const std::vector<TraceRow>& rows) {
  for (const auto& [k, v] : meta) out << "# " << k << ": " << v << '\n';
  out << kTraceColumns << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const TraceRow& r : rows) {
    out << r.iter << ',' << r.block_matvecs << ',' << format_double(r.fval) << ',' << opt(r.subopt)
        << ',' << opt(r.dist) << ',' << format_double(r.grad_norm) << ',' << opt(r.wall_time_s)
        << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Metadata& meta,
                     const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file " + path.string());
  write_trace_csv(out, meta, rows);
  if (!out) throw IoError("error while writing trace file " + path.string());
}

std::optional<std::string> TraceFile::get(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

namespace {

template <class T>
T parse_number(std::string_view s, const std::string& where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError(where + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

std::optional<double> parse_optional(std::string_view s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  return parse_number<double>(s, where);
}

}  // namespace

TraceFile read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file " + path.string());
  TraceFile tf;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (!header && line.rfind("# ", 0) == 0) {
      const std::size_t colon = line.find(": ", 2);
      if (colon == std::string::npos) throw FormatError(where + ": metadata line without ': '");
      tf.meta.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (!header) {
      if (line != kTraceColumns) throw FormatError(where + ": unexpected header '" + line + "'");
      header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const std::size_t c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (f.size() != 7) throw FormatError(where + ": expected 7 fields");
    TraceRow r;
    r.iter = parse_number<std::int64_t>(f[0], where);
    r.block_matvecs = parse_number<std::uint64_t>(f[1], where);
    r.fval = parse_number<double>(f[2], where);
    r.subopt = parse_optional(f[3], where);
    r.dist = parse_optional(f[4], where);
    r.grad_norm = parse_number<double>(f[5], where);
    r.wall_time_s = parse_optional(f[6], where);
    tf.rows.push_back(r);
  }
  if (!header) throw FormatError(path.string() + ": missing CSV header");
  return tf;
}

}  // namespace grasseig::bench
