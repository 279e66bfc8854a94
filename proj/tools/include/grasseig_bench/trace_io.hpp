#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grasseig/solvers.hpp"

namespace grasseig::bench {

/// Column order of every trace file.
inline constexpr const char* kTraceColumns =
    "iter,block_matvecs,fval,subopt,dist,grad_norm,wall_time_s";

/// Ordered `# key: value` metadata lines written above the CSV header.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// %.17g formatting (round-trips every double).
std::string format_double(double v);

/// FNV-1a over the column-major bytes of the matrix, as 16 hex digits.
std::string hash_matrix(const Matrix& m);

/// Writes metadata lines, the header and one row per trace row.  Unknown
/// optional values are written as empty fields.
void write_trace_csv(std::ostream& out, const Metadata& meta, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::filesystem::path& path, const Metadata& meta,
                     const std::vector<TraceRow>& rows);

struct TraceFile {
  Metadata meta;
  std::vector<TraceRow> rows;

  std::optional<std::string> get(const std::string& key) const;
};

/// Inverse of write_trace_csv.  Throws FormatError on a malformed file.
TraceFile read_trace_csv(const std::filesystem::path& path);

}  // namespace grasseig::bench
