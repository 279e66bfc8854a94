#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "grasseig/errors.hpp"
#include "grasseig/matops.hpp"

namespace grasseig {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t lineno) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw IoError("matrix market: cannot parse '" + std::string(tok) + "' on line " +
                  std::to_string(lineno));
  }
  return value;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

SymmetricOperator load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix market file " + path.string());

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw IoError("matrix market: empty file " + path.string());
  ++lineno;

  const auto header = split(line);
  if (header.size() != 5 || header[0] != "%%MatrixMarket") {
    throw FormatError("matrix market: malformed header in " + path.string());
  }
  const std::string object = lower(std::string(header[1]));
  const std::string format = lower(std::string(header[2]));
  const std::string field = lower(std::string(header[3]));
  const std::string symmetry = lower(std::string(header[4]));
  if (object != "matrix") throw FormatError("matrix market: object must be 'matrix'");
  if (format != "coordinate" && format != "array") {
    throw FormatError("matrix market: unsupported format '" + format + "'");
  }
  if (field != "real" && field != "integer" && !(field == "pattern" && format == "coordinate")) {
    throw FormatError("matrix market: unsupported field '" + field + "'");
  }
  if (symmetry != "symmetric" && symmetry != "general") {
    throw FormatError("matrix market: unsupported symmetry '" + symmetry + "'");
  }
  const bool coordinate = format == "coordinate";
  const bool symmetric = symmetry == "symmetric";
  const bool pattern = field == "pattern";

  // size line
  std::vector<std::string_view> size_tok;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    size_tok = split(line);
    break;
  }
  if (size_tok.size() != (coordinate ? 3u : 2u)) {
    throw IoError("matrix market: malformed size line " + std::to_string(lineno));
  }
  const auto rows = parse_number<long long>(size_tok[0], lineno);
  const auto cols = parse_number<long long>(size_tok[1], lineno);
  if (rows < 1 || cols < 1) throw FormatError("matrix market: dimensions must be positive");
  if (rows != cols) {
    throw FormatError("matrix market: matrix is " + std::to_string(rows) + " x " +
                      std::to_string(cols) + ", expected square");
  }
  if (rows > std::numeric_limits<int>::max()) throw SizeError("matrix market: n too large");
  const int n = static_cast<int>(rows);

  long long expected = 0;
  if (coordinate) {
    expected = parse_number<long long>(size_tok[2], lineno);
    if (expected < 0) throw IoError("matrix market: negative entry count");
  } else {
    expected = symmetric ? rows * (rows + 1) / 2 : rows * rows;
  }

  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * expected : expected));
  auto push = [&](int i, int j, double v) {
    if (v == 0.0) return;
    triplets.emplace_back(i, j, v);
    if (symmetric && i != j) triplets.emplace_back(j, i, v);
  };

  long long count = 0;
  long long ai = 0;
  long long aj = 0;
  while (count < expected && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    const auto tok = split(line);
    if (coordinate) {
      if (tok.size() != (pattern ? 2u : 3u)) {
        throw IoError("matrix market: malformed entry on line " + std::to_string(lineno));
      }
      const auto i = parse_number<long long>(tok[0], lineno);
      const auto j = parse_number<long long>(tok[1], lineno);
      if (i < 1 || i > rows || j < 1 || j > rows) {
        throw IoError("matrix market: index out of range on line " + std::to_string(lineno));
      }
      const double v = pattern ? 1.0 : parse_number<double>(tok[2], lineno);
      push(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    } else {
      if (tok.size() != 1) {
        throw IoError("matrix market: malformed entry on line " + std::to_string(lineno));
      }
      const double v = parse_number<double>(tok[0], lineno);
      // column-major; symmetric arrays store the lower triangle column by column
      push(static_cast<int>(ai), static_cast<int>(aj), v);
      if (++ai == rows) {
        ++aj;
        ai = symmetric ? aj : 0;
      }
    }
    ++count;
  }
  if (count != expected) {
    throw IoError("matrix market: expected " + std::to_string(expected) + " entries, found " +
                  std::to_string(count));
  }

  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  // sparse() verifies symmetry for general storage; mirrored storage passes trivially
  return SymmetricOperator::sparse(std::move(a));
}

}  // namespace grasseig
