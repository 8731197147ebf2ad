#include "seldet/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace seldet {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

SparseSymmetric read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty stream");

  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw Error(ErrorKind::ParseError, "missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw Error(ErrorKind::UnsupportedFormat, "object '" + object + "'");
  if (format != "coordinate") throw Error(ErrorKind::UnsupportedFormat, "format '" + format + "'");
  if (field != "real" && field != "integer" && field != "pattern") {
    throw Error(ErrorKind::UnsupportedFormat, "field '" + field + "'");
  }
  if (symmetry != "symmetric") throw Error(ErrorKind::UnsupportedFormat, "symmetry '" + symmetry + "'");
  const bool pattern = field == "pattern";

  do {
    if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "missing size line");
  } while (line.empty() || line[0] == '%' || blank(line));

  long long rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries) || rows < 0 || entries < 0) {
      throw Error(ErrorKind::ParseError, "malformed size line '" + line + "'");
    }
  }
  if (rows != cols) throw Error(ErrorKind::UnsupportedFormat, "symmetric matrix must be square");

  TripletList t(static_cast<Index>(rows));
  t.entries.reserve(static_cast<std::size_t>(entries));
  long long read = 0;
  while (read < entries && std::getline(in, line)) {
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    std::istringstream rec(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(rec >> i >> j) || (!pattern && !(rec >> v))) {
      throw Error(ErrorKind::ParseError, "malformed entry '" + line + "'");
    }
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw Error(ErrorKind::ParseError, "entry index out of range in '" + line + "'");
    }
    t.add(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    ++read;
  }
  if (read != entries) {
    throw Error(ErrorKind::ParseError,
                "expected " + std::to_string(entries) + " entries, found " + std::to_string(read));
  }
  return from_triplets(t);
}

SparseSymmetric read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(const SparseSymmetric& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.size() << ' ' << a.size() << ' ' << a.nnz() << '\n';
  out << std::scientific << std::setprecision(16);
  for (Index j = 0; j < a.size(); ++j) {
    const auto rows = a.column_rows(j);
    const auto vals = a.column_values(j);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      out << rows[q] + 1 << ' ' << j + 1 << ' ' << vals[q] << '\n';
    }
  }
  if (!out) throw Error(ErrorKind::IoError, "write failed");
}

void write_matrix_market(const SparseSymmetric& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  write_matrix_market(a, out);
}

}  // namespace seldet
