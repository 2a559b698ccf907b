#include "sketchbound/matrix_market.hpp"

#include "sketchbound/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace sketchbound {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

DenseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("matrix market: empty input");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix")
    throw IoError("matrix market: missing '%%MatrixMarket matrix' banner");
  if (format != "array" || field != "real" || symmetry != "general")
    throw IoError("matrix market: only 'array real general' is supported, got '" + line + "'");

  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    break;
  }
  long rows = 0, cols = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols) || rows < 1 || cols < 1)
      throw IoError("matrix market: bad size line '" + line + "'");
  }
  DenseMatrix M(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      double value = 0.0;
      if (!(in >> value)) {
        std::ostringstream msg;
        msg << "matrix market: expected " << rows * cols << " values, read " << j * rows + i;
        throw IoError(msg.str());
      }
      M(i, j) = value;
    }
  }
  if (!M.allFinite()) throw IoError("matrix market: non-finite entry");
  return M;
}

DenseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_matrix_market(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_matrix_market(std::ostream& out, const DenseMatrix& M) {
  out << "%%MatrixMarket matrix array real general\n" << M.rows() << ' ' << M.cols() << '\n';
  char buf[40];
  for (Index j = 0; j < M.cols(); ++j) {
    for (Index i = 0; i < M.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", M(i, j));
      out << buf;
    }
  }
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& M) {
  std::ostringstream out;
  write_matrix_market(out, M);
  write_text_atomically(path, out.str());
}

}  // namespace sketchbound
