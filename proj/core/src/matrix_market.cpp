#include "qmanopt/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qmanopt/errors.hpp"

namespace qmanopt {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Matrix read_matrix_market(std::istream& in) {
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty MatrixMarket stream");
  ++lineno;
  std::istringstream header(lower(line));
  std::string banner, object, fmt, field, symmetry;
  header >> banner >> object >> fmt >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || fmt != "array" || field != "real") {
    throw ParseError("unsupported MatrixMarket header: " + line, lineno);
  }
  if (symmetry != "general") throw ParseError("only 'general' symmetry supported", lineno);

  Index rows = 0, cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream dims(line);
    if (!(dims >> rows >> cols) || rows <= 0 || cols <= 0) {
      throw ParseError("bad dimension line: " + line, lineno);
    }
    break;
  }
  if (rows == 0) throw ParseError("missing dimension line", lineno);

  Matrix m(rows, cols);
  Index count = 0;
  double value;
  while (count < rows * cols && in >> value) {
    m(count % rows, count / rows) = value;  // column-major
    ++count;
  }
  if (count != rows * cols) {
    throw ParseError("expected " + std::to_string(rows * cols) + " values, got " +
                     std::to_string(count));
  }
  return m;
}

Matrix read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const Matrix& m) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  out << std::setprecision(17);
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
  }
}

void write_matrix_market_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_matrix_market(out, m);
}

}  // namespace qmanopt
