#pragma once

#include <iosfwd>
#include <string>

#include "qmanopt/linalg.hpp"

namespace qmanopt {

// Dense-matrix text interchange in MatrixMarket array format:
//   %%MatrixMarket matrix array real general
// followed by "rows cols" and rows*cols values in column-major order.

Matrix read_matrix_market(std::istream& in);
Matrix read_matrix_market_file(const std::string& path);

void write_matrix_market(std::ostream& out, const Matrix& m);
void write_matrix_market_file(const std::string& path, const Matrix& m);

}  // namespace qmanopt
