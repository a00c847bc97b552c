#pragma once

#include <vector>

namespace ladb {

// Inverse of a row-major d x d matrix via Gauss-Jordan elimination with
// partial pivoting. Throws std::invalid_argument on singular input.
std::vector<double> invert_matrix(std::vector<double> m, int d);

// y = M x for a row-major d x d matrix.
std::vector<double> mat_vec(const std::vector<double>& m, const std::vector<double>& x);

}  // namespace ladb
