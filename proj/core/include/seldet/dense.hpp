#pragma once

#include <Eigen/Dense>

#include "seldet/sparse.hpp"

namespace seldet {

// Dense reference computations. Used by tests and the `verify` path only.

inline constexpr Index kDenseOracleLimit = 500;

Eigen::MatrixXd to_dense(const SparseSymmetric& a);

/// Full inverse by pivoted dense elimination. Throws TooLarge for n > 500 and
/// SingularMatrix when the matrix is not invertible.
Eigen::MatrixXd dense_inverse_oracle(const SparseSymmetric& a);

/// log det of an SPD matrix via dense Cholesky; throws SingularMatrix if not SPD.
double dense_log_det(const SparseSymmetric& a);

}  // namespace seldet
