#include "seldet/dense.hpp"

#include <string>

namespace seldet {

Eigen::MatrixXd to_dense(const SparseSymmetric& a) {
  const Index n = a.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    const auto rows = a.column_rows(j);
    const auto vals = a.column_values(j);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      m(rows[q], j) = vals[q];
      m(j, rows[q]) = vals[q];
    }
  }
  return m;
}

Eigen::MatrixXd dense_inverse_oracle(const SparseSymmetric& a) {
  if (a.size() > kDenseOracleLimit) {
    throw Error(ErrorKind::TooLarge, "dense oracle limited to n <= " + std::to_string(kDenseOracleLimit));
  }
  const Eigen::MatrixXd m = to_dense(a);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularMatrix, "matrix is singular");
  Eigen::MatrixXd inv = lu.inverse();
  return 0.5 * (inv + inv.transpose());
}

double dense_log_det(const SparseSymmetric& a) {
  if (a.size() > kDenseOracleLimit) {
    throw Error(ErrorKind::TooLarge, "dense oracle limited to n <= " + std::to_string(kDenseOracleLimit));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(to_dense(a));
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "matrix is not positive definite");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace seldet
