#pragma once

#include <Eigen/Core>

namespace nlsdp {

/// Number of packed coordinates of an n x n symmetric matrix.
inline int packed_size(int n) { return n * (n + 1) / 2; }

/// Position of entry (i,j), i <= j, in the packed vector (upper triangle,
/// column-major).
inline int packed_index(int i, int j) { return j * (j + 1) / 2 + i; }

/// Dense real symmetric matrix. Storage keeps (i,j) and (j,i) bitwise equal;
/// the packed form scales off-diagonal entries by sqrt(2) so the Euclidean
/// inner product of packed vectors equals the Frobenius inner product.
class SymMatrix {
 public:
  /// Inert empty state (dim 0); every operation rejects it.
  SymMatrix() : n_(0) {}

  /// Zero matrix of order n (n >= 1; n == 0 is rejected).
  explicit SymMatrix(int n);

  /// Builds from a square matrix, symmetrizing as 0.5*(a + a^T).
  static SymMatrix from_matrix(const Eigen::MatrixXd& a);

  /// Inverse of packed().
  static SymMatrix from_packed(const Eigen::VectorXd& v);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return m_(i, j); }
  /// Sets both (i,j) and (j,i).
  void set(int i, int j, double v);

  const Eigen::MatrixXd& mat() const { return m_; }

  /// Packed vector of length n(n+1)/2 with sqrt(2)-scaled off-diagonals.
  Eigen::VectorXd packed() const;

  double norm() const { return m_.norm(); }
  double inner(const SymMatrix& other) const;

  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix scaled(double s) const;

 private:
  int n_;
  Eigen::MatrixXd m_;
};

}  // namespace nlsdp
