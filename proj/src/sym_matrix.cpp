#include "nlsdp/sym_matrix.hpp"

#include <cmath>

#include "nlsdp/errors.hpp"

namespace nlsdp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;

int packed_order(const Eigen::VectorXd& v) {
  // Invert m = n(n+1)/2.
  const int m = static_cast<int>(v.size());
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * m + 1.0) - 1.0) / 2.0));
  if (n < 1 || packed_size(n) != m)
    throw InvalidInput("packed vector length is not n(n+1)/2 for any n >= 1");
  return n;
}
}  // namespace

SymMatrix::SymMatrix(int n) : n_(n) {
  if (n < 1) throw InvalidInput("SymMatrix order must be >= 1");
  m_ = Eigen::MatrixXd::Zero(n, n);
}

SymMatrix SymMatrix::from_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidInput("SymMatrix requires a square matrix");
  SymMatrix s(static_cast<int>(a.rows()));
  for (int j = 0; j < s.n_; ++j)
    for (int i = 0; i <= j; ++i) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s.m_(i, j) = v;
      s.m_(j, i) = v;
    }
  return s;
}

SymMatrix SymMatrix::from_packed(const Eigen::VectorXd& v) {
  SymMatrix s(packed_order(v));
  for (int j = 0; j < s.n_; ++j)
    for (int i = 0; i <= j; ++i) {
      const double e = v[packed_index(i, j)];
      const double x = (i == j) ? e : e / kSqrt2;
      s.m_(i, j) = x;
      s.m_(j, i) = x;
    }
  return s;
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  s.m_.setIdentity();
  return s;
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  SymMatrix s(static_cast<int>(d.size()));
  s.m_ = d.asDiagonal();
  return s;
}

void SymMatrix::set(int i, int j, double v) {
  m_(i, j) = v;
  m_(j, i) = v;
}

Eigen::VectorXd SymMatrix::packed() const {
  Eigen::VectorXd v(packed_size(n_));
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i <= j; ++i) v[packed_index(i, j)] = (i == j) ? m_(i, j) : kSqrt2 * m_(i, j);
  return v;
}

double SymMatrix::inner(const SymMatrix& other) const {
  if (other.n_ != n_) throw InvalidInput("SymMatrix::inner dimension mismatch");
  return m_.cwiseProduct(other.m_).sum();
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  if (other.n_ != n_) throw InvalidInput("SymMatrix::operator+ dimension mismatch");
  SymMatrix s(n_);
  s.m_ = m_ + other.m_;
  return s;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  if (other.n_ != n_) throw InvalidInput("SymMatrix::operator- dimension mismatch");
  SymMatrix s(n_);
  s.m_ = m_ - other.m_;
  return s;
}

SymMatrix SymMatrix::scaled(double s) const {
  SymMatrix out(n_);
  out.m_ = s * m_;
  return out;
}

}  // namespace nlsdp
