#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Finite-dimensional C*-algebras as direct sums of full matrix algebras, with
// the operator norm, a positivity test, and r-fold matrix amplification.
// Elements are immutable value types; all operations allocate fresh results.

namespace cpcsys {

constexpr double kPositivityTol = 1e-10;

// Direct sum of full matrix algebras M_{d_0} (+) ... (+) M_{d_{B-1}}.
class FiniteDimCstar {
 public:
  explicit FiniteDimCstar(std::vector<int> block_dims);

  int block_count() const { return static_cast<int>(dims_.size()); }
  int block_dim(int b) const { return dims_.at(static_cast<std::size_t>(b)); }
  const std::vector<int>& block_dims() const { return dims_; }

  // Length of the coefficient vector: sum of d_b^2. Vectorization is
  // row-major within each block, blocks concatenated in order.
  int coeff_dim() const { return coeff_dim_; }
  int coeff_offset(int b) const { return offsets_.at(static_cast<std::size_t>(b)); }

  bool operator==(const FiniteDimCstar& o) const { return dims_ == o.dims_; }
  bool operator!=(const FiniteDimCstar& o) const { return !(*this == o); }

  std::string describe() const;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int coeff_dim_ = 0;
};

// An element: one complex square matrix per block.
class AlgElement {
 public:
  AlgElement(FiniteDimCstar algebra, std::vector<Eigen::MatrixXcd> blocks);

  static AlgElement zero(const FiniteDimCstar& a);
  static AlgElement unit(const FiniteDimCstar& a);
  static AlgElement matrix_unit(const FiniteDimCstar& a, int block, int row, int col);

  const FiniteDimCstar& algebra() const { return algebra_; }
  const Eigen::MatrixXcd& block(int b) const { return blocks_.at(static_cast<std::size_t>(b)); }
  Eigen::MatrixXcd& block(int b) { return blocks_.at(static_cast<std::size_t>(b)); }

  AlgElement adjoint() const;

  // Row-major per block, blocks concatenated.
  Eigen::VectorXcd to_coeffs() const;
  static AlgElement from_coeffs(const FiniteDimCstar& a, const Eigen::VectorXcd& v);

 private:
  FiniteDimCstar algebra_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

AlgElement operator+(const AlgElement& x, const AlgElement& y);
AlgElement operator-(const AlgElement& x, const AlgElement& y);
AlgElement operator*(const AlgElement& x, const AlgElement& y);
AlgElement operator*(std::complex<double> c, const AlgElement& x);

// Largest singular value over blocks; the C*-norm of the direct sum.
double operator_norm(const AlgElement& x);
double operator_norm(const Eigen::MatrixXcd& m);

// Smallest eigenvalue of the Hermitian part, over all blocks.
double min_hermitian_eigenvalue(const AlgElement& x);

// Self-adjoint within tol and all block spectra >= -tol.
bool is_positive(const AlgElement& x, double tol = kPositivityTol);

// M_r(A): each block dimension multiplied by r. Cell (p, q) of block b
// occupies rows [p*d_b, (p+1)*d_b) and columns [q*d_b, (q+1)*d_b).
FiniteDimCstar amplify_algebra(const FiniteDimCstar& a, int r);

// pattern (x) x blockwise: the amplified element whose (p, q) cell is
// pattern(p, q) * x. pattern must be r x r; identity gives diag(x, ..., x).
AlgElement amplify_elem(const AlgElement& x, int r, const Eigen::MatrixXcd& pattern);
AlgElement amplify_elem(const AlgElement& x, int r);

// General element of M_r(A) from an r x r grid of elements of A.
AlgElement assemble_amplified(const FiniteDimCstar& base, int r,
                              const std::vector<std::vector<AlgElement>>& cells);

// Inverse of assemble_amplified: the (p, q) cells of an element of M_r(A).
std::vector<std::vector<AlgElement>> amplified_cells(const FiniteDimCstar& base, int r,
                                                     const AlgElement& x);

}  // namespace cpcsys
